"""Rigid-body vector fields in the ambient matrix space.

The orientation variable is a plain 3x3 matrix; states off the rotation
manifold are legitimate inputs everywhere here. The modified field adds a
pull-back term -k_e * R (R^T R - I) that leaves the on-manifold dynamics
untouched while making the manifold attractive off it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .so3 import hat, sym_skew_split, vee


@dataclass
class RigidState:
    """Orientation matrix (possibly off-manifold) and body angular velocity."""

    r: np.ndarray
    omega: np.ndarray

    def __post_init__(self) -> None:
        self.r = np.asarray(self.r, dtype=float).reshape(3, 3)
        self.omega = np.asarray(self.omega, dtype=float).reshape(3)
        if not (np.isfinite(self.r).all() and np.isfinite(self.omega).all()):
            raise ValueError("RigidState entries must be finite")


@dataclass(frozen=True)
class InertiaMatrix:
    """Moment-of-inertia matrix; must be symmetric positive definite."""

    i_mat: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.i_mat, dtype=float).reshape(3, 3)
        object.__setattr__(self, "i_mat", m)
        if np.linalg.norm(m - m.T) > 1e-9 * max(1.0, float(np.linalg.norm(m))):
            raise ValueError("inertia matrix must be symmetric")
        if np.linalg.eigvalsh(m).min() <= 0:
            raise ValueError("inertia matrix must be positive definite")


@dataclass(frozen=True)
class AmbientParams:
    """Attractiveness gain; k_e = 0 recovers the unmodified field."""

    k_e: float = 1.0

    def __post_init__(self) -> None:
        if not np.isfinite(self.k_e) or self.k_e < 0:
            raise ValueError("k_e must be finite and nonnegative")


@dataclass(frozen=True)
class ConstraintSpec:
    """Constraint map f with zero set M, plus an SPD weight on its residual.

    jac, when given, must return the q x n Jacobian of f; otherwise
    make_attractive falls back to central finite differences.
    """

    f: Callable[[np.ndarray], np.ndarray]
    s: np.ndarray
    jac: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self) -> None:
        s = np.asarray(self.s, dtype=float)
        if s.ndim != 2 or s.shape[0] != s.shape[1]:
            raise ValueError("weight matrix must be square")
        if np.linalg.norm(s - s.T) > 1e-9 * max(1.0, float(np.linalg.norm(s))):
            raise ValueError("weight matrix must be symmetric")
        if np.linalg.eigvalsh(s).min() <= 0:
            raise ValueError("weight matrix must be positive definite")
        object.__setattr__(self, "s", s)


@dataclass(frozen=True)
class ReferenceTrajectory:
    """Closed-form reference (R0(t), Omega0(t), u0(t)) over a time horizon.

    The three callables must be mutually consistent: R0'(t) = R0(t) hat(Omega0(t))
    and Omega0'(t) = u0(t). reference_consistency_check measures the residuals.
    """

    r0: Callable[[float], np.ndarray]
    omega0: Callable[[float], np.ndarray]
    u0: Callable[[float], np.ndarray]
    horizon: tuple[float, float] = (0.0, np.inf)

    def contains(self, t: float) -> bool:
        return self.horizon[0] <= t <= self.horizon[1]


def cancel_gyroscopic_torque(
    inertia: InertiaMatrix, omega: np.ndarray, u: np.ndarray
) -> np.ndarray:
    """Torque that reduces the Euler equation to plain omega_dot = u."""
    omega = np.asarray(omega, dtype=float)
    u = np.asarray(u, dtype=float)
    m = inertia.i_mat
    return m @ u - np.cross(m @ omega, omega)


def manifold_potential_and_gradient(
    r: np.ndarray, params: AmbientParams
) -> tuple[float, np.ndarray]:
    """Orthogonality-defect potential (k_e/4)|R^T R - I|^2 and its gradient in R.

    Only defined on the open set det R > 0, where the zero set of the
    potential is exactly the rotation manifold.
    """
    r = np.asarray(r, dtype=float)
    if np.linalg.det(r) <= 0:
        raise ValueError("manifold potential requires det R > 0")
    e = r.T @ r - np.eye(3)
    value = 0.25 * params.k_e * float(np.sum(e * e))
    grad = params.k_e * (r @ e)
    return value, grad


def modified_vector_field(
    s: RigidState, u: np.ndarray, params: AmbientParams
) -> tuple[np.ndarray, np.ndarray]:
    """Rigid-body field with the manifold pull-back term.

    Returns (R_dot, omega_dot) = (R hat(omega) - k_e R (R^T R - I), u).
    With k_e = 0 this is the plain fully actuated rigid body.
    """
    u = np.asarray(u, dtype=float)
    r = s.r
    r_dot = r @ hat(s.omega) - params.k_e * (r @ (r.T @ r - np.eye(3)))
    return r_dot, u


def make_attractive(
    field: Callable[[np.ndarray, np.ndarray], np.ndarray],
    spec: ConstraintSpec,
    fd_step: float = 1e-6,
) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    """Subtract the gradient of 0.5 * f(x)^T S f(x) from an ambient field.

    On the zero set of f the returned field equals the input field; off it
    the added term pulls states back toward the zero set (for suitable S).
    """

    def gradient(x: np.ndarray) -> np.ndarray:
        fx = np.asarray(spec.f(x), dtype=float)
        if fx.shape != (spec.s.shape[0],):
            raise ValueError(
                f"constraint output has shape {fx.shape}, weight expects ({spec.s.shape[0]},)"
            )
        if spec.jac is not None:
            j = np.asarray(spec.jac(x), dtype=float)
        else:
            j = np.empty((fx.size, x.size))
            for col in range(x.size):
                step = np.zeros_like(x)
                step[col] = fd_step
                j[:, col] = (
                    np.asarray(spec.f(x + step), dtype=float)
                    - np.asarray(spec.f(x - step), dtype=float)
                ) / (2.0 * fd_step)
        if j.shape != (fx.size, x.size):
            raise ValueError(f"constraint Jacobian has shape {j.shape}, expected {(fx.size, x.size)}")
        return j.T @ (spec.s @ fx)

    def modified(x: np.ndarray, u: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.asarray(field(x, u), dtype=float) - gradient(x)

    return modified


def reference_consistency_check(
    ref: ReferenceTrajectory, samples: int = 50, h: float = 1e-4
) -> tuple[float, float]:
    """Max residuals of the reference-defining relations over sampled times.

    Differentiates R0 and Omega0 by central differences with step h and
    returns (max |vee(Skew(R0^T R0')) - Omega0|, max |Omega0' - u0|).
    """
    if h <= 0:
        raise ValueError("h must be positive")
    if samples < 2:
        raise ValueError("need at least two samples")
    t_a, t_b = ref.horizon
    if not np.isfinite(t_b):
        t_b = t_a + 10.0
    ts = np.linspace(t_a + h, t_b - h, samples)
    res_r = 0.0
    res_omega = 0.0
    for t in ts:
        r0 = ref.r0(t)
        dr = (ref.r0(t + h) - ref.r0(t - h)) / (2.0 * h)
        _, skew_part = sym_skew_split(r0.T @ dr)
        res_r = max(res_r, float(np.linalg.norm(vee(skew_part) - ref.omega0(t))))
        domega = (ref.omega0(t + h) - ref.omega0(t - h)) / (2.0 * h)
        res_omega = max(res_omega, float(np.linalg.norm(domega - ref.u0(t))))
    return res_r, res_omega
