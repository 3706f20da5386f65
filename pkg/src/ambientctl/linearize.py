"""Analytic linearization of the modified rigid-body field, with an
independent finite-difference oracle and the symmetric/skew coordinate
transform that decouples the linearized dynamics.

Flat-state layout is fixed for reproducibility: row-major R (9 entries)
followed by omega (3 entries).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .dynamics import AmbientParams, ReferenceTrajectory
from .so3 import hat, rotation_check, sym_skew_split, vee

DEFAULT_FD_STEP = 1e-5


def flatten_rigid(r: np.ndarray, omega: np.ndarray) -> np.ndarray:
    """Pack (R, omega) into the fixed 12-entry flat layout."""
    return np.concatenate([np.asarray(r, dtype=float).ravel(), np.asarray(omega, dtype=float)])


def unflatten_rigid(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of flatten_rigid."""
    x = np.asarray(x, dtype=float)
    return x[:9].reshape(3, 3), x[9:12]


@dataclass
class ZState:
    """Transformed linear coordinates: symmetric block, skew block (as a
    vector), and the velocity variable (omega at an equilibrium, the
    velocity error along a trajectory)."""

    z_s: np.ndarray
    z_k_vee: np.ndarray
    omega_var: np.ndarray

    def __post_init__(self) -> None:
        self.z_s = np.asarray(self.z_s, dtype=float).reshape(3, 3)
        self.z_k_vee = np.asarray(self.z_k_vee, dtype=float).reshape(3)
        self.omega_var = np.asarray(self.omega_var, dtype=float).reshape(3)
        if np.linalg.norm(self.z_s - self.z_s.T) > 1e-12:
            raise ValueError("z_s must be symmetric")


@dataclass(frozen=True)
class LinearizedOperator:
    """First-order model of the modified field at a base point (R0, Omega0, u0).

    apply is linear in (delta_r, delta_omega, delta_u) and returns the
    deviation derivatives (delta_r_dot, delta_omega_dot).
    """

    r0: np.ndarray
    omega0: np.ndarray
    u0: np.ndarray
    k_e: float

    def apply(
        self, delta_r: np.ndarray, delta_omega: np.ndarray, delta_u: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray]:
        delta_r = np.asarray(delta_r, dtype=float)
        delta_omega = np.asarray(delta_omega, dtype=float)
        sym_part = 0.5 * (self.r0.T @ delta_r + delta_r.T @ self.r0)
        dr_dot = (
            delta_r @ hat(self.omega0)
            + self.r0 @ hat(delta_omega)
            - 2.0 * self.k_e * (self.r0 @ sym_part)
        )
        return dr_dot, np.asarray(delta_u, dtype=float)

    def state_matrix(self) -> np.ndarray:
        """Dense 12x12 matrix of apply with delta_u = 0, in the flat layout."""
        a = np.empty((12, 12))
        zero_u = np.zeros(3)
        for j in range(12):
            basis = np.zeros(12)
            basis[j] = 1.0
            dr, domega = unflatten_rigid(basis)
            out_r, out_omega = self.apply(dr, domega, zero_u)
            a[:, j] = flatten_rigid(out_r, out_omega)
        return a

    def input_matrix(self) -> np.ndarray:
        """Dense 12x3 matrix of apply in delta_u alone."""
        b = np.empty((12, 3))
        zero_r = np.zeros((3, 3))
        zero_omega = np.zeros(3)
        for j in range(3):
            e = np.zeros(3)
            e[j] = 1.0
            out_r, out_omega = self.apply(zero_r, zero_omega, e)
            b[:, j] = flatten_rigid(out_r, out_omega)
        return b


def linearize_at_equilibrium(r0: np.ndarray, params: AmbientParams) -> LinearizedOperator:
    """Linear model at the rest point (r0, 0) with zero input."""
    r0 = np.asarray(r0, dtype=float).reshape(3, 3)
    check = rotation_check(r0)
    if not check.is_rotation:
        raise ValueError(f"equilibrium orientation must be a rotation (defect {check.defect:.3e})")
    return LinearizedOperator(r0=r0, omega0=np.zeros(3), u0=np.zeros(3), k_e=params.k_e)


def linearize_along_trajectory(
    ref: ReferenceTrajectory, t: float, params: AmbientParams
) -> LinearizedOperator:
    """Linear model at the reference point (R0(t), Omega0(t)) with input u0(t)."""
    if not ref.contains(t):
        raise ValueError(f"t={t} outside reference horizon {ref.horizon}")
    return LinearizedOperator(
        r0=np.asarray(ref.r0(t), dtype=float),
        omega0=np.asarray(ref.omega0(t), dtype=float),
        u0=np.asarray(ref.u0(t), dtype=float),
        k_e=params.k_e,
    )


def z_transform(r: np.ndarray, r0: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Attitude deviation of r from r0 in decoupled coordinates.

    The skew block is computed as Skew(R0^T R), never via the on-manifold
    subtraction R - R0; the symmetric block is Sym(R0^T R - I).
    """
    r = np.asarray(r, dtype=float)
    r0 = np.asarray(r0, dtype=float)
    check = rotation_check(r0)
    if not check.is_rotation:
        raise ValueError(f"base orientation must be a rotation (defect {check.defect:.3e})")
    z = r0.T @ r
    sym_part, skew_part = sym_skew_split(z)
    return sym_part - np.eye(3), vee(skew_part)


def z_dynamics(
    z: ZState, u_var: np.ndarray, omega0: np.ndarray, params: AmbientParams
) -> ZState:
    """Time derivative of the transformed linear dynamics.

    The symmetric block decays autonomously (its commutator drive is
    norm-preserving); the skew block and velocity variable form a
    controllable double-integrator chain.
    """
    omega0 = np.asarray(omega0, dtype=float)
    omega0_hat = hat(omega0)
    zs_dot = (z.z_s @ omega0_hat - omega0_hat @ z.z_s) - 2.0 * params.k_e * z.z_s
    zk_dot = np.cross(z.z_k_vee, omega0) + z.omega_var
    return ZState(z_s=zs_dot, z_k_vee=zk_dot, omega_var=np.asarray(u_var, dtype=float))


def finite_difference_jacobian(
    field: Callable[[np.ndarray], np.ndarray],
    point: np.ndarray,
    h: float = DEFAULT_FD_STEP,
) -> np.ndarray:
    """Central-difference Jacobian of a flat vector field at a flat point."""
    if h <= 0:
        raise ValueError("h must be positive")
    point = np.asarray(point, dtype=float)
    f0 = np.asarray(field(point), dtype=float)
    jac = np.empty((f0.size, point.size))
    for j in range(point.size):
        step = np.zeros_like(point)
        step[j] = h
        jac[:, j] = (
            np.asarray(field(point + step), dtype=float)
            - np.asarray(field(point - step), dtype=float)
        ) / (2.0 * h)
    return jac
