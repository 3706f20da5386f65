"""The control laws and their gain-validity gates.

Six variants: two stabilizers toward a fixed orientation (PD, PID on the
skew-block error) and four trackers along a moving reference (full
feedforward PD, full feedforward PID, plain PD, and PD with a scaled
gyroscopic correction). Gains are validated once at construction; the
per-step evaluations are validation-free.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .so3 import cross

# Strict-negativity margin on the spectral abscissa.
TOL_HURWITZ = 1e-9


class Variant(Enum):
    PD = "PD"
    PID = "PID"
    TRACK_FULL = "TRACK_FULL"
    TRACK_PID = "TRACK_PID"
    TRACK_PD = "TRACK_PD"
    TRACK_PD_EPS = "TRACK_PD_EPS"


class GainValidationError(ValueError):
    """Raised when a gain set fails its variant's validity gate."""


@dataclass(frozen=True)
class HurwitzReport:
    """Eigenvalue verdict: is_hurwitz is None when the eigensolver failed."""

    is_hurwitz: bool | None
    spectral_abscissa: float
    eigenvalues: np.ndarray


def check_hurwitz_matrix(kp: np.ndarray, kd: np.ndarray) -> HurwitzReport:
    """Stability gate for the PD closed loop.

    Builds the 6x6 block matrix [[0, I], [-K_P, -K_D]] and reports its
    spectral abscissa; Hurwitz means every eigenvalue real part is below
    -TOL_HURWITZ.
    """
    kp = np.asarray(kp, dtype=float).reshape(3, 3)
    kd = np.asarray(kd, dtype=float).reshape(3, 3)
    a = np.zeros((6, 6))
    a[:3, 3:] = np.eye(3)
    a[3:, :3] = -kp
    a[3:, 3:] = -kd
    return _hurwitz_report(a)


def check_hurwitz_poly(kp: np.ndarray, kd: np.ndarray, ki: np.ndarray) -> HurwitzReport:
    """Stability gate for the PID closed loop.

    The 9x9 block companion matrix [[0,I,0],[0,0,I],[-K_I,-K_P,-K_D]] has
    characteristic polynomial det(L^3 I + L^2 K_D + L K_P + K_I), so its
    eigenvalues are exactly the closed-loop roots.
    """
    kp = np.asarray(kp, dtype=float).reshape(3, 3)
    kd = np.asarray(kd, dtype=float).reshape(3, 3)
    ki = np.asarray(ki, dtype=float).reshape(3, 3)
    a = np.zeros((9, 9))
    a[:3, 3:6] = np.eye(3)
    a[3:6, 6:] = np.eye(3)
    a[6:, :3] = -ki
    a[6:, 3:6] = -kp
    a[6:, 6:] = -kd
    return _hurwitz_report(a)


def _hurwitz_report(a: np.ndarray) -> HurwitzReport:
    try:
        eigenvalues = np.linalg.eigvals(a)
    except np.linalg.LinAlgError:
        nan_eigs = np.full(a.shape[0], np.nan, dtype=complex)
        return HurwitzReport(is_hurwitz=None, spectral_abscissa=float("nan"), eigenvalues=nan_eigs)
    abscissa = float(eigenvalues.real.max())
    return HurwitzReport(
        is_hurwitz=bool(abscissa < -TOL_HURWITZ),
        spectral_abscissa=abscissa,
        eigenvalues=eigenvalues,
    )


def epsilon_bound(kp_scalar: float, kd: np.ndarray) -> float:
    """Admissible upper bound for the gyroscopic-correction weight.

    Requires kp_scalar > 0 and a symmetric positive definite kd; the bound
    is min(sqrt(k_P), 4 k_P lmin(K_D) / (4 k_P + lmax(K_D)^2)) and is
    always positive.
    """
    if kp_scalar <= 0:
        raise ValueError("kp_scalar must be positive")
    kd = np.asarray(kd, dtype=float).reshape(3, 3)
    if np.linalg.norm(kd - kd.T) > 1e-9 * max(1.0, float(np.linalg.norm(kd))):
        raise ValueError("kd must be symmetric")
    eigs = np.linalg.eigvalsh(kd)
    if eigs.min() <= 0:
        raise ValueError("kd must be positive definite")
    lam_min, lam_max = float(eigs.min()), float(eigs.max())
    return min(np.sqrt(kp_scalar), 4.0 * kp_scalar * lam_min / (4.0 * kp_scalar + lam_max ** 2))


_MATRIX_GATE = {Variant.PD, Variant.TRACK_FULL}
_POLY_GATE = {Variant.PID, Variant.TRACK_PID}
_SCALAR_GATE = {Variant.TRACK_PD, Variant.TRACK_PD_EPS}


@dataclass(frozen=True)
class GainSet:
    """Validated controller gains for one variant.

    Construction runs the variant's gate and raises GainValidationError on
    failure, so a GainSet instance is usable without per-call checks.
    """

    variant: Variant
    kp_mat: np.ndarray | None = None
    kd_mat: np.ndarray | None = None
    ki_mat: np.ndarray | None = None
    kp_scalar: float | None = None
    eps: float | None = None

    def __post_init__(self) -> None:
        for name in ("kp_mat", "kd_mat", "ki_mat"):
            value = getattr(self, name)
            if value is not None:
                object.__setattr__(self, name, np.asarray(value, dtype=float).reshape(3, 3))
        if self.variant in _MATRIX_GATE:
            self._require("kp_mat", "kd_mat")
            report = check_hurwitz_matrix(self.kp_mat, self.kd_mat)
            if report.is_hurwitz is not True:
                raise GainValidationError(
                    f"{self.variant.value}: PD gain matrix is not Hurwitz "
                    f"(spectral abscissa {report.spectral_abscissa:.6g})"
                )
        elif self.variant in _POLY_GATE:
            self._require("kp_mat", "kd_mat", "ki_mat")
            report = check_hurwitz_poly(self.kp_mat, self.kd_mat, self.ki_mat)
            if report.is_hurwitz is not True:
                raise GainValidationError(
                    f"{self.variant.value}: PID gain polynomial is not Hurwitz "
                    f"(spectral abscissa {report.spectral_abscissa:.6g})"
                )
        elif self.variant in _SCALAR_GATE:
            self._require("kp_scalar", "kd_mat")
            if self.kp_scalar <= 0:
                raise GainValidationError(f"{self.variant.value}: kp_scalar must be positive")
            try:
                bound = epsilon_bound(self.kp_scalar, self.kd_mat)
            except ValueError as exc:
                raise GainValidationError(f"{self.variant.value}: {exc}") from exc
            if self.variant is Variant.TRACK_PD_EPS:
                self._require("eps")
                if not 0 < self.eps < bound:
                    raise GainValidationError(
                        f"TRACK_PD_EPS: eps={self.eps} outside (0, {bound:.12g})"
                    )
        else:  # pragma: no cover - enum is exhaustive
            raise GainValidationError(f"unknown variant {self.variant}")

    def _require(self, *names: str) -> None:
        for name in names:
            if getattr(self, name) is None:
                raise GainValidationError(f"{self.variant.value}: missing gain field {name}")

    @classmethod
    def pd(cls, kp: np.ndarray, kd: np.ndarray) -> "GainSet":
        return cls(variant=Variant.PD, kp_mat=kp, kd_mat=kd)

    @classmethod
    def pid(cls, kp: np.ndarray, kd: np.ndarray, ki: np.ndarray) -> "GainSet":
        return cls(variant=Variant.PID, kp_mat=kp, kd_mat=kd, ki_mat=ki)

    @classmethod
    def track_full(cls, kp: np.ndarray, kd: np.ndarray) -> "GainSet":
        return cls(variant=Variant.TRACK_FULL, kp_mat=kp, kd_mat=kd)

    @classmethod
    def track_pid(cls, kp: np.ndarray, kd: np.ndarray, ki: np.ndarray) -> "GainSet":
        return cls(variant=Variant.TRACK_PID, kp_mat=kp, kd_mat=kd, ki_mat=ki)

    @classmethod
    def track_pd(cls, kp_scalar: float, kd: np.ndarray) -> "GainSet":
        return cls(variant=Variant.TRACK_PD, kp_scalar=kp_scalar, kd_mat=kd)

    @classmethod
    def track_pd_eps(cls, kp_scalar: float, kd: np.ndarray, eps: float) -> "GainSet":
        return cls(variant=Variant.TRACK_PD_EPS, kp_scalar=kp_scalar, kd_mat=kd, eps=eps)


@dataclass
class ControllerState:
    """Integral accumulator for the PID variants.

    The accumulator is advanced by the caller's integrator as extra state
    components (dynamic feedback), not by the controller itself.
    """

    integral_acc: np.ndarray = field(default_factory=lambda: np.zeros(3))
    t_last: float = 0.0

    def __post_init__(self) -> None:
        self.integral_acc = np.asarray(self.integral_acc, dtype=float).reshape(3)


def pd_stabilizer(gains: GainSet, z_k_vee: np.ndarray, omega: np.ndarray) -> np.ndarray:
    """PD law toward a fixed orientation: u = -K_P z_k - K_D omega."""
    if gains.variant is not Variant.PD:
        raise ValueError(f"pd_stabilizer needs a PD gain set, got {gains.variant.value}")
    return -(gains.kp_mat @ np.asarray(z_k_vee, dtype=float)) - gains.kd_mat @ np.asarray(
        omega, dtype=float
    )


def pid_stabilizer(
    gains: GainSet,
    state: ControllerState,
    z_k_vee: np.ndarray,
    omega: np.ndarray,
    t: float,
) -> tuple[np.ndarray, ControllerState]:
    """PID law toward a fixed orientation; the integral term comes from state."""
    if gains.variant is not Variant.PID:
        raise ValueError(f"pid_stabilizer needs a PID gain set, got {gains.variant.value}")
    u = (
        -(gains.kp_mat @ np.asarray(z_k_vee, dtype=float))
        - gains.kd_mat @ np.asarray(omega, dtype=float)
        - gains.ki_mat @ state.integral_acc
    )
    return u, ControllerState(integral_acc=state.integral_acc, t_last=t)


def tracking_control(
    gains: GainSet,
    z_k_vee: np.ndarray,
    delta_omega: np.ndarray,
    omega0: np.ndarray,
    u0: np.ndarray,
    state: ControllerState | None = None,
    t: float = 0.0,
) -> np.ndarray:
    """Tracking law u = u0 + delta_u for the selected tracker variant.

    z_k_vee and delta_omega are the attitude and velocity errors against the
    reference; omega0 and u0 are the reference velocity and acceleration.
    """
    z = np.asarray(z_k_vee, dtype=float)
    d_omega = np.asarray(delta_omega, dtype=float)
    omega0 = np.asarray(omega0, dtype=float)
    u0 = np.asarray(u0, dtype=float)
    variant = gains.variant
    if variant in (Variant.TRACK_FULL, Variant.TRACK_PID):
        zk_dot = cross(z, omega0) + d_omega
        delta_u = (
            -(gains.kp_mat @ z)
            - gains.kd_mat @ zk_dot
            - cross(zk_dot, omega0)
            - cross(z, u0)
        )
        if variant is Variant.TRACK_PID:
            if state is None:
                raise ValueError("TRACK_PID needs a ControllerState for the integral term")
            delta_u = delta_u - gains.ki_mat @ state.integral_acc
    elif variant is Variant.TRACK_PD:
        delta_u = -gains.kp_scalar * z - gains.kd_mat @ d_omega
    elif variant is Variant.TRACK_PD_EPS:
        delta_u = -gains.kp_scalar * z - gains.kd_mat @ d_omega - gains.eps * cross(z, omega0)
    else:
        raise ValueError(f"tracking_control needs a tracker gain set, got {variant.value}")
    return u0 + delta_u
