"""Exact small-matrix algebra for rotations embedded in the 3x3 matrix space.

Rotation matrices, skew matrices and their hat/vee bridges to 3-vectors are
kept as plain float64 numpy arrays (row-major). The Frobenius inner product
is the only inner product used anywhere in this package.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Below this angle the Rodrigues coefficients sin(t)/t and (1-cos t)/t^2
# lose digits to cancellation; switch to their series.
_SMALL_ANGLE = 1e-4

# A matrix handed to vee() may carry roundoff, but a symmetric part larger
# than this means the caller passed something that was never skew.
VEE_SYM_TOL = 1e-9


def vec3(x: float, y: float, z: float) -> np.ndarray:
    """Build a finite float 3-vector."""
    v = np.array([x, y, z], dtype=float)
    if not np.isfinite(v).all():
        raise ValueError("vec3 entries must be finite")
    return v


def mat3(entries) -> np.ndarray:
    """Build a finite float 3x3 matrix from row-major nested or flat data."""
    a = np.asarray(entries, dtype=float).reshape(3, 3)
    if not np.isfinite(a).all():
        raise ValueError("mat3 entries must be finite")
    return a


def cross(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Cross product of two 3-vectors; np.cross costs too much per call in
    integration loops."""
    return np.array(
        [
            u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0],
        ]
    )


def hat(v: np.ndarray) -> np.ndarray:
    """Skew-symmetric matrix of v, so that hat(u) @ w == cross(u, w)."""
    v = np.asarray(v, dtype=float)
    return np.array(
        [
            [0.0, -v[2], v[1]],
            [v[2], 0.0, -v[0]],
            [-v[1], v[0], 0.0],
        ]
    )


def vee(a: np.ndarray, tol: float = VEE_SYM_TOL) -> np.ndarray:
    """Inverse of hat.

    Rejects input whose symmetric part has Frobenius norm above tol: a
    non-skew argument signals an upstream bug, and silently projecting it
    away would hide that.
    """
    a = np.asarray(a, dtype=float)
    sym_norm = float(np.linalg.norm(a + a.T)) / 2.0
    if sym_norm > tol:
        raise ValueError(
            f"vee: input is not skew-symmetric (symmetric part norm {sym_norm:.3e} > {tol:.1e})"
        )
    return np.array([a[2, 1], a[0, 2], a[1, 0]])


def sym_skew_split(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split a into (symmetric, skew) parts; the parts sum back to a exactly."""
    a = np.asarray(a, dtype=float)
    s = 0.5 * (a + a.T)
    return s, a - s


def frobenius_inner(a: np.ndarray, b: np.ndarray) -> float:
    """Entrywise inner product <A, B> = tr(A^T B)."""
    return float(np.sum(np.asarray(a, dtype=float) * np.asarray(b, dtype=float)))


def exp_so3(v: np.ndarray) -> np.ndarray:
    """Rodrigues closed form of the matrix exponential of hat(v)."""
    v = np.asarray(v, dtype=float)
    theta2 = float(v @ v)
    theta = float(np.sqrt(theta2))
    k = hat(v)
    if theta < _SMALL_ANGLE:
        a = 1.0 - theta2 / 6.0 * (1.0 - theta2 / 20.0)
        b = 0.5 * (1.0 - theta2 / 12.0 * (1.0 - theta2 / 30.0))
    else:
        a = np.sin(theta) / theta
        b = (1.0 - np.cos(theta)) / theta2
    return np.eye(3) + a * k + b * (k @ k)


@dataclass(frozen=True)
class RotationCheck:
    """Distance-to-rotation diagnostic: defect = |R^T R - I| and sign of det R."""

    defect: float
    det_sign: float
    tol: float

    @property
    def is_rotation(self) -> bool:
        return self.defect <= self.tol and self.det_sign > 0


def rotation_check(r: np.ndarray, tol: float = 1e-8) -> RotationCheck:
    """Measure how far r is from being a rotation matrix."""
    if tol < 0:
        raise ValueError("rotation_check: tol must be nonnegative")
    r = np.asarray(r, dtype=float)
    defect = float(np.linalg.norm(r.T @ r - np.eye(3)))
    det = float(np.linalg.det(r))
    return RotationCheck(defect=defect, det_sign=float(np.sign(det)), tol=tol)
