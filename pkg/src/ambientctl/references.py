"""Ready-made reference trajectories for stabilization and tracking runs."""

from __future__ import annotations

import numpy as np

from .dynamics import ReferenceTrajectory
from .so3 import exp_so3, rotation_check

_ZERO3 = np.zeros(3)


def constant_reference(
    r0: np.ndarray, horizon: tuple[float, float] = (0.0, np.inf)
) -> ReferenceTrajectory:
    """Hold a fixed orientation with zero angular velocity (an equilibrium)."""
    r0 = np.asarray(r0, dtype=float).reshape(3, 3)
    check = rotation_check(r0)
    if not check.is_rotation:
        raise ValueError(f"constant reference must be a rotation (defect {check.defect:.3e})")
    return ReferenceTrajectory(
        r0=lambda t: r0,
        omega0=lambda t: _ZERO3,
        u0=lambda t: _ZERO3,
        horizon=horizon,
    )


def spin_reference(
    rate: np.ndarray, horizon: tuple[float, float] = (0.0, np.inf)
) -> ReferenceTrajectory:
    """Steady rotation about a fixed body axis at constant rate."""
    rate = np.asarray(rate, dtype=float).reshape(3)
    return ReferenceTrajectory(
        r0=lambda t: exp_so3(t * rate),
        omega0=lambda t: rate,
        u0=lambda t: _ZERO3,
        horizon=horizon,
    )


def builtin_tracking_reference(
    horizon: tuple[float, float] = (0.0, 20.0)
) -> ReferenceTrajectory:
    """The bundled trigonometric tracking demo (config name "paper_fig2").

    A closed-form rotation curve with its angular velocity and acceleration;
    the three parts satisfy the reference-defining relations identically.
    """

    def r0(t: float) -> np.ndarray:
        c, s = np.cos(t), np.sin(t)
        return np.array(
            [
                [c * c, -s, c * s],
                [s * s + c * c * s, c * c, c * s * s - c * s],
                [c * s * s - c * s, c * s, c * c + s ** 3],
            ]
        )

    def omega0(t: float) -> np.ndarray:
        c, s = np.cos(t), np.sin(t)
        return np.array([c * c - s, 1.0 - s, c * (1.0 + s)])

    def u0(t: float) -> np.ndarray:
        c, s = np.cos(t), np.sin(t)
        return np.array([-2.0 * c * s - c, -c, -s * (1.0 + s) + c * c])

    return ReferenceTrajectory(r0=r0, omega0=omega0, u0=u0, horizon=horizon)
