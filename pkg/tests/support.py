import numpy as np

from ambientctl import exp_so3


def random_rotation(rng, max_angle=np.pi):
    """Rotation by a random axis and an angle in (0, max_angle]."""
    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    return exp_so3(rng.uniform(0.0, max_angle) * axis)
