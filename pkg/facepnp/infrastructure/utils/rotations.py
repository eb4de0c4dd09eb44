"""A module containing SO(3) helpers for the local pose chart.

The chart perturbs a pose by a left rotation increment:
    R(omega) = exp([omega]x) R,    t(tau) = t + tau.
"""

import numpy as np
from scipy.spatial.transform import Rotation

from facepnp.core.domain.geometry import FloatArray, RigidPose

# so(3) generators E_a = [e_a]x
GENERATORS = np.array([
    [[0.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]],
    [[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [-1.0, 0.0, 0.0]],
    [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]],
])

# symmetrized second derivative of exp([omega]x) at 0: (E_a E_b + E_b E_a) / 2
SECOND_GENERATORS = 0.5 * (
    np.einsum("aij,bjk->abik", GENERATORS, GENERATORS)
    + np.einsum("bij,ajk->abik", GENERATORS, GENERATORS)
)


def skew(vectors: FloatArray) -> FloatArray:
    """Return [v]x for a (3,) vector or a (N, 3) stack of vectors."""
    v = np.asarray(vectors, dtype=np.float64)
    return np.einsum("aij,...a->...ij", GENERATORS, v)


def retract(pose: RigidPose, theta: FloatArray) -> RigidPose:
    """Apply a chart increment theta = (omega, tau) to a pose.

    Args:
        pose (RigidPose): The chart origin.
        theta (FloatArray): 6-vector increment.

    Returns:
        RigidPose: exp([omega]x) R, t + tau.
    """
    theta = np.asarray(theta, dtype=np.float64)
    if not np.any(theta):
        return pose
    rotation = Rotation.from_rotvec(theta[:3]) * pose.as_rotation()
    return RigidPose.from_rotation(rotation, pose.t + theta[3:])


def local_coordinates(origin: RigidPose, pose: RigidPose) -> FloatArray:
    """Return the chart coordinates of `pose` around `origin` (inverse of retract)."""
    relative = pose.as_rotation() * origin.as_rotation().inv()
    return np.concatenate([relative.as_rotvec(), pose.t - origin.t])


def geodesic_angle(a: Rotation, b: Rotation) -> float:
    """Return the angle of the relative rotation a^-1 b in radians."""
    return float((a.inv() * b).magnitude())
