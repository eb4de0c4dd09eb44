"""A module containing derivatives of the pinhole projection in the pose chart."""

from typing import Tuple

import numpy as np

from facepnp.core.domain.geometry import CameraIntrinsics, FloatArray
from facepnp.infrastructure.utils.rotations import GENERATORS, SECOND_GENERATORS


def projection_jacobian(points_cam: FloatArray, cam: CameraIntrinsics) -> FloatArray:
    """Return d(u, v)/d(x, y, z) for every camera-frame point, shape (N, 2, 3)."""
    x, y, z = points_cam.T
    inv_z = 1.0 / z
    jac = np.zeros((len(points_cam), 2, 3))
    jac[:, 0, 0] = cam.fx * inv_z
    jac[:, 0, 2] = -cam.fx * x * inv_z ** 2
    jac[:, 1, 1] = cam.fy * inv_z
    jac[:, 1, 2] = -cam.fy * y * inv_z ** 2
    return jac


def projection_hessian(points_cam: FloatArray, cam: CameraIntrinsics) -> FloatArray:
    """Return d^2(u, v)/dp^2 for every camera-frame point, shape (N, 2, 3, 3)."""
    x, y, z = points_cam.T
    inv_z2 = 1.0 / z ** 2
    inv_z3 = 1.0 / z ** 3
    hess = np.zeros((len(points_cam), 2, 3, 3))
    hess[:, 0, 0, 2] = hess[:, 0, 2, 0] = -cam.fx * inv_z2
    hess[:, 0, 2, 2] = 2.0 * cam.fx * x * inv_z3
    hess[:, 1, 1, 2] = hess[:, 1, 2, 1] = -cam.fy * inv_z2
    hess[:, 1, 2, 2] = 2.0 * cam.fy * y * inv_z3
    return hess


def point_chart_jacobian(rotated: FloatArray) -> FloatArray:
    """Return dp/dtheta at theta = 0 for p = exp([omega]x) q + t + tau, shape (N, 3, 6).

    Args:
        rotated (FloatArray): (N, 3) rotated canonical points q = R X.
    """
    jac = np.zeros((len(rotated), 3, 6))
    jac[:, :, :3] = np.einsum("aij,nj->nia", GENERATORS, rotated)
    jac[:, :, 3:] = np.eye(3)
    return jac


def point_chart_hessian(rotated: FloatArray) -> FloatArray:
    """Return d^2p/dtheta^2 at theta = 0, shape (N, 3, 6, 6); only the omega block is non-zero."""
    hess = np.zeros((len(rotated), 3, 6, 6))
    hess[:, :, :3, :3] = np.einsum("abij,nj->niab", SECOND_GENERATORS, rotated)
    return hess


def residual_chart_derivatives(
    points_cam: FloatArray,
    rotated: FloatArray,
    cam: CameraIntrinsics,
) -> Tuple[FloatArray, FloatArray]:
    """Return first and second chart derivatives of the projection.

    Args:
        points_cam (FloatArray): (N, 3) camera-frame points p = R X + t.
        rotated (FloatArray): (N, 3) rotated points q = R X.
        cam (CameraIntrinsics): The camera.

    Returns:
        Tuple[FloatArray, FloatArray]: d pi/d theta of shape (N, 2, 6) and
            d^2 pi/d theta^2 of shape (N, 2, 6, 6).
    """
    d_pi = projection_jacobian(points_cam, cam)
    d2_pi = projection_hessian(points_cam, cam)
    d_p = point_chart_jacobian(rotated)
    d2_p = point_chart_hessian(rotated)
    first = np.einsum("nck,nka->nca", d_pi, d_p)
    second = (
        np.einsum("nckl,nka,nlb->ncab", d2_pi, d_p, d_p)
        + np.einsum("nck,nkab->ncab", d_pi, d2_p)
    )
    return first, second
