"""A module containing camera, rigid-transform and 2D warp helper functions."""

import logging
import warnings
from typing import Tuple

import numpy as np
from scipy.spatial.transform import Rotation

from facepnp.config import config
from facepnp.core.domain.errors import DegenerateLandmarks, NonPositiveDepth
from facepnp.core.domain.geometry import (
    CameraIntrinsics,
    EulerAngles,
    FloatArray,
    RigidPose,
    Similarity2D,
    coerce_points,
)

logger = logging.getLogger(__name__)

EULER_SEQUENCE = "YXZ"
GIMBAL_TOLERANCE_DEG = 1e-6


def project_camera_points(points_cam: FloatArray, cam: CameraIntrinsics) -> FloatArray:
    """Project camera-frame points with the pinhole model.

    Args:
        points_cam (FloatArray): (N, 3) points in the camera frame (mm).
        cam (CameraIntrinsics): The camera.

    Raises:
        NonPositiveDepth: If a point has z <= 0.

    Returns:
        FloatArray: (N, 2) pixel coordinates.
    """
    z = points_cam[:, 2]
    bad = np.flatnonzero(z <= 0)
    if bad.size:
        raise NonPositiveDepth(int(bad[0]))
    return np.column_stack([
        cam.fx * points_cam[:, 0] / z + cam.cx,
        cam.fy * points_cam[:, 1] / z + cam.cy,
    ])


def project(points: FloatArray, pose: RigidPose, cam: CameraIntrinsics) -> FloatArray:
    """Project canonical points through a pose and a camera.

    Args:
        points (FloatArray): (N, 3) canonical points (mm).
        pose (RigidPose): Canonical-to-camera pose.
        cam (CameraIntrinsics): The camera.

    Raises:
        NonPositiveDepth: If a transformed point has z <= 0.

    Returns:
        FloatArray: (N, 2) pixel coordinates u = fx x/z + cx, v = fy y/z + cy.
    """
    return project_camera_points(pose.transform(coerce_points(points, 3)), cam)


def _wrap_degrees(angle: float) -> float:
    wrapped = (angle + 180.0) % 360.0 - 180.0
    return -180.0 if wrapped >= 180.0 else wrapped


def pose_to_euler(pose: RigidPose) -> EulerAngles:
    """Decompose the rotation of a pose into intrinsic yaw-pitch-roll degrees.

    R = Ry(yaw) Rx(pitch) Rz(roll). Near |pitch| = 90 the split between yaw
    and roll is arbitrary and the result carries `gimbal_lock=True`.
    """
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        yaw, pitch, roll = pose.as_rotation().as_euler(EULER_SEQUENCE, degrees=True)
    pitch = float(np.clip(pitch, -90.0, 90.0))
    gimbal_lock = abs(abs(pitch) - 90.0) <= GIMBAL_TOLERANCE_DEG
    if gimbal_lock:
        logger.warning("Gimbal lock in Euler decomposition (pitch=%.9f)", pitch)
    return EulerAngles(
        yaw=_wrap_degrees(float(yaw)),
        pitch=pitch,
        roll=_wrap_degrees(float(roll)),
        gimbal_lock=gimbal_lock,
    )


def euler_to_pose(angles: EulerAngles, translation: object = (0.0, 0.0, 0.0)) -> RigidPose:
    """Build a pose from intrinsic yaw-pitch-roll degrees and a translation."""
    rotation = Rotation.from_euler(EULER_SEQUENCE, angles.as_array(), degrees=True)
    return RigidPose.from_rotation(rotation, translation)


def compose(a: RigidPose, b: RigidPose) -> RigidPose:
    """Return the pose applying `b` first and then `a`."""
    rotation = a.as_rotation() * b.as_rotation()
    return RigidPose.from_rotation(rotation, a.as_rotation().apply(b.t) + a.t)


def invert(a: RigidPose) -> RigidPose:
    """Return the inverse pose."""
    inverse = a.as_rotation().inv()
    return RigidPose.from_rotation(inverse, -inverse.apply(a.t))


def apply_warp(warp: Similarity2D, points: FloatArray) -> FloatArray:
    """Map (N, 2) points through a similarity warp."""
    pts = coerce_points(points, 2)
    return pts @ warp.linear().T + np.array([warp.tx, warp.ty])


def unwarp(warp: Similarity2D, points: FloatArray) -> FloatArray:
    """Map (N, 2) warped points back through the inverse warp."""
    pts = coerce_points(points, 2)
    c, s = np.cos(warp.angle), np.sin(warp.angle)
    rotation = np.array([[c, -s], [s, c]])
    return (pts - np.array([warp.tx, warp.ty])) @ rotation / warp.scale


def estimate_frontalize_warp(
    landmarks: FloatArray,
    target_size: float,
    eye_indices: Tuple[int, int] = (config.EYE_LEFT_INDEX, config.EYE_RIGHT_INDEX),
    fill: float = config.CROP_FILL,
) -> Similarity2D:
    """Estimate the warp making the face upright and cropping it.

    The warp rotates the inter-ocular segment to horizontal (roll = 0) and
    scales the rotated landmark bounding box to `fill * target_size`,
    centered in a square crop of side `target_size`.

    Args:
        landmarks (FloatArray): (N, 2) landmarks in the original frame.
        target_size (float): Side of the square crop in pixels.
        eye_indices (Tuple[int, int]): Left and right eye-corner indices.
        fill (float): Fraction of the crop covered by the bounding box.

    Raises:
        DegenerateLandmarks: If the eye pair is missing or coincides, or the
            landmarks have zero extent.

    Returns:
        Similarity2D: The frontalization warp.
    """
    pts = coerce_points(landmarks, 2, "landmarks")
    left, right = eye_indices
    if not (0 <= left < len(pts) and 0 <= right < len(pts)):
        raise DegenerateLandmarks(f"Eye indices {eye_indices} outside {len(pts)} landmarks")
    eye_line = pts[right] - pts[left]
    if np.linalg.norm(eye_line) < 1e-9:
        raise DegenerateLandmarks("Eye-corner landmarks coincide")

    angle = -float(np.arctan2(eye_line[1], eye_line[0]))
    upright = Similarity2D(angle=angle)
    rotated = apply_warp(upright, pts)
    low, high = rotated.min(axis=0), rotated.max(axis=0)
    extent = float(np.max(high - low))
    if extent < 1e-12:
        raise DegenerateLandmarks("Landmarks have zero extent")

    scale = fill * target_size / extent
    center = 0.5 * (low + high)
    shift = 0.5 * target_size - scale * center
    return Similarity2D(scale=scale, angle=angle, tx=float(shift[0]), ty=float(shift[1]))
