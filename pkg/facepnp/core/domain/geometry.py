"""Module containing camera, pose and warp domain models.

Conventions:
    * camera frame: x right, y down, z forward (the camera looks down +Z);
    * rotations are unit quaternions stored scalar-first (w, x, y, z) with
      w >= 0;
    * Euler angles are intrinsic yaw about Y, then pitch about X, then roll
      about Z, in degrees. MAE_r values depend on this choice;
    * translations are millimetres, image coordinates are pixels.
"""

from typing import Tuple

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy.spatial.transform import Rotation

FloatArray = NDArray[np.float64]


def coerce_points(values: object, dim: int, name: str = "points") -> FloatArray:
    """Convert an array-like into a read-only (N, dim) float64 point array.

    Args:
        values (object): Anything `numpy.asarray` accepts.
        dim (int): Expected point dimension (2 or 3).
        name (str): Field name used in error messages.

    Raises:
        ValueError: If the shape is wrong or a coordinate is not finite.

    Returns:
        FloatArray: The validated copy.
    """
    array = np.array(values, dtype=np.float64)
    if array.ndim != 2 or array.shape[1] != dim:
        raise ValueError(f"{name} must have shape (N, {dim}), got {array.shape}")
    if not np.all(np.isfinite(array)):
        raise ValueError(f"{name} contains non-finite coordinates")
    array.flags.writeable = False
    return array


class RigidPose(BaseModel):
    """Model representing a 6DoF pose mapping canonical points into the camera frame.

    Attributes:
        rotation: Unit quaternion (w, x, y, z), canonicalized to w >= 0.
        translation: Translation in millimetres.
    """
    rotation: Tuple[float, float, float, float] = (1.0, 0.0, 0.0, 0.0)
    translation: Tuple[float, float, float] = (0.0, 0.0, 0.0)

    model_config = ConfigDict(frozen=True)

    @field_validator("rotation")
    @classmethod
    def normalize_rotation(
        cls,
        v: Tuple[float, float, float, float],
    ) -> Tuple[float, float, float, float]:
        """Normalize the quaternion and fix its sign.

        Raises:
            ValueError: If the quaternion is zero or not finite.
        """
        quat = np.asarray(v, dtype=np.float64)
        norm = np.linalg.norm(quat)
        if not np.isfinite(norm) or norm < 1e-12:
            raise ValueError("Rotation quaternion must be finite and non-zero")
        # already-unit quaternions are kept bit-exact
        if abs(norm - 1.0) > 1e-15:
            quat = quat / norm
        if quat[0] < 0.0:
            quat = -quat
        return tuple(float(q) for q in quat)

    @field_validator("translation")
    @classmethod
    def validate_translation(cls, v: Tuple[float, float, float]) -> Tuple[float, float, float]:
        """Reject non-finite translations."""
        if not all(np.isfinite(v)):
            raise ValueError("Translation must be finite")
        return tuple(float(c) for c in v)

    @classmethod
    def identity(cls) -> "RigidPose":
        """Return the identity pose."""
        return cls()

    @classmethod
    def from_rotation(cls, rotation: Rotation, translation: object) -> "RigidPose":
        """Build a pose from a scipy rotation and a translation vector.

        Args:
            rotation (Rotation): The rotation part.
            translation (object): Any 3-element array-like (mm).

        Returns:
            RigidPose: The pose.
        """
        x, y, z, w = rotation.as_quat()
        return cls(
            rotation=(w, x, y, z),
            translation=tuple(np.asarray(translation, dtype=np.float64).reshape(3)),
        )

    @classmethod
    def from_matrix(cls, matrix: FloatArray, translation: object) -> "RigidPose":
        """Build a pose from a 3x3 rotation matrix and a translation vector."""
        return cls.from_rotation(Rotation.from_matrix(matrix), translation)

    def as_rotation(self) -> Rotation:
        """Return the rotation part as a scipy rotation."""
        w, x, y, z = self.rotation
        return Rotation.from_quat([x, y, z, w])

    def rotation_matrix(self) -> FloatArray:
        """Return the 3x3 rotation matrix."""
        return self.as_rotation().as_matrix()

    @property
    def t(self) -> FloatArray:
        """The translation as a numpy vector."""
        return np.asarray(self.translation, dtype=np.float64)

    def transform(self, points: FloatArray) -> FloatArray:
        """Map (N, 3) canonical points into the camera frame."""
        return np.asarray(points, dtype=np.float64) @ self.rotation_matrix().T + self.t


class EulerAngles(BaseModel):
    """Model representing intrinsic Y-X-Z Euler angles in degrees.

    Attributes:
        yaw: Rotation about Y, in [-180, 180).
        pitch: Rotation about X, in [-90, 90].
        roll: Rotation about Z, in [-180, 180).
        gimbal_lock: Set when |pitch| is within 1e-6 degrees of 90.
    """
    yaw: float = Field(0.0, ge=-180.0, lt=180.0)
    pitch: float = Field(0.0, ge=-90.0, le=90.0)
    roll: float = Field(0.0, ge=-180.0, lt=180.0)
    gimbal_lock: bool = False

    model_config = ConfigDict(frozen=True)

    def as_array(self) -> FloatArray:
        """Return (yaw, pitch, roll) as a numpy vector."""
        return np.array([self.yaw, self.pitch, self.roll], dtype=np.float64)


class CameraIntrinsics(BaseModel):
    """Model representing a pinhole camera without distortion.

    Attributes:
        fx, fy: Focal lengths in pixels.
        cx, cy: Principal point in pixels.
        width, height: Image size in pixels.
    """
    fx: float = Field(..., gt=0)
    fy: float = Field(..., gt=0)
    cx: float
    cy: float
    width: int = Field(800, gt=0)
    height: int = Field(800, gt=0)

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def validate_principal_point(self) -> "CameraIntrinsics":
        """Check that the principal point lies inside the image.

        Raises:
            ValueError: If cx or cy is outside the image bounds.
        """
        if not 0 <= self.cx < self.width:
            raise ValueError(f"cx={self.cx} outside [0, {self.width})")
        if not 0 <= self.cy < self.height:
            raise ValueError(f"cy={self.cy} outside [0, {self.height})")
        return self

    def matrix(self) -> FloatArray:
        """Return the 3x3 calibration matrix K."""
        return np.array([
            [self.fx, 0.0, self.cx],
            [0.0, self.fy, self.cy],
            [0.0, 0.0, 1.0],
        ])


class Similarity2D(BaseModel):
    """Model representing the 2D similarity q = scale * R(angle) * p + translation.

    Attributes:
        scale: Positive isotropic scale.
        angle: Rotation angle in radians (counter-clockwise in x-right/y-down
            pixel axes means clockwise on screen).
        tx, ty: Translation in pixels.
    """
    scale: float = Field(1.0, gt=0)
    angle: float = 0.0
    tx: float = 0.0
    ty: float = 0.0

    model_config = ConfigDict(frozen=True)

    @classmethod
    def from_matrix(cls, matrix: FloatArray) -> "Similarity2D":
        """Build a warp from a 2x3 similarity matrix.

        Raises:
            ValueError: If the linear part is not a scaled rotation.
        """
        m = np.asarray(matrix, dtype=np.float64)
        a, b = m[0, 0], m[1, 0]
        if not np.allclose(m[:, :2], [[a, -b], [b, a]], atol=1e-9 * max(1.0, abs(a) + abs(b))):
            raise ValueError("Matrix is not a similarity transform")
        return cls(scale=float(np.hypot(a, b)), angle=float(np.arctan2(b, a)), tx=float(m[0, 2]), ty=float(m[1, 2]))

    def linear(self) -> FloatArray:
        """Return the 2x2 part scale * R(angle)."""
        c, s = np.cos(self.angle), np.sin(self.angle)
        return self.scale * np.array([[c, -s], [s, c]])

    def matrix(self) -> FloatArray:
        """Return the 2x3 warp matrix."""
        return np.hstack([self.linear(), [[self.tx], [self.ty]]])

    def inverse(self) -> "Similarity2D":
        """Return the inverse warp."""
        c, s = np.cos(-self.angle), np.sin(-self.angle)
        inv_scale = 1.0 / self.scale
        tx = -inv_scale * (c * self.tx - s * self.ty)
        ty = -inv_scale * (s * self.tx + c * self.ty)
        return Similarity2D(scale=inv_scale, angle=-self.angle, tx=tx, ty=ty)

    def compose(self, other: "Similarity2D") -> "Similarity2D":
        """Return the warp applying `other` first and then `self`."""
        linear = self.linear()
        shift = linear @ np.array([other.tx, other.ty]) + np.array([self.tx, self.ty])
        return Similarity2D(
            scale=self.scale * other.scale,
            angle=float(np.arctan2(np.sin(self.angle + other.angle), np.cos(self.angle + other.angle))),
            tx=float(shift[0]),
            ty=float(shift[1]),
        )
