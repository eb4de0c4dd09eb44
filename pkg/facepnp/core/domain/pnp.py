"""Module containing PnP problem, solution and gradient domain models.

The 6-DoF local chart used throughout is theta = (omega, tau): a pose
R, t is perturbed to exp([omega]x) R, t + tau. Gradient rows follow this
order; gradient columns follow the row-major flattening of the inputs.
"""

from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from facepnp.core.domain.geometry import CameraIntrinsics, FloatArray, RigidPose, coerce_points

MIN_CORRESPONDENCES = 6


class PnPProblem(BaseModel):
    """Model representing 2D-3D correspondences under a known camera.

    Attributes:
        points3: (N, 3) canonical points (mm).
        points2: (N, 2) observed pixels.
        sigmas: Optional (N,) per-point pixel uncertainty; unit weights if absent.
        cam: The camera intrinsics.
    """
    points3: np.ndarray
    points2: np.ndarray
    sigmas: Optional[np.ndarray] = None
    cam: CameraIntrinsics

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @field_validator("points3", mode="before")
    @classmethod
    def validate_points3(cls, v: object) -> FloatArray:
        """Coerce the 3D points."""
        return coerce_points(v, 3, "points3")

    @field_validator("points2", mode="before")
    @classmethod
    def validate_points2(cls, v: object) -> FloatArray:
        """Coerce the 2D points."""
        return coerce_points(v, 2, "points2")

    @field_validator("sigmas", mode="before")
    @classmethod
    def validate_sigmas(cls, v: object) -> Optional[FloatArray]:
        """Coerce the uncertainties, which must be positive when present."""
        if v is None:
            return None
        sigmas = np.array(v, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(sigmas)) or np.any(sigmas <= 0):
            raise ValueError("sigmas must be finite and positive")
        sigmas.flags.writeable = False
        return sigmas

    @model_validator(mode="after")
    def validate_lengths(self) -> "PnPProblem":
        """Check that every per-point array has the same length."""
        n = self.points3.shape[0]
        if self.points2.shape[0] != n:
            raise ValueError(f"points3 has {n} points but points2 has {self.points2.shape[0]}")
        if self.sigmas is not None and self.sigmas.shape[0] != n:
            raise ValueError(f"points3 has {n} points but sigmas has {self.sigmas.shape[0]}")
        return self

    @property
    def n_points(self) -> int:
        """Number of correspondences N."""
        return self.points3.shape[0]

    def weights(self) -> FloatArray:
        """Return 1 / sigma_i, or ones when the problem is unweighted."""
        if self.sigmas is None:
            return np.ones(self.n_points)
        return 1.0 / self.sigmas

    def unweighted(self) -> "PnPProblem":
        """Return the same problem with unit weights."""
        return self.replace(sigmas=None)

    def replace(self, **changes: object) -> "PnPProblem":
        """Return a validated copy with some fields replaced."""
        fields = {
            "points3": self.points3,
            "points2": self.points2,
            "sigmas": self.sigmas,
            "cam": self.cam,
        }
        fields.update(changes)
        return PnPProblem(**fields)


class PnPSolution(BaseModel):
    """Model representing the outcome of a PnP refinement.

    Attributes:
        pose: The recovered pose.
        final_cost: Weighted squared reprojection error (px^2).
        iterations: Number of LM iterations performed.
        converged: Whether a tolerance test stopped the iterations.
        gradient_norm: Infinity norm of the cost gradient at the pose.
        cost_history: Cost after every accepted damped step, starting at the initial cost.
    """
    pose: RigidPose
    final_cost: float = Field(..., ge=0)
    iterations: int = Field(..., ge=0)
    converged: bool
    gradient_norm: float = Field(0.0, ge=0)
    cost_history: List[float] = Field(default_factory=list)

    model_config = ConfigDict(frozen=True)


class PoseDistribution(BaseModel):
    """Model representing weighted pose samples of a softargmin.

    Attributes:
        poses: The sample poses; poses[0] is the distribution center.
        weights: Normalized non-negative weights.
        temperature: Boltzmann temperature (cost units).
        expected_pose: Weighted chart mean mapped back to a pose.
    """
    poses: List[RigidPose] = Field(..., min_length=1)
    weights: np.ndarray
    temperature: float = Field(..., gt=0)
    expected_pose: RigidPose

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @model_validator(mode="after")
    def validate_weights(self) -> "PoseDistribution":
        """Check the weights form a distribution over the samples."""
        if self.weights.shape != (len(self.poses),):
            raise ValueError("one weight per sample pose is required")
        if np.any(self.weights < 0) or abs(float(np.sum(self.weights)) - 1.0) > 1e-12:
            raise ValueError("weights must be non-negative and sum to 1")
        return self


class PnPGradients(BaseModel):
    """Model representing the Jacobian of the solved pose w.r.t. the inputs.

    Attributes:
        d_points2: (6, 2N) derivative of the chart coordinates w.r.t. points2.
        d_points3: (6, 3N) derivative w.r.t. points3.
        d_sigmas: Optional (6, N) derivative w.r.t. the sigmas.
    """
    d_points2: np.ndarray
    d_points3: np.ndarray
    d_sigmas: Optional[np.ndarray] = None

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @model_validator(mode="after")
    def validate_blocks(self) -> "PnPGradients":
        """Check block sizes agree on N and every entry is finite."""
        n = self.d_points2.shape[1] // 2
        if self.d_points2.shape != (6, 2 * n) or self.d_points3.shape != (6, 3 * n):
            raise ValueError("gradient blocks must be (6, 2N) and (6, 3N)")
        if self.d_sigmas is not None and self.d_sigmas.shape != (6, n):
            raise ValueError("sigma gradient block must be (6, N)")
        blocks = [self.d_points2, self.d_points3]
        if self.d_sigmas is not None:
            blocks.append(self.d_sigmas)
        if not all(np.all(np.isfinite(block)) for block in blocks):
            raise ValueError("gradients must be finite")
        return self
