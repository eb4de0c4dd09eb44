"""Module containing synthetic scene and experiment configuration models"""

from typing import List, Literal, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from facepnp.config import config
from facepnp.core.domain.geometry import CameraIntrinsics, RigidPose, Similarity2D, coerce_points
from facepnp.core.domain.losses import TotalLossConfig
from facepnp.core.domain.shape import CanonicalMesh, PcaCoeffs

Range = Tuple[float, float]

LOSS_TERMS = ("gnll", "vdc", "wpdc", "pnp")


class NoiseModel(BaseModel):
    """Model representing heteroscedastic landmark noise.

    Attributes:
        base_sigma: Pixel noise std of visible landmarks.
        occlusion_fraction: Fraction of landmarks treated as occluded.
        occlusion_multiplier: Sigma inflation of occluded landmarks.
    """
    base_sigma: float = Field(1.0, ge=0)
    occlusion_fraction: float = Field(0.2, ge=0, le=1)
    occlusion_multiplier: float = Field(5.0, ge=1)

    model_config = ConfigDict(frozen=True)


class SceneConfig(BaseModel):
    """Model representing every knob of the synthetic scene generator."""
    seed: int = 0
    n_vertices: int = Field(1220, ge=6)
    n_shapes: int = Field(251, ge=2)
    k: int = Field(250, ge=1)
    n_samples: int = Field(100, ge=0)
    yaw_range: Range = (-60.0, 60.0)
    pitch_range: Range = (-30.0, 30.0)
    roll_range: Range = (-30.0, 30.0)
    tx_range: Range = (-60.0, 60.0)
    ty_range: Range = (-60.0, 60.0)
    tz_range: Range = (300.0, 1200.0)
    focal_range: Range = (600.0, 1600.0)
    principal_jitter: float = Field(0.0, ge=0)
    image_size: int = Field(800, gt=0)
    noise: NoiseModel = Field(default_factory=NoiseModel)
    bumps_per_shape: int = Field(8, ge=1)
    bump_width: float = Field(25.0, gt=0)
    deformation_scale: float = Field(4.0, gt=0)
    crop_size: int = Field(default_factory=lambda: config.CROP_SIZE, gt=0)
    crop_fill: float = Field(default_factory=lambda: config.CROP_FILL, gt=0, le=1)
    eye_indices: Tuple[int, int] = Field(
        default_factory=lambda: (config.EYE_LEFT_INDEX, config.EYE_RIGHT_INDEX)
    )

    model_config = ConfigDict(frozen=True)

    @field_validator(
        "yaw_range", "pitch_range", "roll_range", "tx_range", "ty_range", "tz_range", "focal_range"
    )
    @classmethod
    def validate_range(cls, v: Range) -> Range:
        """Check that a range is non-empty."""
        if not v[0] <= v[1]:
            raise ValueError(f"Empty range {v}")
        return v

    @model_validator(mode="after")
    def validate_scene(self) -> "SceneConfig":
        """Check cross-field constraints of the scene."""
        if self.tz_range[0] <= 0:
            raise ValueError("tz_range must be strictly positive")
        if self.focal_range[0] <= 0:
            raise ValueError("focal_range must be strictly positive")
        if self.pitch_range[0] < -90 or self.pitch_range[1] > 90:
            raise ValueError("pitch_range must lie in [-90, 90]")
        if self.k > self.n_shapes - 1:
            raise ValueError("k must not exceed n_shapes - 1")
        left, right = self.eye_indices
        if left == right or not (0 <= left < self.n_vertices and 0 <= right < self.n_vertices):
            raise ValueError("eye_indices must be two distinct vertex indices")
        return self


class SyntheticSample(BaseModel):
    """Model representing one supervised synthetic scene.

    Attributes:
        sample_id: Index of the sample inside its dataset.
        pose: Ground-truth pose.
        coeffs: Ground-truth shape coefficients.
        mesh: Ground-truth canonical mesh.
        cam: Camera intrinsics of the full frame.
        clean_landmarks: Exact projection of the mesh (full frame).
        noisy_landmarks: Clean landmarks plus noise drawn with `sigmas`.
        sigmas: Generating per-landmark noise std (px).
        warp: Frontalization warp from the full frame to the crop.
    """
    sample_id: int = Field(..., ge=0)
    pose: RigidPose
    coeffs: PcaCoeffs
    mesh: CanonicalMesh
    cam: CameraIntrinsics
    clean_landmarks: np.ndarray
    noisy_landmarks: np.ndarray
    sigmas: np.ndarray
    warp: Similarity2D

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @field_validator("clean_landmarks", "noisy_landmarks", mode="before")
    @classmethod
    def validate_landmarks(cls, v: object) -> np.ndarray:
        """Coerce landmark arrays."""
        return coerce_points(v, 2, "landmarks")

    @field_validator("sigmas", mode="before")
    @classmethod
    def validate_sigmas(cls, v: object) -> np.ndarray:
        """Coerce the generating sigmas."""
        sigmas = np.array(v, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(sigmas)) or np.any(sigmas < 0):
            raise ValueError("sigmas must be finite and non-negative")
        sigmas.flags.writeable = False
        return sigmas

    @model_validator(mode="after")
    def validate_lengths(self) -> "SyntheticSample":
        """Check every per-vertex array agrees with the mesh."""
        n = self.mesh.n_vertices
        if self.clean_landmarks.shape[0] != n or self.noisy_landmarks.shape[0] != n:
            raise ValueError("landmark count must match the mesh")
        if self.sigmas.shape[0] != n:
            raise ValueError("one sigma per landmark is required")
        return self


class FinetuneConfig(BaseModel):
    """Model representing the two-phase finetune benchmark.

    Attributes:
        seed: Root seed of every trial sub-stream.
        trials: Number of trials; trial i uses sample i modulo the dataset size.
        steps: Phase-2 gradient steps.
        lr: Fixed step of the preconditioned gradient descent.
        losses: Loss weights shared by both phases.
        phase1_terms: Terms whose optimum initializes the free variables.
        phase2_terms: Terms minimized during finetuning.
        coeff_noise: Std of the coefficient prediction error, in component scales.
        landmark_loss: "gnll" (sigma-weighted) or "mse" (sigma frozen at 1).
        divergence_factor: A trial aborts when its loss exceeds this multiple
            of its initial value.
    """
    seed: int = 0
    trials: int = Field(50, ge=1)
    steps: int = Field(100, ge=1)
    lr: float = Field(0.001, gt=0)
    losses: TotalLossConfig = Field(default_factory=TotalLossConfig)
    phase1_terms: List[Literal["gnll", "vdc", "wpdc", "pnp"]] = ["gnll", "vdc", "wpdc"]
    phase2_terms: List[Literal["gnll", "vdc", "wpdc", "pnp"]] = ["gnll", "vdc", "wpdc", "pnp"]
    coeff_noise: float = Field(0.1, ge=0)
    landmark_loss: Literal["gnll", "mse"] = "gnll"
    divergence_factor: float = Field(10.0, gt=1)

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def validate_phases(self) -> "FinetuneConfig":
        """Check that phase 1 does not already contain the PnP term."""
        if "pnp" in self.phase1_terms:
            raise ValueError("phase 1 must not contain the pnp term")
        return self


class Dataset(BaseModel):
    """Model representing a generated dataset and the configuration behind it."""
    cfg: SceneConfig
    samples: List[SyntheticSample]

    model_config = ConfigDict(frozen=True)

    @property
    def n_samples(self) -> int:
        """Number of samples."""
        return len(self.samples)
