"""A module containing the DTO of one samples.jsonl record."""

from typing import Any, Dict, List

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from facepnp.core.domain.errors import DatasetError
from facepnp.core.domain.geometry import CameraIntrinsics, RigidPose, Similarity2D
from facepnp.core.domain.scene import SyntheticSample
from facepnp.core.domain.shape import CanonicalMesh, PcaCoeffs
from facepnp.infrastructure.utils.consts import SAMPLE_ARRAYS


class SampleRecordDTO(BaseModel):
    """A model representing the metadata of a sample and its blob location.

    Attributes:
        sample_id: Index of the sample.
        pose: Ground-truth pose.
        cam: Camera intrinsics.
        warp: Frontalization warp.
        n_vertices: Vertex count N.
        k: Coefficient count K.
        offset: First float64 element of the sample inside blobs.bin.
        arrays: Names of the stored arrays, in payload order.
    """
    sample_id: int
    pose: RigidPose
    cam: CameraIntrinsics
    warp: Similarity2D
    n_vertices: int = Field(..., ge=1)
    k: int = Field(..., ge=0)
    offset: int = Field(..., ge=0)
    arrays: List[str] = Field(default_factory=lambda: list(SAMPLE_ARRAYS))

    model_config = ConfigDict(from_attributes=True, extra="ignore")

    @property
    def size(self) -> int:
        """Number of float64 elements of the sample payload."""
        return 8 * self.n_vertices + self.k

    @classmethod
    def from_sample(cls, sample: SyntheticSample, offset: int) -> "SampleRecordDTO":
        """Create the record of a sample stored at `offset`."""
        return cls(
            sample_id=sample.sample_id,
            pose=sample.pose,
            cam=sample.cam,
            warp=sample.warp,
            n_vertices=sample.mesh.n_vertices,
            k=sample.coeffs.k,
            offset=offset,
        )

    @classmethod
    def from_record(cls, record: Dict[str, Any]) -> "SampleRecordDTO":
        """Create a record from a parsed samples.jsonl line.

        Raises:
            DatasetError: If the arrays are not the supported layout.
        """
        dto = cls.model_validate(record)
        if tuple(dto.arrays) != SAMPLE_ARRAYS:
            raise DatasetError(f"sample {dto.sample_id}: unsupported array layout {dto.arrays}")
        return dto

    @staticmethod
    def arrays_of(sample: SyntheticSample) -> List[np.ndarray]:
        """Return the arrays of a sample in payload order."""
        return [
            sample.mesh.vertices,
            sample.clean_landmarks,
            sample.noisy_landmarks,
            sample.sigmas,
            sample.coeffs.values,
        ]

    def to_sample(self, blob: np.ndarray) -> SyntheticSample:
        """Rebuild the sample from the dataset payload.

        Raises:
            DatasetError: If the payload is too short for this record.
        """
        n, k = self.n_vertices, self.k
        chunk = blob[self.offset:self.offset + self.size]
        if chunk.shape[0] != self.size:
            raise DatasetError(f"sample {self.sample_id}: payload truncated")
        bounds = np.cumsum([0, 3 * n, 2 * n, 2 * n, n, k])
        mesh, clean, noisy, sigmas, coeffs = (
            chunk[start:stop] for start, stop in zip(bounds[:-1], bounds[1:])
        )
        return SyntheticSample(
            sample_id=self.sample_id,
            pose=self.pose,
            coeffs=PcaCoeffs(values=coeffs),
            mesh=CanonicalMesh(vertices=mesh.reshape(n, 3)),
            cam=self.cam,
            clean_landmarks=clean.reshape(n, 2),
            noisy_landmarks=noisy.reshape(n, 2),
            sigmas=sigmas,
            warp=self.warp,
        )
