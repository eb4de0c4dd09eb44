"""A module containing the shape PCA service implementation."""

import logging
from typing import Sequence

import numpy as np
from scipy import linalg

from facepnp.core.domain.errors import DimensionMismatch, InconsistentVertexCount, RankDeficient
from facepnp.core.domain.losses import WpdcWeights
from facepnp.core.domain.shape import CanonicalMesh, PcaCoeffs, PcaModel
from facepnp.infrastructure.services.ipca import IPcaService

logger = logging.getLogger(__name__)

RANK_TOL = 1e-8


def data_rank(singular_values: np.ndarray) -> int:
    """Number of singular values above RANK_TOL relative to the largest."""
    if singular_values.size == 0 or singular_values[0] <= 0:
        return 0
    return int(np.sum(singular_values > RANK_TOL * singular_values[0]))


class PcaService(IPcaService):
    """A class implementing the shape PCA service."""

    def build(self, meshes: Sequence[CanonicalMesh], k: int) -> PcaModel:
        """A method building a K-component shape space.

        The basis holds the top-k left singular vectors of the centered
        (3N, count) data matrix, each flipped so that its largest-magnitude
        entry is positive.

        Args:
            meshes (Sequence[CanonicalMesh]): At least two meshes with equal N.
            k (int): The requested number of components.

        Raises:
            ValueError: If fewer than two meshes or k < 1.
            InconsistentVertexCount: If the meshes disagree on N.
            RankDeficient: If k exceeds the rank of the centered data.

        Returns:
            PcaModel: The shape space.
        """
        if len(meshes) < 2:
            raise ValueError("at least two meshes are required")
        if k < 1:
            raise ValueError("k must be positive")
        counts = {mesh.n_vertices for mesh in meshes}
        if len(counts) != 1:
            raise InconsistentVertexCount(f"meshes have differing vertex counts {sorted(counts)}")

        data = np.stack([mesh.flat() for mesh in meshes], axis=1)
        mean = data.mean(axis=1)
        u, s, _ = linalg.svd(data - mean[:, None], full_matrices=False)
        rank = data_rank(s)
        if k > rank:
            raise RankDeficient(rank, k)

        basis = u[:, :k].copy()
        pivots = np.argmax(np.abs(basis), axis=0)
        signs = np.sign(basis[pivots, np.arange(k)])
        basis *= signs
        scales = s[:k] / np.sqrt(len(meshes) - 1)
        logger.info(
            "Built PCA model from %d meshes: N=%d, K=%d, rank=%d",
            len(meshes), mean.shape[0] // 3, k, rank,
        )
        return PcaModel(mean=mean, basis=basis, component_scales=scales)

    def fit_coeffs(self, model: PcaModel, mesh: CanonicalMesh) -> PcaCoeffs:
        """A method projecting a mesh onto the shape space.

        Args:
            model (PcaModel): The shape space.
            mesh (CanonicalMesh): The mesh to encode.

        Raises:
            InconsistentVertexCount: If the mesh and the model disagree on N.

        Returns:
            PcaCoeffs: basis^T (mesh - mean).
        """
        if mesh.n_vertices != model.n_vertices:
            raise InconsistentVertexCount(
                f"mesh has {mesh.n_vertices} vertices but the model has {model.n_vertices}"
            )
        return PcaCoeffs(values=model.basis.T @ (mesh.flat() - model.mean))

    def reconstruct(self, model: PcaModel, coeffs: PcaCoeffs) -> CanonicalMesh:
        """A method decoding coefficients into a mesh.

        Raises:
            DimensionMismatch: If the coefficient count differs from K.
        """
        if coeffs.k != model.k:
            raise DimensionMismatch(f"expected {model.k} coefficients, got {coeffs.k}")
        return CanonicalMesh.from_flat(model.mean + model.basis @ coeffs.values)

    def wpdc_weights(self, model: PcaModel) -> WpdcWeights:
        """A method deriving the WPDC coefficient weights of a model."""
        total = float(model.component_scales.sum())
        if total <= 0:
            return WpdcWeights.uniform(model.k)
        return WpdcWeights(values=model.component_scales * model.k / total)
