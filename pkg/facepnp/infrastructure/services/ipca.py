"""A module containing the shape PCA service interface."""

from abc import ABC, abstractmethod
from typing import Sequence

from facepnp.core.domain.losses import WpdcWeights
from facepnp.core.domain.shape import CanonicalMesh, PcaCoeffs, PcaModel


class IPcaService(ABC):
    """An abstract class for the shape PCA service."""

    @abstractmethod
    def build(self, meshes: Sequence[CanonicalMesh], k: int) -> PcaModel:
        """A method building a K-component shape space.

        Args:
            meshes (Sequence[CanonicalMesh]): The training collection.
            k (int): The requested number of components.

        Returns:
            PcaModel: The shape space.
        """

    @abstractmethod
    def fit_coeffs(self, model: PcaModel, mesh: CanonicalMesh) -> PcaCoeffs:
        """A method projecting a mesh onto the shape space.

        Args:
            model (PcaModel): The shape space.
            mesh (CanonicalMesh): The mesh to encode.

        Returns:
            PcaCoeffs: The least-squares coefficients.
        """

    @abstractmethod
    def reconstruct(self, model: PcaModel, coeffs: PcaCoeffs) -> CanonicalMesh:
        """A method decoding coefficients into a mesh.

        Args:
            model (PcaModel): The shape space.
            coeffs (PcaCoeffs): The coefficients.

        Returns:
            CanonicalMesh: mean + basis @ coeffs.
        """

    @abstractmethod
    def wpdc_weights(self, model: PcaModel) -> WpdcWeights:
        """A method deriving the WPDC coefficient weights of a model.

        Args:
            model (PcaModel): The shape space.

        Returns:
            WpdcWeights: Component scales normalized to sum K.
        """
