"""Module containing PCA model repository abstractions."""

from abc import ABC, abstractmethod
from pathlib import Path

from facepnp.core.domain.shape import PcaModel


class IPcaModelRepository(ABC):
    """An abstract class representing protocol of PCA model repository."""

    @abstractmethod
    def save(self, path: Path, model: PcaModel) -> None:
        """Write a model file.

        Args:
            path (Path): The model file.
            model (PcaModel): The model to write.
        """

    @abstractmethod
    def load(self, path: Path) -> PcaModel:
        """Read a model file.

        Args:
            path (Path): The model file.

        Returns:
            PcaModel: The model.
        """
