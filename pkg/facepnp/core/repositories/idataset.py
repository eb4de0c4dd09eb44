"""Module containing dataset repository abstractions."""

from abc import ABC, abstractmethod
from pathlib import Path

from facepnp.core.domain.scene import Dataset


class IDatasetRepository(ABC):
    """An abstract class representing protocol of dataset repository."""

    @abstractmethod
    def write(self, path: Path, dataset: Dataset) -> None:
        """Persist a dataset under a directory.

        Args:
            path (Path): The dataset directory; created when missing.
            dataset (Dataset): The samples and their configuration.
        """

    @abstractmethod
    def read(self, path: Path) -> Dataset:
        """Load a dataset from a directory.

        Args:
            path (Path): The dataset directory.

        Returns:
            Dataset: The samples and their configuration.
        """
