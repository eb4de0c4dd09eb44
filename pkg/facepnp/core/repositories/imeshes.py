"""Module containing mesh collection repository abstractions."""

from abc import ABC, abstractmethod
from pathlib import Path
from typing import List, Sequence

from facepnp.core.domain.shape import CanonicalMesh


class IMeshCollectionRepository(ABC):
    """An abstract class representing protocol of mesh collection repository."""

    @abstractmethod
    def save(self, path: Path, meshes: Sequence[CanonicalMesh]) -> None:
        """Write a mesh collection directory.

        Args:
            path (Path): The collection directory; created when missing.
            meshes (Sequence[CanonicalMesh]): Meshes sharing one vertex count.
        """

    @abstractmethod
    def load(self, path: Path) -> List[CanonicalMesh]:
        """Read a mesh collection directory.

        Args:
            path (Path): The collection directory.

        Returns:
            List[CanonicalMesh]: The meshes in stored order.
        """
