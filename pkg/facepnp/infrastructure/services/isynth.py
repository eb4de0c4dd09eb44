"""A module containing the synthetic scene generator interface."""

from abc import ABC, abstractmethod
from typing import List, Tuple

from facepnp.core.domain.scene import SceneConfig, SyntheticSample
from facepnp.core.domain.shape import CanonicalMesh, PcaModel


class ISynthService(ABC):
    """An abstract class for the synthetic scene generator."""

    @abstractmethod
    def gen_shape_space(self, cfg: SceneConfig) -> Tuple[PcaModel, List[CanonicalMesh]]:
        """A method fabricating a shape collection and its PCA model.

        Args:
            cfg (SceneConfig): The scene configuration.

        Returns:
            Tuple[PcaModel, List[CanonicalMesh]]: The model and the collection.
        """

    @abstractmethod
    def gen_sample(self, model: PcaModel, cfg: SceneConfig, index: int) -> SyntheticSample:
        """A method generating one supervised scene.

        Args:
            model (PcaModel): The shape space.
            cfg (SceneConfig): The scene configuration.
            index (int): Sample index, mixed into the seed.

        Returns:
            SyntheticSample: The scene.
        """

    @abstractmethod
    def gen_dataset(self, model: PcaModel, cfg: SceneConfig) -> List[SyntheticSample]:
        """A method generating `cfg.n_samples` scenes ordered by index.

        Args:
            model (PcaModel): The shape space.
            cfg (SceneConfig): The scene configuration.

        Returns:
            List[SyntheticSample]: The scenes.
        """
