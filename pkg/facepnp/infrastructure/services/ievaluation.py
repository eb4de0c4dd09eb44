"""A module containing the dataset evaluation service interface."""

from abc import ABC, abstractmethod
from typing import List, Optional, Tuple

from facepnp.core.domain.report import EvalReport, PoseEvaluation, ReconstructionReport
from facepnp.core.domain.scene import Dataset, SyntheticSample
from facepnp.core.domain.shape import PcaModel


class IEvaluationService(ABC):
    """An abstract class for the dataset evaluation service."""

    @abstractmethod
    def solve_sample(self, sample: SyntheticSample, weighted: Optional[bool] = None) -> PoseEvaluation:
        """A method solving and scoring one sample.

        Args:
            sample (SyntheticSample): The sample.
            weighted (Optional[bool]): Whether the landmark sigmas weight the
                PnP; None uses the service default.

        Returns:
            PoseEvaluation: The pose and metrics, or the solver error.
        """

    @abstractmethod
    def run_pose_eval(
        self,
        dataset: Dataset,
        weighted: Optional[bool] = None,
    ) -> Tuple[EvalReport, List[PoseEvaluation]]:
        """A method evaluating PnP from noisy landmarks over a dataset.

        Args:
            dataset (Dataset): The dataset.
            weighted (Optional[bool]): Whether the landmark sigmas weight the
                PnP; None uses the service default.

        Returns:
            Tuple[EvalReport, List[PoseEvaluation]]: The aggregate and the
                per-sample outcomes ordered by sample id.
        """

    @abstractmethod
    def run_reconstruction_eval(
        self,
        dataset: Dataset,
        model: PcaModel,
        vertex_noise: float,
        seed: int = 0,
    ) -> ReconstructionReport:
        """A method comparing noisy direct vertices with their PCA projection.

        Args:
            dataset (Dataset): The dataset.
            model (PcaModel): The shape space.
            vertex_noise (float): Std of the i.i.d. vertex noise (mm).
            seed (int): Root seed of the noise.

        Returns:
            ReconstructionReport: Median and mean vertex errors of both.
        """
