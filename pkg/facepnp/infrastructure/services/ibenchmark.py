"""A module containing the finetune benchmark service interface."""

from abc import ABC, abstractmethod

from facepnp.core.domain.report import BenchmarkResult, TrialResult
from facepnp.core.domain.scene import Dataset, FinetuneConfig, SyntheticSample
from facepnp.core.domain.shape import PcaModel


class IBenchmarkService(ABC):
    """An abstract class for the finetune benchmark service."""

    @abstractmethod
    def run_trial(
        self,
        sample: SyntheticSample,
        model: PcaModel,
        cfg: FinetuneConfig,
        trial_id: int,
    ) -> TrialResult:
        """A method running one two-phase trial on one sample.

        Args:
            sample (SyntheticSample): The supervised sample.
            model (PcaModel): The shape space of the dataset.
            cfg (FinetuneConfig): The benchmark configuration.
            trial_id (int): Identifier mixed into the trial seed.

        Returns:
            TrialResult: Metrics before and after finetuning.
        """

    @abstractmethod
    def run_finetune_benchmark(self, dataset: Dataset, model: PcaModel, cfg: FinetuneConfig) -> BenchmarkResult:
        """A method running every trial of the benchmark.

        Args:
            dataset (Dataset): Noisy samples; trial i uses sample i modulo the size.
            model (PcaModel): The shape space of the dataset.
            cfg (FinetuneConfig): The benchmark configuration.

        Returns:
            BenchmarkResult: Per-trial results and the summary.
        """
