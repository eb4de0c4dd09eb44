"""A module containing the dataset evaluation service implementation."""

import logging
from typing import List, Optional, Tuple

import numpy as np

from facepnp.core.domain.errors import DatasetError, FacePnPError
from facepnp.core.domain.pnp import PnPProblem
from facepnp.core.domain.report import EvalReport, PoseEvaluation, ReconstructionReport
from facepnp.core.domain.scene import Dataset, SyntheticSample
from facepnp.core.domain.shape import CanonicalMesh, PcaModel
from facepnp.infrastructure.services.ievaluation import IEvaluationService
from facepnp.infrastructure.services.imetrics import IMetricsService
from facepnp.infrastructure.services.ipca import IPcaService
from facepnp.infrastructure.services.ipnp import IPnPService
from facepnp.infrastructure.utils.geometry import pose_to_euler
from facepnp.infrastructure.utils.pool import ordered_map

logger = logging.getLogger(__name__)


class EvaluationService(IEvaluationService):
    """A class implementing the dataset evaluation service."""

    def __init__(
        self,
        pnp_service: IPnPService,
        metrics_service: IMetricsService,
        pca_service: IPcaService,
        workers: int = 1,
        weighted: bool = True,
    ) -> None:
        self._pnp_service = pnp_service
        self._metrics_service = metrics_service
        self._pca_service = pca_service
        self._workers = workers
        self._weighted = weighted

    def solve_sample(self, sample: SyntheticSample, weighted: Optional[bool] = None) -> PoseEvaluation:
        """A method solving and scoring one sample.

        Solver failures are returned in the `error` field. Samples whose
        sigmas are not all positive (noise-free data) are solved unweighted.
        """
        if weighted is None:
            weighted = self._weighted
        sigmas = sample.sigmas
        use_sigmas = weighted and bool(np.all(sigmas > 0))
        try:
            problem = PnPProblem(
                points3=sample.mesh.vertices,
                points2=sample.noisy_landmarks,
                sigmas=sigmas if use_sigmas else None,
                cam=sample.cam,
            )
            solution = self._pnp_service.solve(problem, weighted=use_sigmas)
        except FacePnPError as e:
            logger.warning("Sample %d could not be solved: %s", sample.sample_id, e)
            return PoseEvaluation(sample_id=sample.sample_id, error=f"{type(e).__name__}: {e}")

        metrics = self._metrics_service.evaluate(sample.sample_id, solution.pose, sample.pose, sample.mesh)
        return PoseEvaluation(
            sample_id=sample.sample_id,
            pose=solution.pose,
            euler=pose_to_euler(solution.pose),
            converged=solution.converged,
            metrics=metrics,
        )

    def run_pose_eval(
        self,
        dataset: Dataset,
        weighted: Optional[bool] = None,
    ) -> Tuple[EvalReport, List[PoseEvaluation]]:
        """A method evaluating PnP from noisy landmarks over a dataset.

        Raises:
            DatasetError: If the dataset is empty or no sample could be solved.
        """
        if weighted is None:
            weighted = self._weighted
        outcomes = ordered_map(lambda s: self.solve_sample(s, weighted), dataset.samples, self._workers)
        outcomes.sort(key=lambda outcome: outcome.sample_id)
        solved = [outcome.metrics for outcome in outcomes if not outcome.failed]
        if not solved:
            raise DatasetError("no sample of the dataset could be evaluated")
        report = self._metrics_service.aggregate(solved, failure_count=len(outcomes) - len(solved))
        logger.info(
            "Pose eval (%s): %d samples, %d failures, ADD=%.4f mm, MAE_r=%.4f deg",
            "weighted" if weighted else "unweighted",
            report.sample_count, report.failure_count, report.add, report.mae_r,
        )
        return report, outcomes

    def run_reconstruction_eval(
        self,
        dataset: Dataset,
        model: PcaModel,
        vertex_noise: float,
        seed: int = 0,
    ) -> ReconstructionReport:
        """A method comparing noisy direct vertices with their PCA projection.

        Raises:
            ValueError: If vertex_noise is negative.
            DatasetError: If the dataset is empty.
        """
        if vertex_noise < 0:
            raise ValueError("vertex_noise must be non-negative")
        if not dataset.samples:
            raise DatasetError("cannot evaluate an empty dataset")

        def score(sample: SyntheticSample) -> Tuple[float, float, float, float]:
            rng = np.random.default_rng([seed, sample.sample_id])
            direct = CanonicalMesh(
                vertices=sample.mesh.vertices + rng.standard_normal(sample.mesh.vertices.shape) * vertex_noise
            )
            projected = self._pca_service.reconstruct(model, self._pca_service.fit_coeffs(model, direct))
            return (
                *self._metrics_service.vertex_error_stats(direct, sample.mesh),
                *self._metrics_service.vertex_error_stats(projected, sample.mesh),
            )

        rows = np.array(ordered_map(score, dataset.samples, self._workers))
        report = ReconstructionReport(
            vertex_noise=vertex_noise,
            direct_median=float(np.median(rows[:, 0])),
            direct_mean=float(rows[:, 1].mean()),
            pca_median=float(np.median(rows[:, 2])),
            pca_mean=float(rows[:, 3].mean()),
            sample_count=len(rows),
        )
        logger.info(
            "Reconstruction eval: direct %.4f/%.4f mm, PCA %.4f/%.4f mm (median/mean)",
            report.direct_median, report.direct_mean, report.pca_median, report.pca_mean,
        )
        return report
