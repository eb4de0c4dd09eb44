"""A module containing the two-phase finetune benchmark.

Each trial optimizes per-sample free variables in place of a network:
predicted landmarks mu and shape coefficients c. Phase 1 is solved in
closed form: its optimum reproduces the supervision labels (noisy landmark
annotations and noisy coefficient labels). Phase 2 adds the PnP pose loss
and runs diagonally preconditioned gradient descent from there.
"""

import logging
from typing import Dict, Tuple

import numpy as np

from facepnp.core.domain.errors import DatasetError, DivergenceError, FacePnPError
from facepnp.core.domain.losses import LossValue, WpdcWeights
from facepnp.core.domain.pnp import PnPProblem
from facepnp.core.domain.report import BenchmarkResult, EvalReport, TrialResult
from facepnp.core.domain.scene import Dataset, FinetuneConfig, SyntheticSample
from facepnp.core.domain.shape import CanonicalMesh, LandmarkSet, PcaCoeffs, PcaModel
from facepnp.infrastructure.services.ibenchmark import IBenchmarkService
from facepnp.infrastructure.services.idiffpnp import IDiffPnPService
from facepnp.infrastructure.services.iloss import ILossService
from facepnp.infrastructure.services.imetrics import IMetricsService
from facepnp.infrastructure.services.ipca import IPcaService
from facepnp.infrastructure.utils.pool import ordered_map

logger = logging.getLogger(__name__)


def phase1_curvature(
    cfg: FinetuneConfig,
    log_sigma: np.ndarray,
    weights: WpdcWeights,
) -> Tuple[np.ndarray, np.ndarray]:
    """Diagonal curvature of the phase-1 loss in mu (per point) and in c.

    Blocks with zero curvature fall back to 1.
    """
    lambdas = cfg.losses.as_dict()
    n, k = log_sigma.shape[0], weights.k
    mu_curvature = np.zeros(n)
    coeff_curvature = np.zeros(k)
    if "gnll" in cfg.phase1_terms:
        mu_curvature += lambdas["gnll"] * np.exp(-2.0 * log_sigma)
    if "vdc" in cfg.phase1_terms:
        coeff_curvature += 2.0 * lambdas["vdc"] / n
    if "wpdc" in cfg.phase1_terms:
        coeff_curvature += 2.0 * lambdas["wpdc"] * weights.values ** 2
    mu_curvature[mu_curvature <= 0] = 1.0
    coeff_curvature[coeff_curvature <= 0] = 1.0
    return mu_curvature, coeff_curvature


class BenchmarkService(IBenchmarkService):
    """A class implementing the finetune benchmark."""

    def __init__(
        self,
        diffpnp_service: IDiffPnPService,
        loss_service: ILossService,
        pca_service: IPcaService,
        metrics_service: IMetricsService,
        workers: int = 1,
    ) -> None:
        self._diffpnp_service = diffpnp_service
        self._loss_service = loss_service
        self._pca_service = pca_service
        self._metrics_service = metrics_service
        self._workers = workers

    def _evaluate(
        self,
        sample: SyntheticSample,
        landmarks: LandmarkSet,
        mesh: CanonicalMesh,
        weighted: bool,
    ) -> EvalReport:
        problem = PnPProblem(
            points3=mesh.vertices,
            points2=landmarks.mu,
            sigmas=landmarks.sigma if weighted else None,
            cam=sample.cam,
        )
        solution = self._diffpnp_service.forward(problem)
        metrics = self._metrics_service.evaluate(sample.sample_id, solution.pose, sample.pose, sample.mesh, mesh)
        return self._metrics_service.aggregate([metrics])

    def run_trial(
        self,
        sample: SyntheticSample,
        model: PcaModel,
        cfg: FinetuneConfig,
        trial_id: int,
    ) -> TrialResult:
        """A method running one two-phase trial on one sample.

        Raises:
            DatasetError: If gnll mode meets a sample without landmark noise.
        """
        rng = np.random.default_rng([cfg.seed, trial_id])
        n, k = sample.mesh.n_vertices, model.k
        weighted = cfg.landmark_loss == "gnll"
        if weighted:
            if np.any(sample.sigmas <= 0):
                raise DatasetError(f"sample {sample.sample_id} has no landmark noise to weight")
            log_sigma = np.log(sample.sigmas)
        else:
            log_sigma = np.zeros(n)

        label_mu = sample.noisy_landmarks
        label_coeffs = PcaCoeffs(
            values=sample.coeffs.values + cfg.coeff_noise * model.component_scales * rng.standard_normal(k)
        )
        label_mesh = self._pca_service.reconstruct(model, label_coeffs)
        wpdc_weights = self._pca_service.wpdc_weights(model)
        lambdas = cfg.losses.as_dict()
        mu_curvature, coeff_curvature = phase1_curvature(cfg, log_sigma, wpdc_weights)

        def objective(mu: np.ndarray, coeffs: np.ndarray) -> Tuple[float, np.ndarray, np.ndarray]:
            landmarks = LandmarkSet(mu=mu, log_sigma=log_sigma)
            predicted = PcaCoeffs(values=coeffs)
            mesh = self._pca_service.reconstruct(model, predicted)
            parts: Dict[str, LossValue] = {}
            if "gnll" in cfg.phase2_terms:
                parts["gnll"] = self._loss_service.gnll(landmarks, label_mu)
            if "vdc" in cfg.phase2_terms:
                parts["vdc"] = self._loss_service.vdc(mesh, label_mesh)
            if "wpdc" in cfg.phase2_terms:
                parts["wpdc"] = self._loss_service.wpdc(predicted, label_coeffs, wpdc_weights)
            if "pnp" in cfg.phase2_terms and lambdas["pnp"] > 0:
                parts["pnp"], _ = self._diffpnp_service.pnp_loss(
                    landmarks, mesh, sample.mesh, sample.pose, sample.cam, weighted=weighted,
                )
            total = self._loss_service.total_loss(parts, cfg.losses)
            grad_mu = total.gradients.get("mu", np.zeros((n, 2)))
            grad_coeffs = total.gradients.get("coeffs", np.zeros(k))
            if "vertices" in total.gradients:
                grad_coeffs = grad_coeffs + model.basis.T @ total.gradients["vertices"].reshape(-1)
            return total.value, grad_mu, grad_coeffs

        mu, coeffs = label_mu.copy(), label_coeffs.values.copy()
        before = self._evaluate(sample, LandmarkSet(mu=mu, log_sigma=log_sigma), label_mesh, weighted)

        initial, grad_mu, grad_coeffs = objective(mu, coeffs)
        steps_run, aborted, reason = 0, False, None
        for step in range(cfg.steps):
            candidate_mu = mu - cfg.lr * grad_mu / mu_curvature[:, None]
            candidate_coeffs = coeffs - cfg.lr * grad_coeffs / coeff_curvature
            try:
                value, candidate_grad_mu, candidate_grad_coeffs = objective(candidate_mu, candidate_coeffs)
                if value - initial > cfg.divergence_factor * max(abs(initial), 1e-12):
                    raise DivergenceError(f"loss {value:.6g} diverged from {initial:.6g} at step {step}")
            except FacePnPError as e:
                aborted, reason = True, f"{type(e).__name__}: {e}"
                break
            mu, coeffs = candidate_mu, candidate_coeffs
            grad_mu, grad_coeffs = candidate_grad_mu, candidate_grad_coeffs
            steps_run += 1

        if aborted:
            logger.warning("Trial %d aborted after %d steps: %s", trial_id, steps_run, reason)
        mesh = self._pca_service.reconstruct(model, PcaCoeffs(values=coeffs))
        after = self._evaluate(sample, LandmarkSet(mu=mu, log_sigma=log_sigma), mesh, weighted)
        logger.debug("Trial %d: ADD %.4f -> %.4f mm", trial_id, before.add, after.add)
        return TrialResult(
            trial_id=trial_id,
            sample_id=sample.sample_id,
            before=before,
            after=after,
            steps_run=steps_run,
            aborted=aborted,
            abort_reason=reason,
        )

    def run_finetune_benchmark(self, dataset: Dataset, model: PcaModel, cfg: FinetuneConfig) -> BenchmarkResult:
        """A method running every trial of the benchmark.

        Raises:
            DatasetError: If the dataset is empty.
        """
        if not dataset.samples:
            raise DatasetError("the finetune benchmark needs at least one sample")
        samples = dataset.samples
        trials = ordered_map(
            lambda t: self.run_trial(samples[t % len(samples)], model, cfg, t),
            list(range(cfg.trials)),
            self._workers,
        )
        trials.sort(key=lambda trial: trial.trial_id)

        before = np.array([trial.before.add for trial in trials])
        after = np.array([trial.after.add for trial in trials])
        result = BenchmarkResult(
            trials=trials,
            win_rate=float(np.mean(after < before)),
            mean_add_before=float(before.mean()),
            mean_add_after=float(after.mean()),
            mean_add_delta=float(after.mean() - before.mean()),
            aborted_count=sum(trial.aborted for trial in trials),
        )
        logger.info(
            "Finetune benchmark: %d trials, win rate %.2f, mean ADD %.4f -> %.4f mm, %d aborted",
            len(trials), result.win_rate, result.mean_add_before, result.mean_add_after, result.aborted_count,
        )
        return result
