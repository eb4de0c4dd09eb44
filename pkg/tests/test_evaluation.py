import numpy as np
import pytest

from facepnp.core.domain.errors import DatasetError
from facepnp.core.domain.pnp import PnPProblem
from facepnp.core.domain.scene import Dataset, NoiseModel, SceneConfig
from facepnp.infrastructure.services.evaluation import EvaluationService

from tests.conftest import SMALL_SCENE


class TestSolveSample:
    def test_solves_the_full_frame_landmarks(self, pnp_service, evaluation_service, dataset):
        sample = dataset.samples[0]
        problem = PnPProblem(
            points3=sample.mesh.vertices, points2=sample.noisy_landmarks, sigmas=sample.sigmas, cam=sample.cam,
        )
        assert evaluation_service.solve_sample(sample).pose == pnp_service.solve(problem).pose

    def test_default_weighting_is_configurable(self, pnp_service, metrics_service, pca_service, dataset):
        unweighted = EvaluationService(pnp_service, metrics_service, pca_service, weighted=False)
        sample = dataset.samples[1]
        problem = PnPProblem(points3=sample.mesh.vertices, points2=sample.noisy_landmarks, cam=sample.cam)
        assert unweighted.solve_sample(sample).pose == pnp_service.solve(problem).pose
        assert unweighted.solve_sample(sample, weighted=True).pose != unweighted.solve_sample(sample).pose


class TestRunPoseEval:
    def test_zero_noise_is_exact(self, evaluation_service, clean_dataset):
        report, outcomes = evaluation_service.run_pose_eval(clean_dataset)
        assert report.add < 1e-3
        assert report.failure_count == 0
        assert report.sample_count == clean_dataset.n_samples
        assert all(outcome.converged for outcome in outcomes)

    def test_outcomes_ordered_by_sample(self, evaluation_service, dataset):
        _, outcomes = evaluation_service.run_pose_eval(dataset)
        assert [outcome.sample_id for outcome in outcomes] == list(range(dataset.n_samples))

    def test_deterministic_across_workers(self, pnp_service, metrics_service, pca_service, evaluation_service, dataset):
        parallel = EvaluationService(pnp_service, metrics_service, pca_service, workers=4)
        assert parallel.run_pose_eval(dataset)[0] == evaluation_service.run_pose_eval(dataset)[0]

    def test_unweighted_mode_differs(self, evaluation_service, dataset):
        weighted, _ = evaluation_service.run_pose_eval(dataset, weighted=True)
        unweighted, _ = evaluation_service.run_pose_eval(dataset, weighted=False)
        assert weighted.add != unweighted.add

    def test_service_default_applies(self, pnp_service, metrics_service, pca_service, evaluation_service, dataset):
        unweighted = EvaluationService(pnp_service, metrics_service, pca_service, weighted=False)
        assert unweighted.run_pose_eval(dataset)[0] == evaluation_service.run_pose_eval(dataset, weighted=False)[0]

    def test_empty_dataset(self, evaluation_service, scene_cfg):
        with pytest.raises(DatasetError):
            evaluation_service.run_pose_eval(Dataset(cfg=scene_cfg, samples=[]))


def test_weighting_helps_on_heteroscedastic_noise(synth_service, evaluation_service):
    cfg = SceneConfig(
        **{**SMALL_SCENE, "n_samples": 40},
        noise=NoiseModel(base_sigma=2.0, occlusion_fraction=0.3, occlusion_multiplier=10.0),
    )
    model, _ = synth_service.gen_shape_space(cfg)
    dataset = Dataset(cfg=cfg, samples=synth_service.gen_dataset(model, cfg))
    weighted, _ = evaluation_service.run_pose_eval(dataset, weighted=True)
    unweighted, _ = evaluation_service.run_pose_eval(dataset, weighted=False)
    assert weighted.add < unweighted.add


class TestReconstructionEval:
    def test_pca_projection_removes_noise(self, evaluation_service, dataset, pca_model):
        report = evaluation_service.run_reconstruction_eval(dataset, pca_model, vertex_noise=1.0)
        assert report.sample_count == dataset.n_samples
        assert report.pca_mean <= report.direct_mean
        assert report.direct_mean == pytest.approx(np.sqrt(8.0 / np.pi), rel=0.1)

    def test_zero_noise(self, evaluation_service, dataset, pca_model):
        report = evaluation_service.run_reconstruction_eval(dataset, pca_model, vertex_noise=0.0)
        assert report.direct_mean == 0.0
        assert report.pca_mean < 1e-9

    def test_negative_noise(self, evaluation_service, dataset, pca_model):
        with pytest.raises(ValueError):
            evaluation_service.run_reconstruction_eval(dataset, pca_model, vertex_noise=-1.0)


@pytest.mark.slow
def test_weighting_wins_paired_datasets(synth_service, evaluation_service):
    cfg = SceneConfig(
        **{**SMALL_SCENE, "n_samples": 100},
        noise=NoiseModel(occlusion_fraction=0.2, occlusion_multiplier=5.0),
    )
    model, _ = synth_service.gen_shape_space(cfg)
    wins = 0
    for seed in range(100):
        paired = cfg.model_copy(update={"seed": seed})
        dataset = Dataset(cfg=paired, samples=synth_service.gen_dataset(model, paired))
        _, weighted = evaluation_service.run_pose_eval(dataset, weighted=True)
        _, unweighted = evaluation_service.run_pose_eval(dataset, weighted=False)
        wins += median_add(weighted) < median_add(unweighted)
    assert wins >= 80


def median_add(outcomes):
    return float(np.median([outcome.metrics.add for outcome in outcomes if not outcome.failed]))
