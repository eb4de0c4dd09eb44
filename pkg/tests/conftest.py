"""Shared fixtures: services and small seeded scenes."""

from typing import Callable, Tuple

import numpy as np
import pytest

from facepnp.core.domain.geometry import CameraIntrinsics, EulerAngles, RigidPose
from facepnp.core.domain.pnp import PnPProblem
from facepnp.core.domain.scene import Dataset, NoiseModel, SceneConfig
from facepnp.core.domain.shape import PcaModel
from facepnp.infrastructure.services.audit import AuditService
from facepnp.infrastructure.services.benchmark import BenchmarkService
from facepnp.infrastructure.services.diffpnp import DiffPnPService
from facepnp.infrastructure.services.evaluation import EvaluationService
from facepnp.infrastructure.services.loss import LossService
from facepnp.infrastructure.services.metrics import MetricsService
from facepnp.infrastructure.services.pca import PcaService
from facepnp.infrastructure.services.pnp import PnPService
from facepnp.infrastructure.services.synth import SynthService
from facepnp.infrastructure.utils.geometry import euler_to_pose, project

SMALL_SCENE = {"seed": 7, "n_vertices": 60, "n_shapes": 31, "k": 30, "n_samples": 8}

CAMERA = CameraIntrinsics(fx=800.0, fy=800.0, cx=400.0, cy=400.0)

ProblemFactory = Callable[..., Tuple[PnPProblem, RigidPose]]


@pytest.fixture(scope="session")
def pnp_service() -> PnPService:
    return PnPService()


@pytest.fixture(scope="session")
def diffpnp_service(pnp_service: PnPService) -> DiffPnPService:
    return DiffPnPService(pnp_service)


@pytest.fixture(scope="session")
def pca_service() -> PcaService:
    return PcaService()


@pytest.fixture(scope="session")
def loss_service() -> LossService:
    return LossService()


@pytest.fixture(scope="session")
def metrics_service() -> MetricsService:
    return MetricsService()


@pytest.fixture(scope="session")
def synth_service(pca_service: PcaService) -> SynthService:
    return SynthService(pca_service)


@pytest.fixture(scope="session")
def evaluation_service(
    pnp_service: PnPService,
    metrics_service: MetricsService,
    pca_service: PcaService,
) -> EvaluationService:
    return EvaluationService(pnp_service, metrics_service, pca_service)


@pytest.fixture(scope="session")
def benchmark_service(
    diffpnp_service: DiffPnPService,
    loss_service: LossService,
    pca_service: PcaService,
    metrics_service: MetricsService,
) -> BenchmarkService:
    return BenchmarkService(diffpnp_service, loss_service, pca_service, metrics_service)


@pytest.fixture(scope="session")
def audit_service(
    pnp_service: PnPService,
    diffpnp_service: DiffPnPService,
    loss_service: LossService,
) -> AuditService:
    return AuditService(pnp_service, diffpnp_service, loss_service)


@pytest.fixture(scope="session")
def scene_cfg() -> SceneConfig:
    return SceneConfig(**SMALL_SCENE)


@pytest.fixture(scope="session")
def pca_model(synth_service: SynthService, scene_cfg: SceneConfig) -> PcaModel:
    model, _ = synth_service.gen_shape_space(scene_cfg)
    return model


@pytest.fixture(scope="session")
def dataset(synth_service: SynthService, pca_model: PcaModel, scene_cfg: SceneConfig) -> Dataset:
    return Dataset(cfg=scene_cfg, samples=synth_service.gen_dataset(pca_model, scene_cfg))


@pytest.fixture(scope="session")
def clean_dataset(synth_service: SynthService, pca_model: PcaModel) -> Dataset:
    cfg = SceneConfig(**SMALL_SCENE, noise=NoiseModel(base_sigma=0.0))
    return Dataset(cfg=cfg, samples=synth_service.gen_dataset(pca_model, cfg))


@pytest.fixture
def make_problem() -> ProblemFactory:
    """Factory of random non-planar PnP scenes with optional pixel noise."""

    def factory(
        seed: int,
        n_points: int = 20,
        noise: float = 0.0,
        weighted: bool = False,
    ) -> Tuple[PnPProblem, RigidPose]:
        rng = np.random.default_rng(seed)
        points3 = rng.uniform(-60.0, 60.0, size=(n_points, 3))
        pose = euler_to_pose(
            EulerAngles(
                yaw=rng.uniform(-40.0, 40.0),
                pitch=rng.uniform(-20.0, 20.0),
                roll=rng.uniform(-20.0, 20.0),
            ),
            (rng.uniform(-30.0, 30.0), rng.uniform(-30.0, 30.0), rng.uniform(400.0, 800.0)),
        )
        sigmas = rng.uniform(0.5, 3.0, size=n_points)
        points2 = project(points3, pose, CAMERA)
        if noise > 0:
            points2 = points2 + rng.standard_normal((n_points, 2)) * noise * sigmas[:, None]
        problem = PnPProblem(
            points3=points3,
            points2=points2,
            sigmas=sigmas if weighted else None,
            cam=CAMERA,
        )
        return problem, pose

    return factory
