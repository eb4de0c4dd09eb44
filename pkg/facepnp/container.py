"""Module providing containers injecting dependencies."""

from dependency_injector.containers import DeclarativeContainer
from dependency_injector.providers import Factory, Object, Singleton

from facepnp.config import config
from facepnp.infrastructure.repositories.datasetfs import DatasetRepository
from facepnp.infrastructure.repositories.meshesfs import MeshCollectionRepository
from facepnp.infrastructure.repositories.pcamodelfs import PcaModelRepository

from facepnp.infrastructure.services.audit import AuditService
from facepnp.infrastructure.services.benchmark import BenchmarkService
from facepnp.infrastructure.services.diffpnp import DiffPnPService
from facepnp.infrastructure.services.evaluation import EvaluationService
from facepnp.infrastructure.services.loss import LossService
from facepnp.infrastructure.services.metrics import MetricsService
from facepnp.infrastructure.services.pca import PcaService
from facepnp.infrastructure.services.pnp import PnPService
from facepnp.infrastructure.services.synth import SynthService


class Container(DeclarativeContainer):
    """Container class for dependency injecting purposes."""
    dataset_repository = Singleton(DatasetRepository)
    pca_model_repository = Singleton(PcaModelRepository)
    mesh_repository = Singleton(MeshCollectionRepository)

    weighted_pnp = Object(config.WEIGHTED_PNP)

    pnp_service = Factory(
        PnPService,
        max_iterations=config.LM_MAX_ITERATIONS,
        gradient_tol=config.LM_GRADIENT_TOL,
        step_tol=config.LM_STEP_TOL,
        initial_damping=config.LM_INITIAL_DAMPING,
        damping_factor=config.LM_DAMPING_FACTOR,
    )

    diffpnp_service = Factory(
        DiffPnPService,
        pnp_service=pnp_service,
        hessian_floor=config.HESSIAN_FLOOR,
    )

    pca_service = Factory(PcaService)
    loss_service = Factory(LossService)
    metrics_service = Factory(MetricsService)

    synth_service = Factory(
        SynthService,
        pca_service=pca_service,
        workers=config.WORKERS,
    )

    evaluation_service = Factory(
        EvaluationService,
        pnp_service=pnp_service,
        metrics_service=metrics_service,
        pca_service=pca_service,
        workers=config.WORKERS,
        weighted=weighted_pnp,
    )

    benchmark_service = Factory(
        BenchmarkService,
        diffpnp_service=diffpnp_service,
        loss_service=loss_service,
        pca_service=pca_service,
        metrics_service=metrics_service,
        workers=config.WORKERS,
    )

    audit_service = Factory(
        AuditService,
        pnp_service=pnp_service,
        diffpnp_service=diffpnp_service,
        loss_service=loss_service,
    )
