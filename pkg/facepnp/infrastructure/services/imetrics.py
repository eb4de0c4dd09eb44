"""A module containing the evaluation metrics service interface."""

from abc import ABC, abstractmethod
from typing import Optional, Sequence, Tuple

from facepnp.core.domain.geometry import RigidPose
from facepnp.core.domain.report import EvalReport, SampleMetrics
from facepnp.core.domain.shape import CanonicalMesh


class IMetricsService(ABC):
    """An abstract class for the evaluation metrics service."""

    @abstractmethod
    def mae_r(self, pred: RigidPose, gt: RigidPose) -> float:
        """Mean absolute yaw/pitch/roll error in degrees."""

    @abstractmethod
    def mae_t(self, pred: RigidPose, gt: RigidPose) -> float:
        """Mean absolute translation component error in mm."""

    @abstractmethod
    def add(self, pred: RigidPose, gt: RigidPose, mesh_gt: CanonicalMesh) -> float:
        """Mean per-vertex distance of the ground-truth mesh under both poses (mm)."""

    @abstractmethod
    def geodesic_distance(self, pred: RigidPose, gt: RigidPose) -> float:
        """Angle of the relative rotation in radians."""

    @abstractmethod
    def vertex_error_stats(self, pred: CanonicalMesh, gt: CanonicalMesh) -> Tuple[float, float]:
        """Median and mean per-vertex Euclidean error (mm)."""

    @abstractmethod
    def evaluate(
        self,
        sample_id: int,
        pred: RigidPose,
        gt: RigidPose,
        mesh_gt: CanonicalMesh,
        mesh_pred: Optional[CanonicalMesh] = None,
    ) -> SampleMetrics:
        """All metrics of one sample.

        Args:
            sample_id (int): Identifier of the sample.
            pred (RigidPose): Predicted pose.
            gt (RigidPose): Ground-truth pose.
            mesh_gt (CanonicalMesh): Ground-truth canonical mesh.
            mesh_pred (Optional[CanonicalMesh]): Predicted mesh; the vertex
                statistics are zero when absent.

        Returns:
            SampleMetrics: The per-sample metrics.
        """

    @abstractmethod
    def aggregate(self, samples: Sequence[SampleMetrics], failure_count: int = 0) -> EvalReport:
        """Aggregate per-sample metrics into a report.

        Args:
            samples (Sequence[SampleMetrics]): At least one sample.
            failure_count (int): Samples that could not be evaluated.

        Returns:
            EvalReport: Means of the metrics, median of the vertex medians.
        """
