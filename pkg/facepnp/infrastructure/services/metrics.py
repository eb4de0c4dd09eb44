"""A module containing the evaluation metrics service implementation."""

from typing import Optional, Sequence, Tuple

import numpy as np

from facepnp.core.domain.errors import DimensionMismatch
from facepnp.core.domain.geometry import RigidPose
from facepnp.core.domain.report import EvalReport, SampleMetrics
from facepnp.core.domain.shape import CanonicalMesh
from facepnp.infrastructure.services.imetrics import IMetricsService
from facepnp.infrastructure.utils.geometry import pose_to_euler


def angle_difference(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Smallest absolute difference of angles on the circle (deg)."""
    return np.abs((np.asarray(a) - np.asarray(b) + 180.0) % 360.0 - 180.0)


class MetricsService(IMetricsService):
    """A class implementing the pose and reconstruction metrics."""

    def euler_errors(self, pred: RigidPose, gt: RigidPose) -> Tuple[np.ndarray, bool]:
        """Wrapped |d yaw|, |d pitch|, |d roll| and whether either pose is in gimbal lock."""
        pred_angles, gt_angles = pose_to_euler(pred), pose_to_euler(gt)
        errors = angle_difference(pred_angles.as_array(), gt_angles.as_array())
        return errors, pred_angles.gimbal_lock or gt_angles.gimbal_lock

    def mae_r(self, pred: RigidPose, gt: RigidPose) -> float:
        """Mean wrapped absolute error of yaw, pitch and roll (deg)."""
        errors, _ = self.euler_errors(pred, gt)
        return float(errors.mean())

    def mae_t(self, pred: RigidPose, gt: RigidPose) -> float:
        """Mean absolute error of the x, y and z translation components (mm)."""
        return float(np.mean(np.abs(pred.t - gt.t)))

    def add(self, pred: RigidPose, gt: RigidPose, mesh_gt: CanonicalMesh) -> float:
        """Mean distance between the ground-truth mesh posed by `gt` and by `pred`.

        Args:
            pred (RigidPose): The predicted pose.
            gt (RigidPose): The ground-truth pose.
            mesh_gt (CanonicalMesh): The ground-truth canonical mesh.

        Returns:
            float: ADD in mm.
        """
        distances = np.linalg.norm(gt.transform(mesh_gt.vertices) - pred.transform(mesh_gt.vertices), axis=1)
        return float(distances.mean())

    def geodesic_distance(self, pred: RigidPose, gt: RigidPose) -> float:
        """Angle of the relative rotation, arccos((tr(R_pred^T R_gt) - 1) / 2), in radians."""
        cosine = (np.trace(pred.rotation_matrix().T @ gt.rotation_matrix()) - 1.0) / 2.0
        return float(np.arccos(np.clip(cosine, -1.0, 1.0)))

    def vertex_error_stats(self, pred: CanonicalMesh, gt: CanonicalMesh) -> Tuple[float, float]:
        """Median and mean per-vertex Euclidean error (mm).

        Raises:
            DimensionMismatch: If the vertex counts differ.
        """
        if pred.n_vertices != gt.n_vertices:
            raise DimensionMismatch(f"{pred.n_vertices} predicted vertices but {gt.n_vertices} targets")
        distances = np.linalg.norm(pred.vertices - gt.vertices, axis=1)
        return float(np.median(distances)), float(distances.mean())

    def evaluate(
        self,
        sample_id: int,
        pred: RigidPose,
        gt: RigidPose,
        mesh_gt: CanonicalMesh,
        mesh_pred: Optional[CanonicalMesh] = None,
    ) -> SampleMetrics:
        """A method scoring one predicted pose, and optionally a predicted mesh.

        Vertex errors are 0 when `mesh_pred` is None.
        """
        euler, gimbal_lock = self.euler_errors(pred, gt)
        median, mean = (0.0, 0.0) if mesh_pred is None else self.vertex_error_stats(mesh_pred, mesh_gt)
        return SampleMetrics(
            sample_id=sample_id,
            mae_r=float(euler.mean()),
            mae_t=self.mae_t(pred, gt),
            add=self.add(pred, gt, mesh_gt),
            geodesic=self.geodesic_distance(pred, gt),
            vertex_median=median,
            vertex_mean=mean,
            gimbal_lock=gimbal_lock,
        )

    def aggregate(self, samples: Sequence[SampleMetrics], failure_count: int = 0) -> EvalReport:
        """Aggregate per-sample metrics into a report.

        Raises:
            ValueError: If there is no sample.
        """
        if not samples:
            raise ValueError("cannot aggregate an empty sample list")
        ordered = sorted(samples, key=lambda sample: sample.sample_id)

        def column(name: str) -> np.ndarray:
            return np.array([getattr(sample, name) for sample in ordered])

        return EvalReport(
            mae_r=float(column("mae_r").mean()),
            mae_t=float(column("mae_t").mean()),
            add=float(column("add").mean()),
            geodesic=float(column("geodesic").mean()),
            vertex_median=float(np.median(column("vertex_median"))),
            vertex_mean=float(column("vertex_mean").mean()),
            sample_count=len(ordered),
            failure_count=failure_count,
        )
