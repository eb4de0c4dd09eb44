import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from facepnp.core.domain.errors import DimensionMismatch
from facepnp.core.domain.geometry import EulerAngles, RigidPose
from facepnp.core.domain.report import SampleMetrics
from facepnp.core.domain.shape import CanonicalMesh
from facepnp.infrastructure.services.metrics import angle_difference
from facepnp.infrastructure.utils.geometry import compose, euler_to_pose


@pytest.fixture
def mesh():
    return CanonicalMesh(vertices=np.random.default_rng(0).uniform(-60, 60, size=(30, 3)))


class TestPoseMetrics:
    def test_add_of_pure_translation(self, metrics_service, mesh):
        gt = euler_to_pose(EulerAngles(yaw=20.0, pitch=5.0), (0.0, 0.0, 600.0))
        pred = RigidPose(rotation=gt.rotation, translation=tuple(gt.t + np.array([3.0, 0.0, 4.0])))
        assert metrics_service.add(pred, gt, mesh) == pytest.approx(5.0, abs=1e-12)

    def test_mae_r_zero_at_identity(self, metrics_service):
        assert metrics_service.mae_r(RigidPose(), RigidPose()) == 0.0

    def test_mae_r_symmetric(self, metrics_service):
        a = euler_to_pose(EulerAngles(yaw=10.0, pitch=-5.0, roll=3.0))
        b = euler_to_pose(EulerAngles(yaw=-20.0, pitch=15.0, roll=-7.0))
        assert metrics_service.mae_r(a, b) == pytest.approx(metrics_service.mae_r(b, a), abs=1e-12)
        assert metrics_service.mae_r(a, b) == pytest.approx((30.0 + 20.0 + 10.0) / 3.0)

    def test_mae_r_wraps_angles(self, metrics_service):
        a = euler_to_pose(EulerAngles(yaw=179.0))
        b = euler_to_pose(EulerAngles(yaw=-179.0))
        assert metrics_service.mae_r(a, b) == pytest.approx(2.0 / 3.0)

    def test_mae_t(self, metrics_service):
        pred = RigidPose(translation=(1.0, -2.0, 3.0))
        assert metrics_service.mae_t(pred, RigidPose()) == pytest.approx(2.0)

    def test_geodesic_distance(self, metrics_service):
        half_turn = euler_to_pose(EulerAngles(yaw=-180.0))
        assert metrics_service.geodesic_distance(half_turn, RigidPose()) == pytest.approx(np.pi)
        assert metrics_service.geodesic_distance(RigidPose(), RigidPose()) == 0.0

    def test_angle_difference(self):
        np.testing.assert_allclose(angle_difference([170.0, -90.0], [-170.0, 90.0]), [20.0, 180.0])


def random_poses(seed, count):
    rng = np.random.default_rng(seed)
    rotations = Rotation.random(count, random_state=seed)
    return [
        RigidPose.from_rotation(rotations[i], rng.uniform(-50.0, 50.0, 3) + [0.0, 0.0, 600.0])
        for i in range(count)
    ]


class TestInvariants:
    def test_symmetry(self, metrics_service, mesh):
        poses = random_poses(1, 20)
        for a, b in zip(poses[::2], poses[1::2]):
            assert metrics_service.add(a, b, mesh) == pytest.approx(metrics_service.add(b, a, mesh), abs=1e-12)
            assert metrics_service.mae_t(a, b) == pytest.approx(metrics_service.mae_t(b, a), abs=1e-12)
            assert metrics_service.geodesic_distance(a, b) == pytest.approx(
                metrics_service.geodesic_distance(b, a), abs=1e-12,
            )

    def test_left_invariance(self, metrics_service, mesh):
        poses = random_poses(2, 21)
        common = poses[-1]
        for a, b in zip(poses[:-1:2], poses[1:-1:2]):
            moved_a, moved_b = compose(common, a), compose(common, b)
            assert metrics_service.add(moved_a, moved_b, mesh) == pytest.approx(
                metrics_service.add(a, b, mesh), abs=1e-9,
            )
            assert metrics_service.geodesic_distance(moved_a, moved_b) == pytest.approx(
                metrics_service.geodesic_distance(a, b), abs=1e-9,
            )

    def test_geodesic_matches_quaternion_angle(self, metrics_service):
        poses = random_poses(3, 200)
        for a, b in zip(poses[::2], poses[1::2]):
            dot = abs(float(np.dot(a.rotation, b.rotation)))
            expected = 2.0 * np.arccos(min(dot, 1.0))
            assert metrics_service.geodesic_distance(a, b) == pytest.approx(expected, abs=1e-9)

    def test_geodesic_triangle_inequality(self, metrics_service):
        poses = random_poses(4, 150)
        for a, b, c in zip(poses[::3], poses[1::3], poses[2::3]):
            direct = metrics_service.geodesic_distance(a, c)
            assert direct <= metrics_service.geodesic_distance(a, b) + metrics_service.geodesic_distance(b, c) + 1e-9


class TestVertexErrorStats:
    def test_constant_offset(self, metrics_service, mesh):
        shifted = CanonicalMesh(vertices=mesh.vertices + np.array([0.0, 3.0, 4.0]))
        median, mean = metrics_service.vertex_error_stats(shifted, mesh)
        assert median == pytest.approx(5.0, abs=1e-12)
        assert mean == pytest.approx(5.0, abs=1e-12)

    def test_dimension_mismatch(self, metrics_service, mesh):
        with pytest.raises(DimensionMismatch):
            metrics_service.vertex_error_stats(CanonicalMesh(vertices=mesh.vertices[:-1]), mesh)


class TestEvaluate:
    def test_perfect_prediction(self, metrics_service, mesh):
        gt = euler_to_pose(EulerAngles(yaw=30.0), (0.0, 0.0, 500.0))
        metrics = metrics_service.evaluate(4, gt, gt, mesh, mesh)
        assert metrics.sample_id == 4
        assert metrics.add == 0.0
        assert metrics.mae_r == 0.0
        assert metrics.vertex_mean == 0.0

    def test_gimbal_lock_flag(self, metrics_service, mesh):
        locked = euler_to_pose(EulerAngles(pitch=90.0), (0.0, 0.0, 500.0))
        assert metrics_service.evaluate(0, locked, locked, mesh).gimbal_lock


class TestAggregate:
    def test_means_and_median(self, metrics_service):
        samples = [
            SampleMetrics(sample_id=2, mae_r=3.0, mae_t=3.0, add=3.0, geodesic=0.3, vertex_median=10.0, vertex_mean=3.0),
            SampleMetrics(sample_id=0, mae_r=1.0, mae_t=1.0, add=1.0, geodesic=0.1, vertex_median=1.0, vertex_mean=1.0),
            SampleMetrics(sample_id=1, mae_r=2.0, mae_t=2.0, add=2.0, geodesic=0.2, vertex_median=2.0, vertex_mean=2.0),
        ]
        report = metrics_service.aggregate(samples, failure_count=1)
        assert report.add == pytest.approx(2.0)
        assert report.mae_r == pytest.approx(2.0)
        assert report.geodesic == pytest.approx(0.2)
        assert report.vertex_median == 2.0
        assert report.vertex_mean == pytest.approx(2.0)
        assert report.sample_count == 3
        assert report.failure_count == 1

    def test_order_independent(self, metrics_service):
        samples = [
            SampleMetrics(sample_id=i, mae_r=0.1 * i, mae_t=0.3 * i, add=0.7 * i, geodesic=0.01 * i)
            for i in range(5)
        ]
        assert metrics_service.aggregate(samples) == metrics_service.aggregate(samples[::-1])

    def test_empty(self, metrics_service):
        with pytest.raises(ValueError):
            metrics_service.aggregate([])
