import numpy as np
import pytest
from pydantic import ValidationError

from facepnp.core.domain.errors import DegenerateLandmarks, NonPositiveDepth
from facepnp.core.domain.geometry import CameraIntrinsics, EulerAngles, RigidPose, Similarity2D
from facepnp.infrastructure.services.metrics import angle_difference
from facepnp.infrastructure.utils.geometry import (
    apply_warp,
    compose,
    estimate_frontalize_warp,
    euler_to_pose,
    invert,
    pose_to_euler,
    project,
    unwarp,
)
from facepnp.infrastructure.utils.rotations import geodesic_angle, local_coordinates, retract

CAM = CameraIntrinsics(fx=1000.0, fy=1000.0, cx=400.0, cy=400.0)


class TestRigidPose:
    def test_quaternion_is_normalized_with_positive_scalar(self):
        pose = RigidPose(rotation=(-2.0, 0.0, 0.0, 0.0))
        assert pose.rotation == (1.0, 0.0, 0.0, 0.0)

    def test_zero_quaternion_is_rejected(self):
        with pytest.raises(ValidationError):
            RigidPose(rotation=(0.0, 0.0, 0.0, 0.0))

    def test_non_finite_translation_is_rejected(self):
        with pytest.raises(ValidationError):
            RigidPose(translation=(0.0, float("nan"), 1.0))

    def test_unit_quaternion_is_kept_bit_exact(self):
        pose = euler_to_pose(EulerAngles(yaw=12.3, pitch=-4.5, roll=6.7))
        assert RigidPose(rotation=pose.rotation).rotation == pose.rotation


class TestCamera:
    def test_principal_point_outside_image_is_rejected(self):
        with pytest.raises(ValidationError):
            CameraIntrinsics(fx=800.0, fy=800.0, cx=900.0, cy=400.0)

    def test_non_positive_focal_is_rejected(self):
        with pytest.raises(ValidationError):
            CameraIntrinsics(fx=0.0, fy=800.0, cx=400.0, cy=400.0)


class TestProject:
    def test_optical_axis_projects_to_principal_point(self):
        pixels = project(np.array([[0.0, 0.0, 0.0]]), RigidPose(translation=(0.0, 0.0, 500.0)), CAM)
        np.testing.assert_allclose(pixels, [[400.0, 400.0]])

    def test_pinhole_formula(self):
        pixels = project(np.array([[50.0, -20.0, 0.0]]), RigidPose(translation=(0.0, 0.0, 500.0)), CAM)
        np.testing.assert_allclose(pixels, [[400.0 + 100.0, 400.0 - 40.0]])

    def test_point_behind_camera_raises(self):
        points = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, -600.0]])
        with pytest.raises(NonPositiveDepth) as info:
            project(points, RigidPose(translation=(0.0, 0.0, 500.0)), CAM)
        assert info.value.index == 1


class TestEuler:
    def test_round_trip(self):
        angles = EulerAngles(yaw=30.0, pitch=-20.0, roll=10.0)
        back = pose_to_euler(euler_to_pose(angles))
        np.testing.assert_allclose(back.as_array(), angles.as_array(), atol=1e-10)
        assert not back.gimbal_lock

    def test_round_trip_on_random_rotations(self):
        rng = np.random.default_rng(0)
        angles = np.column_stack([
            rng.uniform(-180.0, 180.0, 10_000),
            rng.uniform(-89.0, 89.0, 10_000),
            rng.uniform(-180.0, 180.0, 10_000),
        ])
        for yaw, pitch, roll in angles:
            pose = euler_to_pose(EulerAngles(yaw=yaw, pitch=pitch, roll=roll))
            back = pose_to_euler(pose)
            assert not back.gimbal_lock
            assert geodesic_angle(euler_to_pose(back).as_rotation(), pose.as_rotation()) < 1e-9
            assert np.max(angle_difference(back.as_array(), [yaw, pitch, roll])) < 1e-7

    def test_yaw_rotates_about_y(self):
        pose = euler_to_pose(EulerAngles(yaw=90.0))
        np.testing.assert_allclose(pose.transform(np.array([[0.0, 0.0, 1.0]])), [[1.0, 0.0, 0.0]], atol=1e-12)

    def test_gimbal_lock_is_flagged(self):
        angles = pose_to_euler(euler_to_pose(EulerAngles(yaw=10.0, pitch=90.0, roll=5.0)))
        assert angles.gimbal_lock
        assert angles.pitch == pytest.approx(90.0)

    def test_angles_are_wrapped(self):
        angles = pose_to_euler(euler_to_pose(EulerAngles(yaw=-180.0)))
        assert -180.0 <= angles.yaw < 180.0


class TestRigidAlgebra:
    def test_compose_with_inverse_is_identity(self):
        pose = euler_to_pose(EulerAngles(yaw=25.0, pitch=10.0, roll=-5.0), (10.0, -3.0, 600.0))
        identity = compose(pose, invert(pose))
        assert geodesic_angle(identity.as_rotation(), RigidPose().as_rotation()) < 1e-12
        np.testing.assert_allclose(identity.t, 0.0, atol=1e-9)

    def test_compose_applies_right_operand_first(self):
        a = RigidPose(translation=(1.0, 0.0, 0.0))
        b = euler_to_pose(EulerAngles(yaw=90.0))
        point = np.array([[0.0, 0.0, 1.0]])
        np.testing.assert_allclose(compose(a, b).transform(point), a.transform(b.transform(point)), atol=1e-12)

    def test_retract_and_local_coordinates_are_inverse(self):
        origin = euler_to_pose(EulerAngles(yaw=20.0, pitch=-10.0), (5.0, 5.0, 500.0))
        theta = np.array([0.01, -0.02, 0.03, 1.0, -2.0, 3.0])
        np.testing.assert_allclose(local_coordinates(origin, retract(origin, theta)), theta, atol=1e-12)


class TestWarp:
    def test_unwarp_inverts_apply_warp(self):
        warp = Similarity2D(scale=0.3, angle=0.4, tx=12.0, ty=-7.0)
        points = np.array([[100.0, 200.0], [350.0, 410.0], [0.0, 0.0]])
        np.testing.assert_allclose(unwarp(warp, apply_warp(warp, points)), points, atol=1e-10)

    def test_inverse_and_compose(self):
        warp = Similarity2D(scale=2.0, angle=-0.7, tx=3.0, ty=4.0)
        identity = warp.compose(warp.inverse())
        assert identity.scale == pytest.approx(1.0)
        assert identity.angle == pytest.approx(0.0, abs=1e-12)
        assert identity.tx == pytest.approx(0.0, abs=1e-12)
        assert identity.ty == pytest.approx(0.0, abs=1e-12)

    def test_from_matrix_round_trip(self):
        warp = Similarity2D(scale=1.5, angle=0.2, tx=1.0, ty=2.0)
        back = Similarity2D.from_matrix(warp.matrix())
        assert back.scale == pytest.approx(1.5)
        assert back.angle == pytest.approx(0.2)

    def test_frontalize_levels_the_eyes_and_fills_the_crop(self):
        landmarks = np.array([[300.0, 300.0], [400.0, 350.0], [320.0, 500.0], [420.0, 480.0]])
        warp = estimate_frontalize_warp(landmarks, 256, (0, 1), 0.8)
        cropped = apply_warp(warp, landmarks)
        assert cropped[0, 1] == pytest.approx(cropped[1, 1])
        extent = cropped.max(axis=0) - cropped.min(axis=0)
        assert extent.max() == pytest.approx(0.8 * 256)
        center = 0.5 * (cropped.max(axis=0) + cropped.min(axis=0))
        np.testing.assert_allclose(center, [128.0, 128.0], atol=1e-9)

    def test_frontalize_rejects_coincident_eyes(self):
        landmarks = np.array([[300.0, 300.0], [300.0, 300.0], [320.0, 500.0]])
        with pytest.raises(DegenerateLandmarks):
            estimate_frontalize_warp(landmarks, 256, (0, 1), 0.8)
