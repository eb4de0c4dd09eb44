import numpy as np
import pytest
from pydantic import ValidationError

from facepnp.core.domain.errors import DimensionMismatch
from facepnp.core.domain.losses import LossValue, TotalLossConfig, WpdcWeights
from facepnp.core.domain.shape import CanonicalMesh, LandmarkSet, PcaCoeffs
from facepnp.infrastructure.utils.numdiff import central_difference_jacobian, relative_error


@pytest.fixture
def rng():
    return np.random.default_rng(3)


class TestGnll:
    def test_unit_sigma_is_half_squared_error(self, loss_service, rng):
        gt = rng.uniform(0, 800, size=(15, 2))
        mu = gt + rng.standard_normal((15, 2))
        loss = loss_service.gnll(LandmarkSet.unit(mu), gt)
        assert loss.value == pytest.approx(0.5 * np.sum((mu - gt) ** 2), rel=1e-12)

    def test_formula(self, loss_service):
        landmarks = LandmarkSet.from_sigma([[3.0, 4.0]], [2.0])
        loss = loss_service.gnll(landmarks, [[0.0, 0.0]])
        assert loss.value == pytest.approx(np.log(4.0) + 25.0 / 8.0)

    def test_sigma_gradient_vanishes_at_calibrated_sigma(self, loss_service):
        error = np.array([[3.0, 4.0]])
        landmarks = LandmarkSet.from_sigma(error, [np.sqrt(25.0 / 2.0)])
        loss = loss_service.gnll(landmarks, [[0.0, 0.0]])
        assert loss.gradients["log_sigma"][0] == pytest.approx(0.0, abs=1e-12)

    def test_gradients_match_finite_differences(self, loss_service, rng):
        n = 8
        gt = rng.uniform(0, 800, size=(n, 2))
        mu = gt + rng.standard_normal((n, 2)) * 3.0
        log_sigma = rng.uniform(-1.0, 1.5, size=n)
        loss = loss_service.gnll(LandmarkSet(mu=mu, log_sigma=log_sigma), gt)

        def value(x):
            return loss_service.gnll(LandmarkSet(mu=x[:2 * n].reshape(n, 2), log_sigma=x[2 * n:]), gt).value

        numeric = central_difference_jacobian(value, np.concatenate([mu.reshape(-1), log_sigma]), 1e-6)
        analytic = np.concatenate([loss.gradients["mu"].reshape(-1), loss.gradients["log_sigma"]])
        assert relative_error(analytic, numeric[0]) < 1e-6

    def test_dimension_mismatch(self, loss_service):
        with pytest.raises(DimensionMismatch):
            loss_service.gnll(LandmarkSet.unit(np.zeros((3, 2))), np.zeros((4, 2)))

    def test_non_positive_sigma_is_rejected(self):
        with pytest.raises(ValueError):
            LandmarkSet.from_sigma(np.zeros((1, 2)), [0.0])


class TestVdc:
    def test_constant_offset(self, loss_service, rng):
        gt = CanonicalMesh(vertices=rng.uniform(-50, 50, size=(20, 3)))
        pred = CanonicalMesh(vertices=gt.vertices + np.array([1.0, 2.0, 2.0]))
        assert loss_service.vdc(pred, gt).value == pytest.approx(9.0)

    def test_gradient_is_scaled_difference(self, loss_service, rng):
        gt = CanonicalMesh(vertices=rng.uniform(-50, 50, size=(10, 3)))
        pred = CanonicalMesh(vertices=gt.vertices + rng.standard_normal((10, 3)))
        loss = loss_service.vdc(pred, gt)
        np.testing.assert_allclose(loss.gradients["vertices"], 2.0 * (pred.vertices - gt.vertices) / 10)

    def test_dimension_mismatch(self, loss_service):
        with pytest.raises(DimensionMismatch):
            loss_service.vdc(CanonicalMesh(vertices=np.zeros((3, 3))), CanonicalMesh(vertices=np.zeros((4, 3))))


class TestWpdc:
    def test_value_and_gradient(self, loss_service):
        weights = WpdcWeights(values=[0.5, 1.5])
        loss = loss_service.wpdc(PcaCoeffs(values=[1.0, 1.0]), PcaCoeffs(values=[0.0, 2.0]), weights)
        assert loss.value == pytest.approx(0.25 + 2.25)
        np.testing.assert_allclose(loss.gradients["coeffs"], [2 * 0.25 * 1.0, 2 * 2.25 * -1.0])

    def test_weights_must_sum_to_k(self):
        with pytest.raises(ValidationError):
            WpdcWeights(values=[1.0, 2.0])

    def test_dimension_mismatch(self, loss_service):
        with pytest.raises(DimensionMismatch):
            loss_service.wpdc(PcaCoeffs(values=[1.0]), PcaCoeffs(values=[1.0, 2.0]), WpdcWeights.uniform(2))


class TestTotalLoss:
    def test_weighted_sum_merges_gradients(self, loss_service):
        cfg = TotalLossConfig(lambda_gnll=2.0, lambda_vdc=3.0, lambda_wpdc=0.0, lambda_pnp=5.0)
        parts = {
            "gnll": LossValue(value=1.0, gradients={"mu": np.ones((2, 2))}),
            "vdc": LossValue(value=2.0, gradients={"vertices": np.ones((2, 3))}),
            "pnp": LossValue(value=0.5, gradients={"mu": np.ones((2, 2)), "vertices": np.ones((2, 3))}),
        }
        total = loss_service.total_loss(parts, cfg)
        assert total.value == pytest.approx(2.0 + 6.0 + 2.5)
        np.testing.assert_allclose(total.gradients["mu"], 7.0)
        np.testing.assert_allclose(total.gradients["vertices"], 8.0)

    def test_unknown_part(self, loss_service):
        with pytest.raises(ValueError):
            loss_service.total_loss({"l1": LossValue(value=1.0)}, TotalLossConfig())

    def test_default_weights(self):
        assert TotalLossConfig().as_dict() == {"gnll": 0.01, "vdc": 20.0, "wpdc": 10.0, "pnp": 2.0}
