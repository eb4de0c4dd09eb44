import numpy as np
import pytest

from facepnp.core.domain.errors import (
    ChecksumMismatch,
    DimensionMismatch,
    InconsistentVertexCount,
    RankDeficient,
)
from facepnp.core.domain.scene import SceneConfig
from facepnp.core.domain.shape import CanonicalMesh, PcaCoeffs, PcaModel
from facepnp.infrastructure.repositories.pcamodelfs import PcaModelRepository


@pytest.fixture(scope="module")
def meshes(synth_service, scene_cfg):
    return synth_service.gen_shapes(scene_cfg)


class TestBuild:
    def test_orthonormal_basis(self, pca_service, meshes):
        model = pca_service.build(meshes, 10)
        np.testing.assert_allclose(model.basis.T @ model.basis, np.eye(10), atol=1e-9)
        assert model.k == 10
        assert model.n_vertices == meshes[0].n_vertices

    def test_scales_are_sorted_and_positive(self, pca_service, meshes):
        scales = pca_service.build(meshes, 10).component_scales
        assert np.all(scales > 0)
        assert np.all(np.diff(scales) <= 0)

    def test_sign_convention(self, pca_service, meshes):
        basis = pca_service.build(meshes, 5).basis
        pivots = np.argmax(np.abs(basis), axis=0)
        assert np.all(basis[pivots, np.arange(5)] > 0)

    def test_deterministic(self, pca_service, meshes):
        a, b = pca_service.build(meshes, 5), pca_service.build(meshes, 5)
        np.testing.assert_array_equal(a.basis, b.basis)

    def test_rank_deficient(self, pca_service, meshes):
        with pytest.raises(RankDeficient) as info:
            pca_service.build(meshes[:4], 4)
        assert info.value.rank == 3

    def test_inconsistent_vertex_count(self, pca_service, meshes):
        with pytest.raises(InconsistentVertexCount):
            pca_service.build([meshes[0], CanonicalMesh(vertices=meshes[1].vertices[:-1])], 1)

    @pytest.mark.parametrize("count, k", [(1, 1), (5, 0)])
    def test_invalid_arguments(self, pca_service, meshes, count, k):
        with pytest.raises(ValueError):
            pca_service.build(meshes[:count], k)


class TestFitReconstruct:
    def test_in_span_round_trip(self, pca_service, pca_model):
        coeffs = PcaCoeffs(values=np.random.default_rng(0).standard_normal(pca_model.k) * pca_model.component_scales)
        mesh = pca_service.reconstruct(pca_model, coeffs)
        back = pca_service.reconstruct(pca_model, pca_service.fit_coeffs(pca_model, mesh))
        assert np.max(np.linalg.norm(back.vertices - mesh.vertices, axis=1)) < 1e-9

    def test_out_of_span_residual_is_orthogonal(self, pca_service, pca_model):
        noise = np.random.default_rng(1).standard_normal(pca_model.mean.shape[0])
        mesh = CanonicalMesh.from_flat(pca_model.mean + noise)
        coeffs = pca_service.fit_coeffs(pca_model, mesh)
        residual = mesh.flat() - pca_service.reconstruct(pca_model, coeffs).flat()
        np.testing.assert_allclose(pca_model.basis.T @ residual, 0.0, atol=1e-9)

    def test_truncation_error_never_grows_with_k(self, pca_service, pca_model):
        noise = np.random.default_rng(2).standard_normal(pca_model.mean.shape[0])
        mesh = CanonicalMesh.from_flat(pca_model.mean + pca_model.basis @ pca_model.component_scales + noise)
        errors = []
        for k in range(1, pca_model.k + 1):
            truncated = PcaModel(
                mean=pca_model.mean, basis=pca_model.basis[:, :k], component_scales=pca_model.component_scales[:k],
            )
            back = pca_service.reconstruct(truncated, pca_service.fit_coeffs(truncated, mesh))
            errors.append(np.linalg.norm(back.flat() - mesh.flat()))
        assert np.all(np.diff(errors) <= 1e-12)

    def test_recovers_generating_coefficients(self, pca_service, pca_model, dataset):
        for sample in dataset.samples:
            fitted = pca_service.fit_coeffs(pca_model, sample.mesh)
            np.testing.assert_allclose(fitted.values, sample.coeffs.values, atol=1e-9)

    def test_mean_has_zero_coefficients(self, pca_service, pca_model):
        coeffs = pca_service.fit_coeffs(pca_model, pca_model.mean_mesh())
        np.testing.assert_allclose(coeffs.values, 0.0, atol=1e-9)

    def test_reconstruct_dimension_mismatch(self, pca_service, pca_model):
        with pytest.raises(DimensionMismatch):
            pca_service.reconstruct(pca_model, PcaCoeffs(values=np.zeros(pca_model.k + 1)))

    def test_fit_vertex_mismatch(self, pca_service, pca_model):
        with pytest.raises(InconsistentVertexCount):
            pca_service.fit_coeffs(pca_model, CanonicalMesh(vertices=np.zeros((3, 3))))


class TestWpdcWeights:
    def test_normalized_to_k(self, pca_service, pca_model):
        weights = pca_service.wpdc_weights(pca_model)
        assert weights.values.sum() == pytest.approx(pca_model.k)
        np.testing.assert_allclose(weights.values / pca_model.component_scales, pca_model.k / pca_model.component_scales.sum())


class TestPcaModelRepository:
    def test_round_trip_is_bit_exact(self, pca_model, tmp_path):
        repository = PcaModelRepository()
        repository.save(tmp_path / "pca_model.bin", pca_model)
        loaded = repository.load(tmp_path / "pca_model.bin")
        np.testing.assert_array_equal(loaded.mean, pca_model.mean)
        np.testing.assert_array_equal(loaded.basis, pca_model.basis)
        np.testing.assert_array_equal(loaded.component_scales, pca_model.component_scales)

    def test_corrupted_payload(self, pca_model, tmp_path):
        repository = PcaModelRepository()
        path = tmp_path / "pca_model.bin"
        repository.save(path, pca_model)
        content = bytearray(path.read_bytes())
        content[-1] ^= 0xFF
        path.write_bytes(bytes(content))
        with pytest.raises(ChecksumMismatch):
            repository.load(path)


def test_full_size_shape_space(synth_service):
    cfg = SceneConfig(seed=1, n_vertices=120, n_shapes=251, k=250, n_samples=0, bump_width=10.0)
    model, meshes = synth_service.gen_shape_space(cfg)
    assert len(meshes) == 251
    np.testing.assert_allclose(model.basis.T @ model.basis, np.eye(250), atol=1e-9)
