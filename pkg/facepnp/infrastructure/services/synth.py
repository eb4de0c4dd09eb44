"""A module containing the synthetic scene generator implementation.

Every random draw comes from a generator seeded by (seed, stream key), so
the output is a pure function of the configuration and does not depend on
the order in which samples are produced.
"""

import logging
from typing import List, Tuple

import numpy as np

from facepnp.core.domain.errors import NonPositiveDepth, RankDeficient, UnprojectableScene
from facepnp.core.domain.geometry import CameraIntrinsics, EulerAngles
from facepnp.core.domain.scene import SceneConfig, SyntheticSample
from facepnp.core.domain.shape import CanonicalMesh, PcaCoeffs, PcaModel
from facepnp.infrastructure.services.ipca import IPcaService
from facepnp.infrastructure.services.isynth import ISynthService
from facepnp.infrastructure.utils.geometry import estimate_frontalize_warp, euler_to_pose, project
from facepnp.infrastructure.utils.pool import ordered_map

logger = logging.getLogger(__name__)

SHAPE_STREAM = 2 ** 31
MAX_SHAPE_ATTEMPTS = 5
MAX_POSE_ATTEMPTS = 100

# semi-axes of the base head surface (mm)
HEAD_AXES = np.array([75.0, 95.0, 60.0])
EYE_CORNER_X = 32.0
EYE_CORNER_Y = -25.0


def base_face(n_vertices: int, eye_indices: Tuple[int, int] = (0, 1)) -> np.ndarray:
    """Deterministic face-like vertex cloud on the camera-facing half of an ellipsoid.

    The two eye-corner vertices sit symmetrically at x = -/+ EYE_CORNER_X
    (image y grows downwards, so the eyes are at negative y); the rest
    follow a Fibonacci lattice on the front cap.
    """
    remaining = n_vertices - 2
    i = np.arange(remaining) + 0.5
    polar = np.arccos(1.0 - i / remaining)
    azimuth = np.pi * (1.0 + np.sqrt(5.0)) * i
    directions = np.column_stack([
        np.sin(polar) * np.cos(azimuth),
        np.sin(polar) * np.sin(azimuth),
        -np.cos(polar),
    ])
    lattice = directions * HEAD_AXES

    eyes = []
    for x in (-EYE_CORNER_X, EYE_CORNER_X):
        xy = np.array([x, EYE_CORNER_Y]) / HEAD_AXES[:2]
        z = -HEAD_AXES[2] * np.sqrt(max(1.0 - float(xy @ xy), 0.0))
        eyes.append([x, EYE_CORNER_Y, z])

    vertices = np.empty((n_vertices, 3))
    others = [j for j in range(n_vertices) if j not in eye_indices]
    vertices[others] = lattice
    vertices[list(eye_indices)] = eyes
    return vertices


class SynthService(ISynthService):
    """A class implementing the synthetic scene generator."""

    _pca_service: IPcaService

    def __init__(self, pca_service: IPcaService, workers: int = 1) -> None:
        """The initializer of the generator.

        Args:
            pca_service (IPcaService): Builds the shape space.
            workers (int): Thread pool size used by `gen_dataset`.
        """
        self._pca_service = pca_service
        self._workers = workers

    def gen_shapes(self, cfg: SceneConfig, attempt: int = 0) -> List[CanonicalMesh]:
        """Base face plus `bumps_per_shape` Gaussian bumps per mesh.

        Args:
            cfg (SceneConfig): The scene configuration.
            attempt (int): Sub-seed of the retry loop.

        Returns:
            List[CanonicalMesh]: `cfg.n_shapes` meshes.
        """
        rng = np.random.default_rng([cfg.seed, SHAPE_STREAM, attempt])
        base = base_face(cfg.n_vertices, cfg.eye_indices)
        meshes = []
        for _ in range(cfg.n_shapes):
            centers = base[rng.integers(0, cfg.n_vertices, size=cfg.bumps_per_shape)]
            offsets = rng.standard_normal((cfg.bumps_per_shape, 3)) * cfg.deformation_scale
            squared = np.sum((base[:, None, :] - centers[None, :, :]) ** 2, axis=2)
            falloff = np.exp(-squared / (2.0 * cfg.bump_width ** 2))
            meshes.append(CanonicalMesh(vertices=base + falloff @ offsets))
        return meshes

    def gen_shape_space(self, cfg: SceneConfig) -> Tuple[PcaModel, List[CanonicalMesh]]:
        """A method fabricating a shape collection and its PCA model.

        Raises:
            RankDeficient: If every attempt produced a collection of rank < k.
        """
        error = None
        for attempt in range(MAX_SHAPE_ATTEMPTS):
            meshes = self.gen_shapes(cfg, attempt)
            try:
                return self._pca_service.build(meshes, cfg.k), meshes
            except RankDeficient as e:
                logger.warning("Shape collection attempt %d is rank deficient: %s", attempt, e)
                error = e
        raise error

    def _sample_camera(self, cfg: SceneConfig, rng: np.random.Generator) -> CameraIntrinsics:
        focal = rng.uniform(*cfg.focal_range)
        jitter = rng.uniform(-cfg.principal_jitter, cfg.principal_jitter, size=2)
        center = 0.5 * cfg.image_size + jitter
        return CameraIntrinsics(
            fx=focal,
            fy=focal,
            cx=float(center[0]),
            cy=float(center[1]),
            width=cfg.image_size,
            height=cfg.image_size,
        )

    def gen_sample(self, model: PcaModel, cfg: SceneConfig, index: int) -> SyntheticSample:
        """A method generating one supervised scene.

        Coefficients are zero-mean Gaussian scaled by the component scales;
        the pose is uniform in the configured ranges and resampled until
        every vertex projects inside the frame. A random subset of
        `occlusion_fraction * N` landmarks gets its sigma inflated.

        Raises:
            UnprojectableScene: If no pose kept the mesh in the frame.
        """
        rng = np.random.default_rng([cfg.seed, index])
        coeffs = PcaCoeffs(values=rng.standard_normal(model.k) * model.component_scales)
        mesh = CanonicalMesh.from_flat(model.mean + model.basis @ coeffs.values)
        cam = self._sample_camera(cfg, rng)

        for _ in range(MAX_POSE_ATTEMPTS):
            angles = EulerAngles(
                yaw=rng.uniform(*cfg.yaw_range),
                pitch=rng.uniform(*cfg.pitch_range),
                roll=rng.uniform(*cfg.roll_range),
            )
            translation = (
                rng.uniform(*cfg.tx_range),
                rng.uniform(*cfg.ty_range),
                rng.uniform(*cfg.tz_range),
            )
            pose = euler_to_pose(angles, translation)
            try:
                clean = project(mesh.vertices, pose, cam)
            except NonPositiveDepth:
                continue
            if np.all((clean >= 0) & (clean < cfg.image_size)):
                break
        else:
            raise UnprojectableScene(
                f"Sample {index}: no pose in {MAX_POSE_ATTEMPTS} draws kept the mesh inside the frame"
            )

        n = mesh.n_vertices
        sigmas = np.full(n, cfg.noise.base_sigma)
        occluded = rng.choice(n, size=int(round(cfg.noise.occlusion_fraction * n)), replace=False)
        sigmas[occluded] *= cfg.noise.occlusion_multiplier
        noisy = clean + rng.standard_normal((n, 2)) * sigmas[:, None]
        warp = estimate_frontalize_warp(noisy, cfg.crop_size, cfg.eye_indices, cfg.crop_fill)

        return SyntheticSample(
            sample_id=index,
            pose=pose,
            coeffs=coeffs,
            mesh=mesh,
            cam=cam,
            clean_landmarks=clean,
            noisy_landmarks=noisy,
            sigmas=sigmas,
            warp=warp,
        )

    def gen_dataset(self, model: PcaModel, cfg: SceneConfig) -> List[SyntheticSample]:
        """A method generating `cfg.n_samples` scenes ordered by index."""
        samples = ordered_map(lambda i: self.gen_sample(model, cfg, i), range(cfg.n_samples), self._workers)
        logger.info("Generated %d synthetic samples (seed=%d)", len(samples), cfg.seed)
        return samples
