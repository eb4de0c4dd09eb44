"""A module containing the gradient audit service implementation."""

import logging
from typing import Callable, Dict, List

import numpy as np

from facepnp.core.domain.errors import FacePnPError
from facepnp.core.domain.geometry import CameraIntrinsics, EulerAngles
from facepnp.core.domain.losses import WpdcWeights
from facepnp.core.domain.pnp import PnPProblem
from facepnp.core.domain.report import GradAuditReport, GradAuditRow
from facepnp.core.domain.shape import CanonicalMesh, LandmarkSet, PcaCoeffs
from facepnp.infrastructure.services.iaudit import IAuditService
from facepnp.infrastructure.services.idiffpnp import IDiffPnPService
from facepnp.infrastructure.services.iloss import ILossService
from facepnp.infrastructure.services.ipnp import IPnPService
from facepnp.infrastructure.utils.geometry import euler_to_pose, project
from facepnp.infrastructure.utils.numdiff import central_difference_jacobian, relative_error
from facepnp.infrastructure.utils.rotations import local_coordinates, retract

logger = logging.getLogger(__name__)

AUDIT_THRESHOLDS: Dict[str, float] = {
    "gnll": 1e-6,
    "vdc": 1e-6,
    "wpdc": 1e-6,
    "pnp_loss": 1e-4,
    "pnp_backward_ift": 1e-4,
    "reprojection_jacobian": 1e-6,
}

AUDIT_POINTS = 12


class AuditScene:
    """A small random PnP scene with heteroscedastic landmark noise."""

    def __init__(self, rng: np.random.Generator, n_points: int = AUDIT_POINTS) -> None:
        self.points3 = rng.uniform(-60.0, 60.0, size=(n_points, 3))
        self.pose = euler_to_pose(
            EulerAngles(
                yaw=rng.uniform(-40.0, 40.0),
                pitch=rng.uniform(-20.0, 20.0),
                roll=rng.uniform(-20.0, 20.0),
            ),
            (rng.uniform(-30.0, 30.0), rng.uniform(-30.0, 30.0), rng.uniform(400.0, 800.0)),
        )
        focal = rng.uniform(600.0, 1600.0)
        self.cam = CameraIntrinsics(fx=focal, fy=focal, cx=400.0, cy=400.0)
        self.sigmas = rng.uniform(0.5, 3.0, size=n_points)
        self.clean = project(self.points3, self.pose, self.cam)
        self.noisy = self.clean + rng.standard_normal((n_points, 2)) * self.sigmas[:, None]

    def problem(self) -> PnPProblem:
        """The weighted problem of the noisy landmarks."""
        return PnPProblem(points3=self.points3, points2=self.noisy, sigmas=self.sigmas, cam=self.cam)


class AuditService(IAuditService):
    """A class implementing the finite-difference gradient audit."""

    def __init__(
        self,
        pnp_service: IPnPService,
        diffpnp_service: IDiffPnPService,
        loss_service: ILossService,
    ) -> None:
        self._pnp_service = pnp_service
        self._diffpnp_service = diffpnp_service
        self._loss_service = loss_service

    def _gnll_error(self, rng: np.random.Generator) -> float:
        n = 10
        gt = rng.uniform(0.0, 800.0, size=(n, 2))
        mu = gt + rng.standard_normal((n, 2)) * 3.0
        log_sigma = rng.uniform(-1.0, 1.5, size=n)

        def value(x: np.ndarray) -> float:
            return self._loss_service.gnll(LandmarkSet(mu=x[:2 * n].reshape(n, 2), log_sigma=x[2 * n:]), gt).value

        loss = self._loss_service.gnll(LandmarkSet(mu=mu, log_sigma=log_sigma), gt)
        analytic = np.concatenate([loss.gradients["mu"].reshape(-1), loss.gradients["log_sigma"]])
        numeric = central_difference_jacobian(value, np.concatenate([mu.reshape(-1), log_sigma]), 1e-6)
        return relative_error(analytic, numeric[0])

    def _vdc_error(self, rng: np.random.Generator) -> float:
        n = 10
        gt = CanonicalMesh(vertices=rng.uniform(-60.0, 60.0, size=(n, 3)))
        pred = gt.vertices + rng.standard_normal((n, 3)) * 2.0

        def value(x: np.ndarray) -> float:
            return self._loss_service.vdc(CanonicalMesh.from_flat(x), gt).value

        analytic = self._loss_service.vdc(CanonicalMesh(vertices=pred), gt).gradients["vertices"]
        numeric = central_difference_jacobian(value, pred.reshape(-1), 1e-3)
        return relative_error(analytic.reshape(-1), numeric[0])

    def _wpdc_error(self, rng: np.random.Generator) -> float:
        k = 8
        raw = rng.uniform(0.1, 2.0, size=k)
        weights = WpdcWeights(values=raw * k / raw.sum())
        gt = PcaCoeffs(values=rng.standard_normal(k) * 5.0)
        pred = gt.values + rng.standard_normal(k)

        def value(x: np.ndarray) -> float:
            return self._loss_service.wpdc(PcaCoeffs(values=x), gt, weights).value

        analytic = self._loss_service.wpdc(PcaCoeffs(values=pred), gt, weights).gradients["coeffs"]
        numeric = central_difference_jacobian(value, pred, 1e-3)
        return relative_error(analytic, numeric[0])

    def _reprojection_error(self, rng: np.random.Generator) -> float:
        scene = AuditScene(rng)
        problem = scene.problem()
        pose = retract(scene.pose, rng.standard_normal(6) * np.array([0.02, 0.02, 0.02, 2.0, 2.0, 5.0]))

        def residuals(theta: np.ndarray) -> np.ndarray:
            return self._pnp_service.residuals(problem, retract(pose, theta))[0]

        _, analytic = self._pnp_service.residuals(problem, pose)
        numeric = central_difference_jacobian(residuals, np.zeros(6), 1e-6)
        return relative_error(analytic, numeric)

    def _ift_error(self, rng: np.random.Generator) -> float:
        scene = AuditScene(rng)
        problem = scene.problem()
        n = problem.n_points
        solution = self._diffpnp_service.forward(problem)
        gradients = self._diffpnp_service.backward(problem, solution, with_sigmas=True)

        def resolved(changed: PnPProblem) -> np.ndarray:
            refined = self._pnp_service.solve_lm(changed, solution.pose)
            return local_coordinates(solution.pose, refined.pose)

        numeric = np.hstack([
            central_difference_jacobian(
                lambda x: resolved(problem.replace(points2=x.reshape(n, 2))), problem.points2.reshape(-1), 1e-4
            ),
            central_difference_jacobian(
                lambda x: resolved(problem.replace(points3=x.reshape(n, 3))), problem.points3.reshape(-1), 1e-4
            ),
            central_difference_jacobian(
                lambda x: resolved(problem.replace(sigmas=x)), problem.sigmas, 1e-5
            ),
        ])
        analytic = np.hstack([gradients.d_points2, gradients.d_points3, gradients.d_sigmas])
        return relative_error(analytic, numeric)

    def _pnp_loss_error(self, rng: np.random.Generator) -> float:
        scene = AuditScene(rng)
        n = AUDIT_POINTS
        mesh_gt = CanonicalMesh(vertices=scene.points3)
        mesh_pred = scene.points3 + rng.standard_normal((n, 3)) * 2.0
        log_sigma = np.log(scene.sigmas)

        def value(x: np.ndarray) -> float:
            landmarks = LandmarkSet(mu=x[:2 * n].reshape(n, 2), log_sigma=log_sigma)
            loss, _ = self._diffpnp_service.pnp_loss(
                landmarks, CanonicalMesh.from_flat(x[2 * n:]), mesh_gt, scene.pose, scene.cam,
            )
            return loss.value

        loss, _ = self._diffpnp_service.pnp_loss(
            LandmarkSet(mu=scene.noisy, log_sigma=log_sigma),
            CanonicalMesh(vertices=mesh_pred),
            mesh_gt,
            scene.pose,
            scene.cam,
        )
        analytic = np.concatenate([loss.gradients["mu"].reshape(-1), loss.gradients["vertices"].reshape(-1)])
        numeric = central_difference_jacobian(
            value, np.concatenate([scene.noisy.reshape(-1), mesh_pred.reshape(-1)]), 1e-4
        )
        return relative_error(analytic, numeric[0])

    def run_grad_audit(self, seed: int, n_instances: int) -> GradAuditReport:
        """A method checking every analytic gradient against central differences.

        An instance whose solver raises counts as an infinite error.

        Raises:
            ValueError: If n_instances is negative.
        """
        if n_instances < 0:
            raise ValueError("n_instances must be non-negative")
        if n_instances == 0:
            return GradAuditReport(seed=seed, rows=[])

        checks: Dict[str, Callable[[np.random.Generator], float]] = {
            "gnll": self._gnll_error,
            "vdc": self._vdc_error,
            "wpdc": self._wpdc_error,
            "pnp_loss": self._pnp_loss_error,
            "pnp_backward_ift": self._ift_error,
            "reprojection_jacobian": self._reprojection_error,
        }
        rows: List[GradAuditRow] = []
        for op_index, (op, check) in enumerate(checks.items()):
            errors = []
            for instance in range(n_instances):
                rng = np.random.default_rng([seed, op_index, instance])
                try:
                    errors.append(check(rng))
                except FacePnPError as e:
                    logger.warning("Audit of %s, instance %d raised %s", op, instance, e)
                    errors.append(float("inf"))
            worst = float(max(errors))
            threshold = AUDIT_THRESHOLDS[op]
            rows.append(GradAuditRow(
                op=op,
                max_rel_error=worst,
                threshold=threshold,
                n_instances=n_instances,
                passed=worst <= threshold,
            ))
            logger.info("Audit %s: max relative error %.3g (threshold %.0e)", op, worst, threshold)
        return GradAuditReport(seed=seed, rows=rows)
