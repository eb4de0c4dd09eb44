"""Module containing the differentiable PnP layer.

The solved pose theta* satisfies the stationarity condition
g(theta*, q) = J^T r = 0 of the half cost (1/2) sum r^2, so by the implicit
function theorem d theta*/d q = -H^-1 dg/dq with H = dg/d theta.
"""

import logging
from typing import Literal, Tuple

import numpy as np
from scipy import linalg
from scipy.special import logsumexp

from facepnp.core.domain.errors import (
    DimensionMismatch,
    NonPositiveDepth,
    NotConverged,
    SingularHessian,
)
from facepnp.core.domain.geometry import CameraIntrinsics, FloatArray, RigidPose
from facepnp.core.domain.losses import LossValue
from facepnp.core.domain.pnp import PnPGradients, PnPProblem, PnPSolution, PoseDistribution
from facepnp.core.domain.shape import CanonicalMesh, LandmarkSet
from facepnp.infrastructure.services.idiffpnp import IDiffPnPService
from facepnp.infrastructure.services.ipnp import IPnPService
from facepnp.infrastructure.utils.geometry import project_camera_points
from facepnp.infrastructure.utils.projection import (
    point_chart_jacobian,
    projection_hessian,
    projection_jacobian,
    residual_chart_derivatives,
)
from facepnp.infrastructure.utils.rotations import GENERATORS, retract

logger = logging.getLogger(__name__)


def _unit_rows(vectors: FloatArray) -> Tuple[FloatArray, FloatArray]:
    norms = np.linalg.norm(vectors, axis=1)
    safe = np.where(norms > 1e-15, norms, 1.0)
    units = np.where((norms > 1e-15)[:, None], vectors / safe[:, None], 0.0)
    return norms, units


class DiffPnPService(IDiffPnPService):
    """A class representing the differentiable PnP layer."""

    def __init__(
        self,
        pnp_service: IPnPService,
        hessian_floor: float = 1e-10,
        hessian: Literal["exact", "gauss_newton"] = "exact",
    ) -> None:
        """The initializer of the differentiable PnP service.

        Args:
            pnp_service (IPnPService): The solver used by the forward pass.
            hessian_floor (float): Tikhonov term added before inversion.
            hessian (str): "exact" uses the full Hessian and mixed partials
                of the stationarity condition; "gauss_newton" drops the
                residual-weighted second-order terms.
        """
        self._pnp_service = pnp_service
        self._hessian_floor = hessian_floor
        self._hessian = hessian

    def forward(self, problem: PnPProblem) -> PnPSolution:
        """Solve the pose (DLT + LM) with the problem's own weighting."""
        return self._pnp_service.solve(problem, weighted=True)

    def _stationarity_terms(self, problem: PnPProblem, pose: RigidPose) -> dict:
        rotation = pose.rotation_matrix()
        rotated = problem.points3 @ rotation.T
        points_cam = rotated + pose.t
        projected = project_camera_points(points_cam, problem.cam)
        weights = problem.weights()
        first, second = residual_chart_derivatives(points_cam, rotated, problem.cam)
        return {
            "rotation": rotation,
            "rotated": rotated,
            "points_cam": points_cam,
            "weights": weights,
            "residuals": (projected - problem.points2) * weights[:, None],
            "jac": first * weights[:, None, None],
            "second": second * weights[:, None, None, None],
        }

    def _hessian_matrix(self, terms: dict) -> FloatArray:
        jac = terms["jac"]
        hessian = np.einsum("nca,ncb->ab", jac, jac)
        if self._hessian == "exact":
            hessian += np.einsum("nc,ncab->ab", terms["residuals"], terms["second"])
        return 0.5 * (hessian + hessian.T)

    def _checked_inverse(self, hessian: FloatArray) -> FloatArray:
        eigenvalues = linalg.eigvalsh(hessian)
        if eigenvalues[0] <= self._hessian_floor * max(1.0, eigenvalues[-1]):
            raise SingularHessian(
                f"Hessian is not safely positive definite (eigenvalues {eigenvalues[0]:.3g}..{eigenvalues[-1]:.3g})"
            )
        return linalg.inv(hessian + self._hessian_floor * np.eye(6))

    def backward(
        self,
        problem: PnPProblem,
        solution: PnPSolution,
        with_sigmas: bool = False,
    ) -> PnPGradients:
        """Implicit derivatives of the solved chart coordinates w.r.t. the inputs.

        Args:
            problem (PnPProblem): The correspondences.
            solution (PnPSolution): A converged solution of `problem`.
            with_sigmas (bool): Whether to also differentiate w.r.t. the sigmas.

        Raises:
            NotConverged: If the solution did not converge.
            SingularHessian: If the Hessian at the solution is degenerate.

        Returns:
            PnPGradients: d theta / d points2 (6, 2N), d theta / d points3
                (6, 3N) and optionally d theta / d sigmas (6, N).
        """
        if not solution.converged:
            raise NotConverged("Implicit differentiation needs a converged PnP solution")
        terms = self._stationarity_terms(problem, solution.pose)
        inverse = self._checked_inverse(self._hessian_matrix(terms))

        jac, residuals, weights = terms["jac"], terms["residuals"], terms["weights"]
        n = problem.n_points

        # dg/dx_{n,c} = -w_n J_{n,c}
        mixed2 = -(jac * weights[:, None, None]).transpose(2, 0, 1).reshape(6, 2 * n)

        # dg/dX_{n,j}: residual sensitivity plus, in exact mode, the Jacobian sensitivity
        rotation = terms["rotation"]
        d_pi = projection_jacobian(terms["points_cam"], problem.cam) * weights[:, None, None]
        d_residual = np.einsum("nck,kj->ncj", d_pi, rotation)
        mixed3 = np.einsum("nca,ncj->anj", jac, d_residual)
        if self._hessian == "exact":
            d_p = point_chart_jacobian(terms["rotated"])
            generator_rotation = np.einsum("aij,jk->aik", GENERATORS, rotation)
            d2_pi = projection_hessian(terms["points_cam"], problem.cam) * weights[:, None, None, None]
            d_jac = (
                np.einsum("nckl,lj,nka->ncaj", d2_pi, rotation, d_p)
                + np.concatenate([
                    np.einsum("nck,akj->ncaj", d_pi, generator_rotation),
                    np.zeros((n, 2, 3, 3)),
                ], axis=2)
            )
            mixed3 += np.einsum("nc,ncaj->anj", residuals, d_jac)
        mixed3 = mixed3.reshape(6, 3 * n)

        d_sigmas = None
        if with_sigmas:
            # r and J both scale with 1 / sigma_n, so g_n scales with 1 / sigma_n^2
            per_point = np.einsum("nca,nc->an", jac, residuals)
            d_sigmas = -inverse @ (-2.0 * per_point * weights[None, :])

        return PnPGradients(
            d_points2=-inverse @ mixed2,
            d_points3=-inverse @ mixed3,
            d_sigmas=d_sigmas,
        )

    def softargmin(
        self,
        problem: PnPProblem,
        center: PnPSolution,
        n_samples: int,
        temperature: float,
        rng: np.random.Generator,
    ) -> PoseDistribution:
        """Monte-Carlo Boltzmann expectation of the pose around the LM solution.

        Sample 0 is the center itself, so its log-weight is 0 and the
        normalizer never vanishes. The remaining n_samples - 1 samples
        are drawn in the chart from N(0, temperature * H^-1), H being the
        Gauss-Newton Hessian of the cost. Each sample is weighted by
        exp(-cost / temperature) divided by its proposal density.

        Raises:
            ValueError: If n_samples < 1 or temperature <= 0.

        Returns:
            PoseDistribution: Samples, normalized weights and the pose of
                the weighted chart mean.
        """
        if n_samples < 1:
            raise ValueError("n_samples must be at least 1")
        if temperature <= 0:
            raise ValueError("temperature must be positive")

        _, jac = self._pnp_service.residuals(problem, center.pose)
        precision = 2.0 * jac.T @ jac + self._hessian_floor * np.eye(6)
        covariance = temperature * linalg.inv(precision)
        chol = linalg.cholesky(0.5 * (covariance + covariance.T), lower=True)
        draws = rng.standard_normal((n_samples - 1, 6)) @ chol.T
        thetas = np.vstack([np.zeros((1, 6)), draws])

        poses = [retract(center.pose, theta) for theta in thetas]
        costs = np.empty(n_samples)
        for i, pose in enumerate(poses):
            try:
                residuals, _ = self._pnp_service.residuals(problem, pose)
                costs[i] = residuals @ residuals
            except NonPositiveDepth:
                costs[i] = np.inf

        log_target = -(costs - center.final_cost) / temperature
        log_proposal = -0.5 * np.einsum("sa,ab,sb->s", thetas, precision, thetas) / temperature
        log_weights = log_target - log_proposal
        log_weights[~np.isfinite(log_weights)] = -np.inf

        weights = np.exp(log_weights - logsumexp(log_weights))
        weights /= weights.sum()
        expected = retract(center.pose, weights @ thetas)
        logger.debug(
            "Softargmin with %d samples, effective size %.1f",
            n_samples, 1.0 / float(np.sum(weights ** 2)),
        )
        return PoseDistribution(
            poses=poses,
            weights=weights,
            temperature=temperature,
            expected_pose=expected,
        )

    def pnp_loss(
        self,
        landmarks: LandmarkSet,
        mesh_pred: CanonicalMesh,
        mesh_gt: CanonicalMesh,
        pose_gt: RigidPose,
        cam: CameraIntrinsics,
        weighted: bool = True,
        include_sigma: bool = False,
    ) -> Tuple[LossValue, PnPSolution]:
        """Pose loss mean_v ||P X_gt - P_gt X_gt|| + mean_v ||P X_pred - P_gt X_gt||.

        P is the pose solved from (landmarks, mesh_pred). Gradients chain the
        implicit PnP derivatives with the direct dependence of the second
        term on the predicted vertices.

        Raises:
            DimensionMismatch: If the inputs disagree on the vertex count.

        Returns:
            Tuple[LossValue, PnPSolution]: The loss with "mu" and "vertices"
                gradients ("log_sigma" too when requested) and the solved pose.
        """
        n = mesh_gt.n_vertices
        if mesh_pred.n_vertices != n or landmarks.n_points != n:
            raise DimensionMismatch(
                f"landmarks ({landmarks.n_points}), predicted mesh ({mesh_pred.n_vertices}) "
                f"and ground-truth mesh ({n}) must have the same size"
            )
        problem = PnPProblem(
            points3=mesh_pred.vertices,
            points2=landmarks.mu,
            sigmas=landmarks.sigma if weighted else None,
            cam=cam,
        )
        solution = self.forward(problem)
        gradients = self.backward(problem, solution, with_sigmas=include_sigma and weighted)

        rotation = solution.pose.rotation_matrix()
        target = pose_gt.transform(mesh_gt.vertices)
        rotated_gt = mesh_gt.vertices @ rotation.T
        rotated_pred = mesh_pred.vertices @ rotation.T
        norms_gt, units_gt = _unit_rows(rotated_gt + solution.pose.t - target)
        norms_pred, units_pred = _unit_rows(rotated_pred + solution.pose.t - target)
        value = float(norms_gt.mean() + norms_pred.mean())

        d_theta = np.concatenate([
            (np.einsum("ni,aij,nj->a", units_gt, GENERATORS, rotated_gt)
             + np.einsum("ni,aij,nj->a", units_pred, GENERATORS, rotated_pred)) / n,
            (units_gt.sum(axis=0) + units_pred.sum(axis=0)) / n,
        ])
        result = {
            "mu": (gradients.d_points2.T @ d_theta).reshape(n, 2),
            "vertices": (gradients.d_points3.T @ d_theta).reshape(n, 3) + units_pred @ rotation / n,
        }
        if include_sigma:
            d_log_sigma = np.zeros(n)
            if gradients.d_sigmas is not None:
                d_log_sigma = (gradients.d_sigmas.T @ d_theta) * landmarks.sigma
            result["log_sigma"] = d_log_sigma
        return LossValue(value=value, gradients=result), solution
