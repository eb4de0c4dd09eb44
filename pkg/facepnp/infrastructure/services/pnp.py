"""Module containing the PnP solver service implementation."""

import logging
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from facepnp.core.domain.errors import DegenerateConfiguration, NonPositiveDepth
from facepnp.core.domain.geometry import FloatArray, RigidPose
from facepnp.core.domain.pnp import MIN_CORRESPONDENCES, PnPProblem, PnPSolution
from facepnp.infrastructure.services.ipnp import IPnPService
from facepnp.infrastructure.utils.geometry import project_camera_points
from facepnp.infrastructure.utils.projection import point_chart_jacobian, projection_jacobian
from facepnp.infrastructure.utils.rotations import retract

logger = logging.getLogger(__name__)

PLANARITY_TOL = 1e-6
RANK_TOL = 1e-10
DIAGONAL_FLOOR = 1e-12
POLISH_DAMPING = 1e4
ROUNDING_SLACK = 1e-12
STATIONARY_RTOL = 1e-20


class PnPService(IPnPService):
    """A class representing the DLT + Levenberg-Marquardt PnP solver."""

    def __init__(
        self,
        max_iterations: int = 100,
        gradient_tol: float = 1e-10,
        step_tol: float = 1e-12,
        initial_damping: float = 1e-3,
        damping_factor: float = 10.0,
    ) -> None:
        """The initializer of the PnP service.

        Args:
            max_iterations (int): LM trial steps before giving up.
            gradient_tol (float): Infinity-norm threshold on the cost gradient.
            step_tol (float): Norm threshold on the chart step.
            initial_damping (float): Starting Marquardt damping.
            damping_factor (float): Damping multiplier on rejection and
                divisor on acceptance.
        """
        self._max_iterations = max_iterations
        self._gradient_tol = gradient_tol
        self._step_tol = step_tol
        self._initial_damping = initial_damping
        self._damping_factor = damping_factor

    def residuals(self, problem: PnPProblem, pose: RigidPose) -> Tuple[FloatArray, FloatArray]:
        """Weighted residuals (pi(R X_i + t) - x_i) / sigma_i and their chart Jacobian.

        Args:
            problem (PnPProblem): The correspondences.
            pose (RigidPose): The evaluation pose.

        Raises:
            NonPositiveDepth: If a point lands behind the camera.

        Returns:
            Tuple[FloatArray, FloatArray]: (2N,) residuals ordered u0, v0, u1, ...
                and the (2N, 6) Jacobian w.r.t. (omega, tau).
        """
        rotated = problem.points3 @ pose.rotation_matrix().T
        points_cam = rotated + pose.t
        projected = project_camera_points(points_cam, problem.cam)
        weights = problem.weights()
        residuals = ((projected - problem.points2) * weights[:, None]).reshape(-1)
        jac = np.einsum(
            "nck,nka->nca",
            projection_jacobian(points_cam, problem.cam),
            point_chart_jacobian(rotated),
        )
        jac *= weights[:, None, None]
        return residuals, jac.reshape(-1, 6)

    def solve_dlt(self, problem: PnPProblem) -> RigidPose:
        """Closed-form pose from the Hartley-normalized direct linear transform.

        Args:
            problem (PnPProblem): The correspondences.

        Raises:
            DegenerateConfiguration: If there are fewer than six points, the
                3D points are coplanar or collinear, or the system is rank deficient.

        Returns:
            RigidPose: Pose whose rotation is the nearest rotation matrix to
                the recovered 3x3 block.
        """
        n = problem.n_points
        if n < MIN_CORRESPONDENCES:
            raise DegenerateConfiguration(
                f"DLT needs at least {MIN_CORRESPONDENCES} correspondences, got {n}"
            )
        points3 = problem.points3
        spread = linalg.svd(points3 - points3.mean(axis=0), compute_uv=False)
        if spread[0] == 0.0 or spread[-1] <= PLANARITY_TOL * spread[0]:
            raise DegenerateConfiguration("3D points are coplanar or collinear")

        rays = np.column_stack([problem.points2, np.ones(n)]) @ linalg.inv(problem.cam.matrix()).T
        image = rays[:, :2]

        center3 = points3.mean(axis=0)
        scale3 = np.sqrt(3.0) / np.mean(np.linalg.norm(points3 - center3, axis=1))
        center2 = image.mean(axis=0)
        scale2 = np.sqrt(2.0) / max(np.mean(np.linalg.norm(image - center2, axis=1)), 1e-300)

        homog = np.column_stack([(points3 - center3) * scale3, np.ones(n)])
        normalized = (image - center2) * scale2
        design = np.zeros((2 * n, 12))
        design[0::2, 0:4] = homog
        design[0::2, 8:12] = -normalized[:, [0]] * homog
        design[1::2, 4:8] = homog
        design[1::2, 8:12] = -normalized[:, [1]] * homog
        design *= np.repeat(problem.weights(), 2)[:, None]

        _, singular, vt = linalg.svd(design, full_matrices=False)
        if singular[-2] <= RANK_TOL * singular[0]:
            raise DegenerateConfiguration("DLT design matrix is rank deficient")

        t3 = np.eye(4)
        t3[:3, :3] *= scale3
        t3[:3, 3] = -scale3 * center3
        t2 = np.array([
            [scale2, 0.0, -scale2 * center2[0]],
            [0.0, scale2, -scale2 * center2[1]],
            [0.0, 0.0, 1.0],
        ])
        projection = linalg.inv(t2) @ vt[-1].reshape(3, 4) @ t3

        block = projection[:, :3]
        if linalg.det(block) < 0:
            projection = -projection
            block = -block
        u, s, vh = linalg.svd(block)
        rotation = u @ vh
        translation = projection[:, 3] / s.mean()

        depths = (points3 @ rotation.T + translation)[:, 2]
        if np.median(depths) <= 0:
            raise DegenerateConfiguration("DLT solution places the points behind the camera")
        return RigidPose.from_matrix(rotation, translation)

    def _newton_system(
        self,
        jac: FloatArray,
        residuals: FloatArray,
        mask: FloatArray,
    ) -> Tuple[FloatArray, FloatArray, Optional[FloatArray], float]:
        reduced = jac[:, mask]
        half_gradient = reduced.T @ residuals
        normal = reduced.T @ reduced
        try:
            gn_step = linalg.solve(normal, -half_gradient, assume_a="sym")
        except linalg.LinAlgError:
            return half_gradient, normal, None, np.inf
        return half_gradient, normal, gn_step, float(-half_gradient @ gn_step)

    def _stationary(
        self,
        half_gradient: FloatArray,
        gn_step: Optional[FloatArray],
        decrement: float,
        cost: float,
    ) -> bool:
        if np.max(np.abs(2.0 * half_gradient)) < self._gradient_tol:
            return True
        if gn_step is None:
            return False
        return bool(np.linalg.norm(gn_step) < self._step_tol or decrement <= STATIONARY_RTOL * max(cost, 1.0))

    def solve_lm(
        self,
        problem: PnPProblem,
        init: RigidPose,
        active: Optional[Sequence[int]] = None,
    ) -> PnPSolution:
        """Levenberg-Marquardt refinement of sum_i ||pi(R X_i + t) - x_i||^2 / sigma_i^2.

        Damped steps solve (J^T J + lambda diag(J^T J)) delta = -J^T r in the
        chart and are accepted only when the cost does not increase. Once the
        damping saturates, cost changes are below rounding and undamped
        Gauss-Newton steps polish the pose instead; they are accepted while
        the Gauss-Newton decrement g^T (J^T J)^-1 g keeps shrinking.

        The solve is converged when the gradient infinity norm, the undamped
        Gauss-Newton step norm, or the decrement relative to the cost falls
        below its tolerance.

        Args:
            problem (PnPProblem): The correspondences.
            init (RigidPose): The starting pose; every point must have positive depth.
            active (Optional[Sequence[int]]): Chart coordinates allowed to move.

        Raises:
            NonPositiveDepth: If the starting pose puts a point behind the camera.

        Returns:
            PnPSolution: The best pose found; `converged` is False when the
                iteration budget ran out or polishing stalled. `cost_history`
                holds the damped-step costs only.
        """
        mask = np.arange(6) if active is None else np.asarray(active, dtype=int)
        residuals, jac = self.residuals(problem, init)
        pose = init
        cost = float(residuals @ residuals)
        history = [cost]
        damping = self._initial_damping
        converged = False
        iterations = 0
        half_gradient, normal, gn_step, decrement = self._newton_system(jac, residuals, mask)

        while True:
            if self._stationary(half_gradient, gn_step, decrement, cost):
                converged = True
                break
            if iterations >= self._max_iterations:
                break
            iterations += 1

            polishing = damping >= POLISH_DAMPING
            if polishing:
                if gn_step is None:
                    break
                step = gn_step
            else:
                damped = normal + damping * np.diag(np.diag(normal) + DIAGONAL_FLOOR)
                try:
                    step = linalg.solve(damped, -half_gradient, assume_a="sym")
                except linalg.LinAlgError:
                    damping *= self._damping_factor
                    continue

            theta = np.zeros(6)
            theta[mask] = step
            candidate = retract(pose, theta)
            try:
                candidate_residuals, candidate_jac = self.residuals(problem, candidate)
            except NonPositiveDepth as e:
                logger.debug("LM step rejected: %s", e)
                if polishing:
                    break
                damping *= self._damping_factor
                continue

            candidate_cost = float(candidate_residuals @ candidate_residuals)
            system = self._newton_system(candidate_jac, candidate_residuals, mask)
            if polishing:
                accepted = system[3] < decrement and candidate_cost <= cost + ROUNDING_SLACK * max(cost, 1.0)
            else:
                accepted = candidate_cost <= cost

            if accepted:
                pose, residuals, jac, cost = candidate, candidate_residuals, candidate_jac, candidate_cost
                half_gradient, normal, gn_step, decrement = system
                if polishing:
                    logger.debug("LM iteration %d polished, decrement=%.3g", iterations, decrement)
                else:
                    history.append(cost)
                    damping = max(damping / self._damping_factor, DIAGONAL_FLOOR)
                    logger.debug("LM iteration %d accepted, cost=%.12g", iterations, cost)
            elif polishing:
                break
            else:
                damping *= self._damping_factor

        gradient_norm = float(np.max(np.abs(2.0 * jac[:, mask].T @ residuals)))
        if not converged:
            logger.warning(
                "LM stopped after %d iterations without converging (cost=%.6g, gradient=%.3g)",
                iterations, cost, gradient_norm,
            )
        return PnPSolution(
            pose=pose,
            final_cost=cost,
            iterations=iterations,
            converged=converged,
            gradient_norm=gradient_norm,
            cost_history=history,
        )

    def solve(self, problem: PnPProblem, weighted: bool = True) -> PnPSolution:
        """DLT initialization followed by LM refinement.

        Args:
            problem (PnPProblem): The correspondences.
            weighted (bool): Whether the sigmas weight the residuals.

        Returns:
            PnPSolution: The refined solution.
        """
        target = problem if weighted else problem.unweighted()
        return self.solve_lm(target, self.solve_dlt(target))
