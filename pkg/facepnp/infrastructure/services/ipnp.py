"""Module containing PnP solver service abstractions."""

from abc import ABC, abstractmethod
from typing import Optional, Sequence, Tuple

from facepnp.core.domain.geometry import FloatArray, RigidPose
from facepnp.core.domain.pnp import PnPProblem, PnPSolution


class IPnPService(ABC):
    """An abstract class representing the PnP solver."""

    @abstractmethod
    def solve_dlt(self, problem: PnPProblem) -> RigidPose:
        """Closed-form pose from the direct linear transform.

        Args:
            problem (PnPProblem): The correspondences.

        Returns:
            RigidPose: The algebraic-error minimizing pose projected to SO(3).
        """

    @abstractmethod
    def solve_lm(
        self,
        problem: PnPProblem,
        init: RigidPose,
        active: Optional[Sequence[int]] = None,
    ) -> PnPSolution:
        """Levenberg-Marquardt refinement of the weighted reprojection error.

        Args:
            problem (PnPProblem): The correspondences.
            init (RigidPose): The starting pose.
            active (Optional[Sequence[int]]): Chart coordinates allowed to
                move; all six when None.

        Returns:
            PnPSolution: The refined pose and convergence record.
        """

    @abstractmethod
    def residuals(self, problem: PnPProblem, pose: RigidPose) -> Tuple[FloatArray, FloatArray]:
        """Weighted residuals and their chart Jacobian.

        Args:
            problem (PnPProblem): The correspondences.
            pose (RigidPose): The evaluation pose.

        Returns:
            Tuple[FloatArray, FloatArray]: (2N,) residuals and (2N, 6) Jacobian.
        """

    @abstractmethod
    def solve(self, problem: PnPProblem, weighted: bool = True) -> PnPSolution:
        """DLT initialization followed by LM refinement.

        Args:
            problem (PnPProblem): The correspondences.
            weighted (bool): Whether the sigmas weight the residuals.

        Returns:
            PnPSolution: The refined solution.
        """
