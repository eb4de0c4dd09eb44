"""Module containing differentiable PnP service abstractions."""

from abc import ABC, abstractmethod
from typing import Tuple

import numpy as np

from facepnp.core.domain.geometry import CameraIntrinsics, RigidPose
from facepnp.core.domain.losses import LossValue
from facepnp.core.domain.pnp import PnPGradients, PnPProblem, PnPSolution, PoseDistribution
from facepnp.core.domain.shape import CanonicalMesh, LandmarkSet


class IDiffPnPService(ABC):
    """An abstract class representing the differentiable PnP layer."""

    @abstractmethod
    def forward(self, problem: PnPProblem) -> PnPSolution:
        """Solve the pose (DLT + LM) with the problem's own weighting.

        Args:
            problem (PnPProblem): The correspondences.

        Returns:
            PnPSolution: The solved pose.
        """

    @abstractmethod
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

        Returns:
            PnPGradients: The Jacobian blocks.
        """

    @abstractmethod
    def softargmin(
        self,
        problem: PnPProblem,
        center: PnPSolution,
        n_samples: int,
        temperature: float,
        rng: np.random.Generator,
    ) -> PoseDistribution:
        """Monte-Carlo Boltzmann expectation of the pose around the LM solution.

        Args:
            problem (PnPProblem): The correspondences.
            center (PnPSolution): The LM solution used as the chart origin.
            n_samples (int): Number of samples, the center included.
            temperature (float): Boltzmann temperature in cost units.
            rng (np.random.Generator): The random source.

        Returns:
            PoseDistribution: Samples, normalized weights and expected pose.
        """

    @abstractmethod
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
        """Pose loss of the PnP layer and its gradients.

        Args:
            landmarks (LandmarkSet): Predicted 2D landmarks.
            mesh_pred (CanonicalMesh): Predicted canonical mesh.
            mesh_gt (CanonicalMesh): Ground-truth canonical mesh.
            pose_gt (RigidPose): Ground-truth pose.
            cam (CameraIntrinsics): The camera.
            weighted (bool): Whether the landmark sigmas weight the PnP.
            include_sigma (bool): Whether to chain a "log_sigma" gradient.

        Returns:
            Tuple[LossValue, PnPSolution]: The loss with "mu" and "vertices"
                gradients, and the solved pose.
        """
