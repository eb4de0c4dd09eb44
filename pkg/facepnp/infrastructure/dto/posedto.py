"""A module containing DTO models of the pose endpoints."""

from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from facepnp.core.domain.geometry import CameraIntrinsics, EulerAngles, RigidPose
from facepnp.core.domain.pnp import PnPProblem, PnPSolution
from facepnp.core.domain.shape import CanonicalMesh


class SolveRequestDTO(BaseModel):
    """A model representing a pose solve request."""
    points3: List[Tuple[float, float, float]] = Field(..., min_length=1)
    points2: List[Tuple[float, float]] = Field(..., min_length=1)
    sigmas: Optional[List[float]] = None
    cam: CameraIntrinsics
    weighted: Optional[bool] = None

    def to_problem(self) -> PnPProblem:
        """Return the validated PnP problem of the request."""
        return PnPProblem(points3=self.points3, points2=self.points2, sigmas=self.sigmas, cam=self.cam)


class PnPSolutionDTO(BaseModel):
    """A model representing a solved pose."""
    rotation: Tuple[float, float, float, float]
    translation: Tuple[float, float, float]
    euler: EulerAngles
    final_cost: float
    iterations: int
    converged: bool

    model_config = ConfigDict(from_attributes=True)

    @classmethod
    def from_solution(cls, solution: PnPSolution, euler: EulerAngles) -> "PnPSolutionDTO":
        """Create the DTO of a solution.

        Args:
            solution (PnPSolution): The solver output.
            euler (EulerAngles): Euler decomposition of the solved rotation.

        Returns:
            PnPSolutionDTO: The DTO.
        """
        return cls(
            rotation=solution.pose.rotation,
            translation=solution.pose.translation,
            euler=euler,
            final_cost=solution.final_cost,
            iterations=solution.iterations,
            converged=solution.converged,
        )


class MetricsRequestDTO(BaseModel):
    """A model representing a pose metrics request."""
    pred: RigidPose
    gt: RigidPose
    mesh_gt: List[Tuple[float, float, float]] = Field(..., min_length=1)

    def mesh(self) -> CanonicalMesh:
        """Return the ground-truth mesh of the request."""
        return CanonicalMesh(vertices=self.mesh_gt)
