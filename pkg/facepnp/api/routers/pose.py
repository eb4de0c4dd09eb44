"""A module containing pose endpoints."""

from typing import Any

from dependency_injector.wiring import inject, Provide
from fastapi import APIRouter, Depends, HTTPException
from pydantic import ValidationError

from facepnp.container import Container
from facepnp.core.domain.errors import FacePnPError
from facepnp.core.domain.report import SampleMetrics
from facepnp.infrastructure.dto.posedto import MetricsRequestDTO, PnPSolutionDTO, SolveRequestDTO
from facepnp.infrastructure.services.imetrics import IMetricsService
from facepnp.infrastructure.services.ipnp import IPnPService
from facepnp.infrastructure.utils.geometry import pose_to_euler

router = APIRouter(
    tags=["pose"]
)


@router.post("/solve", response_model=PnPSolutionDTO)
@inject
async def solve_pose(
    request: SolveRequestDTO,
    service: IPnPService = Depends(Provide[Container.pnp_service]),
    default_weighted: bool = Depends(Provide[Container.weighted_pnp]),
) -> Any:
    """Solve the pose of 2D-3D correspondences.

    Args:
        request: Correspondences, optional sigmas and the camera
        service: The PnP service (injected)
        default_weighted: Weighting used when the request does not choose (injected)

    Returns:
        The solved pose

    Raises:
        HTTPException: 422 if the correspondences are degenerate, 500 on other failures
    """
    try:
        problem = request.to_problem()
        weighted = default_weighted if request.weighted is None else request.weighted
        solution = service.solve(problem, weighted=weighted and problem.sigmas is not None)
        return PnPSolutionDTO.from_solution(solution, pose_to_euler(solution.pose))
    except (FacePnPError, ValidationError) as e:
        raise HTTPException(
            status_code=422,
            detail=f"Cannot solve pose: {e}"
        ) from e
    except Exception as e:
        raise HTTPException(
            status_code=500,
            detail=f"Server error: {str(e)}"
        ) from e


@router.post("/metrics", response_model=SampleMetrics)
@inject
async def pose_metrics(
    request: MetricsRequestDTO,
    service: IMetricsService = Depends(Provide[Container.metrics_service]),
) -> Any:
    """Compare a predicted pose with the ground truth.

    Args:
        request: Predicted pose, ground-truth pose and ground-truth mesh
        service: The metrics service (injected)

    Returns:
        MAE_r, MAE_t, ADD and geodesic distance

    Raises:
        HTTPException: 422 on invalid input, 500 on other failures
    """
    try:
        return service.evaluate(0, request.pred, request.gt, request.mesh())
    except (FacePnPError, ValidationError) as e:
        raise HTTPException(
            status_code=422,
            detail=f"Cannot evaluate pose: {e}"
        ) from e
    except Exception as e:
        raise HTTPException(
            status_code=500,
            detail=f"Server error: {str(e)}"
        ) from e
