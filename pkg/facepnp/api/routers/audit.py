"""A module containing gradient audit endpoints."""

from typing import Any

from dependency_injector.wiring import inject, Provide
from fastapi import APIRouter, Depends, HTTPException, Query

from facepnp.container import Container
from facepnp.core.domain.report import GradAuditReport
from facepnp.infrastructure.services.iaudit import IAuditService

router = APIRouter(
    tags=["audit"]
)


@router.get("/gradients", response_model=GradAuditReport)
@inject
async def audit_gradients(
    seed: int = Query(0, description="Root seed of the random instances"),
    n: int = Query(5, ge=0, le=100, description="Instances per audited operation"),
    service: IAuditService = Depends(Provide[Container.audit_service]),
) -> Any:
    """Run the finite-difference gradient audit.

    Args:
        seed: Root seed of the random instances
        n: Instances per audited operation
        service: The audit service (injected)

    Returns:
        One row per audited operation

    Raises:
        HTTPException: 500 if the audit fails to run
    """
    try:
        return service.run_grad_audit(seed, n)
    except Exception as e:
        raise HTTPException(
            status_code=500,
            detail=f"Server error: {str(e)}"
        ) from e
