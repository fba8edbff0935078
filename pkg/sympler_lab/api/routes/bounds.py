"""VC bound routes."""

from typing import Optional

from fastapi import APIRouter, Query

from ..schemas import BoundRowSchema, BoundTableResponse, BufferSizeResponse, ErrorResponse
from ...config import get_settings
from ...engine import VCBoundCalculator

router = APIRouter(prefix="/bounds", tags=["Bounds"], responses={400: {"model": ErrorResponse}})


@router.get(
    "/table",
    summary="Minimum Training Sizes",
    description="Bisection roots of the VC bound next to the closed-form buffer rule.",
    response_model=BoundTableResponse,
)
async def bound_table(
    h_max: int = Query(10, ge=1, le=1000),
    eta: Optional[float] = Query(None, gt=0, lt=1),
) -> BoundTableResponse:
    eta = eta if eta is not None else get_settings().default_eta
    rows = VCBoundCalculator.bound_table(h_max, eta)
    return BoundTableResponse(
        eta=eta,
        rows=[BoundRowSchema(h=r.h, l_star=r.l_star, l_rule=r.l_rule) for r in rows],
    )


@router.get(
    "/buffer-size/{n}",
    summary="Buffer Size",
    description="Samples needed before a local model on n inputs is trained.",
    response_model=BufferSizeResponse,
)
async def buffer_size(n: int) -> BufferSizeResponse:
    return BufferSizeResponse(n=n, buffer_size=VCBoundCalculator.buffer_size(n))
