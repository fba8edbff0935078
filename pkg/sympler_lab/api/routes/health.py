"""Health check routes."""

from fastapi import APIRouter

from ..schemas import HealthResponse
from ...config import get_settings
from ...storage import FORMAT_VERSION

router = APIRouter(tags=["Health"])


def _health() -> HealthResponse:
    settings = get_settings()
    return HealthResponse(
        status="healthy",
        version=settings.app_version,
        service=settings.app_name,
        snapshot_format=FORMAT_VERSION,
    )


@router.get(
    "/health",
    response_model=HealthResponse,
    summary="Health Check",
    description="Check if the API is running and which snapshot format it reads.",
)
async def health_check() -> HealthResponse:
    return _health()


@router.get(
    "/",
    response_model=HealthResponse,
    summary="Root Endpoint",
    description="Root endpoint returning API info.",
)
async def root() -> HealthResponse:
    return _health()
