"""FastAPI application factory and configuration."""

import logging
from contextlib import asynccontextmanager
from typing import AsyncGenerator

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from ..config import get_settings
from ..engine.errors import SymplerError
from .routes import bounds_router, health_router, models_router
from .schemas import ErrorResponse

logger = logging.getLogger(__name__)


@asynccontextmanager
async def lifespan(app: FastAPI) -> AsyncGenerator[None, None]:
    """Application lifespan handler for startup/shutdown events."""
    settings = get_settings()
    logger.info("starting %s v%s", settings.app_name, settings.app_version)
    logger.info("data directory: %s", settings.data_dir)

    yield

    logger.info("shutting down")


def create_app() -> FastAPI:
    """Create and configure the FastAPI application."""
    settings = get_settings()

    app = FastAPI(
        title=settings.app_name,
        version=settings.app_version,
        description="""
## SyMPLER Lab API

Stateless access to the VC-bound calculator and to frozen learner snapshots.

### Features
- **Bounds**: minimum training sizes per VC dimension and the buffer rule
- **Predict**: batch predictions from a snapshot written by `sympler pendulum-train` or `sympler evaluate`
- **Explain**: the local model (point, slopes, bias) answering a query

### Quick Start
1. Train: `sympler pendulum-train --out runs/base`
2. Explain: `POST /api/v1/models/explain` with the snapshot JSON and `{"x": [0.44]}`
        """,
        docs_url="/docs",
        redoc_url="/redoc",
        openapi_url="/openapi.json",
        lifespan=lifespan,
    )

    # Configure CORS
    app.add_middleware(
        CORSMiddleware,
        allow_origins=settings.cors_origins,
        allow_credentials=settings.cors_allow_credentials,
        allow_methods=settings.cors_allow_methods,
        allow_headers=settings.cors_allow_headers,
    )

    # Exception handlers
    @app.exception_handler(SymplerError)
    async def sympler_exception_handler(request: Request, exc: SymplerError) -> JSONResponse:
        body = ErrorResponse(error=type(exc).__name__, detail=str(exc), code="INVALID_REQUEST")
        return JSONResponse(status_code=400, content=body.model_dump())

    @app.exception_handler(Exception)
    async def global_exception_handler(request: Request, exc: Exception) -> JSONResponse:
        """Global exception handler for unhandled errors."""
        logger.exception("unhandled error on %s", request.url.path)
        body = ErrorResponse(
            error="Internal server error",
            detail=str(exc) if settings.debug else None,
        )
        return JSONResponse(status_code=500, content=body.model_dump())

    # Include routers
    api_prefix = settings.api_prefix

    app.include_router(health_router, prefix=api_prefix)
    app.include_router(bounds_router, prefix=api_prefix)
    app.include_router(models_router, prefix=api_prefix)

    # Also include health at root level
    app.include_router(health_router)

    return app


# Create default app instance for uvicorn
app = create_app()
