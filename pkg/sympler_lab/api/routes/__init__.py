"""API routes for SyMPLER Lab."""

from .bounds import router as bounds_router
from .health import router as health_router
from .models import router as models_router

__all__ = ["bounds_router", "health_router", "models_router"]
