"""API module for SyMPLER Lab."""

from .main import create_app

__all__ = ["create_app"]
