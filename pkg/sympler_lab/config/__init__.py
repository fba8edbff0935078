"""Configuration module for SyMPLER Lab."""

from .settings import Settings, get_settings

__all__ = ["Settings", "get_settings"]
