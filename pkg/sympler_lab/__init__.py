"""
SyMPLER Lab

Continual piecewise-linear regression for nonstationary time series, with
the pendulum identification studies and a warmup/update/evaluation harness.
"""

__version__ = "1.0.0"
__author__ = "SyMPLER Lab Team"

from .engine import SymplerLearner, VCBoundCalculator

__all__ = ["SymplerLearner", "VCBoundCalculator", "__version__"]
