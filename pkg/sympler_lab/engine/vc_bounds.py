"""VC-theoretical minimum training sizes for the local linear models."""

import logging
import math

from .errors import BoundDomainError, BracketError
from .types import BoundQuery, BoundSolution

logger = logging.getLogger(__name__)

BISECTION_TOL = 1e-6


class VCBoundCalculator:
    """Calculator for the VC generalization bound of affine models."""

    @staticmethod
    def epsilon(q: BoundQuery) -> float:
        """
        Capacity term of the bound.

        epsilon = a1 * (h * (ln(a2 * l / h) + 1) - ln(eta / 4)) / l

        Raises:
            BoundDomainError: If h or l is not positive, eta is outside (0, 1)
                or a constant is not positive.
        """
        if q.h <= 0 or q.l <= 0:
            raise BoundDomainError(f"h and l must be > 0, got h={q.h}, l={q.l}")
        if not 0.0 < q.eta < 1.0:
            raise BoundDomainError(f"eta must lie in (0, 1), got {q.eta}")
        if q.a1 <= 0 or q.a2 <= 0 or q.c <= 0:
            raise BoundDomainError("a1, a2 and c must be > 0")

        h = float(q.h)
        return q.a1 * (h * (math.log(q.a2 * q.l / h) + 1.0) - math.log(q.eta / 4.0)) / q.l

    @staticmethod
    def risk_bound_from_epsilon(emp_risk: float, eps: float, c: float = 1.0) -> float:
        """Expected-risk bound for a known epsilon; inf once the denominator clamps to 0."""
        if emp_risk < 0:
            raise BoundDomainError("Empirical risk must be >= 0")
        denominator = 1.0 - c * math.sqrt(eps)
        if denominator <= 0:
            return math.inf
        return emp_risk / denominator

    @staticmethod
    def risk_bound(emp_risk: float, q: BoundQuery) -> float:
        """R <= R_emp / (1 - c * sqrt(epsilon))_+"""
        eps = VCBoundCalculator.epsilon(q)
        return VCBoundCalculator.risk_bound_from_epsilon(emp_risk, eps, q.c)

    @staticmethod
    def min_training_size(h: int, eta: float = 0.01) -> float:
        """
        Smallest training size with a finite risk bound.

        Solves epsilon(h, l, eta) = 1 for l by bisection on [h, 10h + 100].
        The bracket is widened tenfold once if it holds no sign change.

        Args:
            h: VC dimension (n + 1 for an affine model on n inputs)
            eta: Confidence parameter

        Returns:
            The root l* > h, unrounded

        Raises:
            BoundDomainError: If h < 1 or eta is outside (0, 1)
            BracketError: If no sign change is found after widening
        """
        if h < 1:
            raise BoundDomainError(f"h must be >= 1, got {h}")
        if not 0.0 < eta < 1.0:
            raise BoundDomainError(f"eta must lie in (0, 1), got {eta}")

        def excess(l: float) -> float:
            return VCBoundCalculator.epsilon(BoundQuery(h=h, l=l, eta=eta)) - 1.0

        lo = float(h)
        hi = 10.0 * h + 100.0
        if excess(hi) > 0:
            hi *= 10.0
            if excess(hi) > 0:
                raise BracketError(f"No sign change in [{lo}, {hi}] for h={h}, eta={eta}")

        # excess(lo) > 0 always: at l = h the bound is 1 - ln(eta/4)/h > 1
        while hi - lo > BISECTION_TOL:
            mid = 0.5 * (lo + hi)
            if excess(mid) > 0:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    @staticmethod
    def buffer_size(n: int) -> int:
        """Practical buffer rule l = 2(n + 1) + 10 for n input features."""
        if n < 0:
            raise BoundDomainError(f"n must be >= 0, got {n}")
        return 2 * (n + 1) + 10

    @staticmethod
    def bound_table(h_max: int, eta: float = 0.01) -> list[BoundSolution]:
        """One BoundSolution per VC dimension in 1..h_max."""
        if h_max < 1:
            raise BoundDomainError(f"h_max must be >= 1, got {h_max}")

        rows = [
            BoundSolution(
                h=h,
                l_star=VCBoundCalculator.min_training_size(h, eta),
                l_rule=VCBoundCalculator.buffer_size(h - 1),
            )
            for h in range(1, h_max + 1)
        ]
        logger.debug("bound_table h_max=%d eta=%g", h_max, eta)
        return rows
