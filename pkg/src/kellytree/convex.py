"""Convex combination of two put-hedged portfolios (buy and hold).

Two sub-portfolios with hedge parameters straddling the pivot compound
independently; the combined wealth is ``a*W1 + (1-a)*W2`` with no
rebalancing between them.  Its per-period log growth is squeezed between
the better component's growth and that growth minus ``|log min(a, 1-a)|/n``,
so asymptotically the mix earns the better component's rate regardless of
``a`` - that is what makes it robust to misspecified up factors.

The log-domain helpers below are written so the squeeze and the Jensen
lower bound hold *in floating point*, not just in exact arithmetic: the
combination value, its bounds and the Jensen reference are all evaluated
after shifting by the same maximum, through the same log1p/expm1 route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import ParameterError

__all__ = [
    "KocConfig",
    "koc_wealth",
    "koc_log_wealth",
    "koc_log_wealth_bounds",
    "jensen_reference",
    "log_sum_exp_bounds",
    "koc_asymptotic_growth",
]

_WEIGHT_SUM_TOL = 1e-12


@dataclass(frozen=True)
class KocConfig:
    """Hedge parameters of the two components and the mixing weight."""

    c1: float
    c2: float
    a: float

    def __post_init__(self) -> None:
        if not (0.0 < self.a < 1.0):
            raise ParameterError(f"mixing weight must lie in (0, 1), got a={self.a}")

    def straddles(self, pivot: float) -> bool:
        """True when the components bracket the pivot hedge parameter.

        The robustness construction wants ``c1 < pivot < c2``; other
        configurations are accepted but should be flagged in reports.
        """
        return self.c1 < pivot < self.c2


def koc_wealth(w1: float, w2: float, a: float) -> float:
    """Combined wealth ``a*w1 + (1-a)*w2`` (level domain)."""
    if w1 <= 0.0 or w2 <= 0.0:
        raise ParameterError(f"wealth must be positive, got w1={w1}, w2={w2}")
    if not (0.0 < a < 1.0):
        raise ParameterError(f"mixing weight must lie in (0, 1), got a={a}")
    return a * w1 + (1.0 - a) * w2


def koc_log_wealth(logw1: float, logw2: float, a: float) -> float:
    """``log(a*exp(logw1) + (1-a)*exp(logw2))``, overflow-safe.

    Max-shifted and evaluated through log1p/expm1 so the result never
    exceeds ``max(logw1, logw2)`` and never falls below
    ``max + log(min(a, 1-a))`` even in floating point.
    """
    if logw1 >= logw2:
        top, other, w_other = logw1, logw2, 1.0 - a
    else:
        top, other, w_other = logw2, logw1, a
    # w_other*expm1(y) is in [-w_other, 0], so log1p stays in [log(1-w_other), 0]
    return top + math.log1p(w_other * math.expm1(other - top))


def koc_log_wealth_bounds(logw1: float, logw2: float, a: float) -> tuple[float, float, float]:
    """``(lower, value, upper)`` of the combined log wealth.

    The bounds come from the same log1p route as the value, which makes
    ``lower <= value <= upper`` hold exactly in floating point.
    """
    top = logw1 if logw1 >= logw2 else logw2
    w_max = a if a >= 1.0 - a else 1.0 - a
    return (top + math.log1p(-w_max), koc_log_wealth(logw1, logw2, a), top)


def jensen_reference(logw1: float, logw2: float, a: float, n: int) -> float:
    """Weighted average of the per-period component log growths.

    Evaluated after shifting both log wealths by their maximum, which keeps
    the comparison against the combined growth sharp when the components
    nearly coincide.
    """
    if n < 1:
        raise ParameterError(f"period count must be >= 1, got n={n}")
    top = logw1 if logw1 >= logw2 else logw2
    return (top + (a * (logw1 - top) + (1.0 - a) * (logw2 - top))) / n


def log_sum_exp_bounds(
    xs: Sequence[float], lambdas: Sequence[float]
) -> tuple[float, float, float]:
    """``log(sum_i lambda_i * exp(x_i))`` with its squeeze bounds.

    Returns ``(max x + log(min lambda), value, max x)``.  Weights must be
    positive and sum to one within ``1e-12``; they are renormalized by their
    actual sum and the value is clamped into the bounds, which removes
    sub-ulp floating-point excursions (the true value always lies inside).
    """
    if len(xs) == 0 or len(xs) != len(lambdas):
        raise ParameterError(
            f"need equally sized nonempty lists, got {len(xs)} values and "
            f"{len(lambdas)} weights"
        )
    if any(lam <= 0.0 for lam in lambdas):
        raise ParameterError(f"weights must be positive, got {list(lambdas)}")
    total = math.fsum(lambdas)
    if abs(total - 1.0) > _WEIGHT_SUM_TOL:
        raise ParameterError(f"weights must sum to 1 within {_WEIGHT_SUM_TOL}, got {total}")
    top = max(xs)
    value = top + math.log(
        math.fsum(lam * math.exp(x - top) for x, lam in zip(xs, lambdas)) / total
    )
    lower = top + math.log(min(lambdas))
    upper = top
    return (lower, min(max(value, lower), upper), upper)


def koc_asymptotic_growth(g1: float, g2: float) -> float:
    """Long-run growth of the mix: the better component's growth rate."""
    return max(g1, g2)
