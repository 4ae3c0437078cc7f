"""Classical growth-optimal (Kelly) stock/bond strategy.

The investor holds a constant fraction ``f`` in the stock and ``1 - f`` in
the bond, and maximizes the expected log of the one-period relative payoff
``pi_f(X) = f*X + (1 - f)*R``.  Everything here is closed form; a brute-force
grid search is provided as an independent cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import FeasibilityError, ParameterError
from .market import MarketParams

__all__ = [
    "KsSolution",
    "ks_growth_rate",
    "ks_growth_derivative",
    "ks_optimal_fraction",
    "ks_constrained_fraction",
    "ks_feasible_interval",
    "ks_grid_oracle",
]

# relative shrink applied to the open feasibility interval before grid search
_EDGE_SHRINK = 1e-9


@dataclass(frozen=True)
class KsSolution:
    """Optimal stock fraction and its asymptotic growth rate (nats/period)."""

    f_star: float
    growth: float


def ks_growth_rate(f: float, mkt: MarketParams) -> float:
    """Expected log relative payoff ``p*log(pi_f(u)) + (1-p)*log(pi_f(d))``.

    Raises
    ------
    FeasibilityError
        If either payoff branch is non-positive, i.e. the fraction admits ruin.
    """
    pay_u = f * (mkt.u - mkt.R) + mkt.R
    pay_d = f * (mkt.d - mkt.R) + mkt.R
    if pay_u <= 0.0 or pay_d <= 0.0:
        raise FeasibilityError(
            f"fraction f={f} gives non-positive payoff (up={pay_u}, down={pay_d})"
        )
    return mkt.p * math.log(pay_u) + (1.0 - mkt.p) * math.log(pay_d)


def ks_growth_derivative(f: float, mkt: MarketParams) -> float:
    """First derivative of the growth rate in ``f`` (zero at the optimum)."""
    return mkt.p * (mkt.u - mkt.R) / (mkt.R + f * (mkt.u - mkt.R)) + (
        1.0 - mkt.p
    ) * (mkt.d - mkt.R) / (mkt.R + f * (mkt.d - mkt.R))


def ks_optimal_fraction(mkt: MarketParams) -> KsSolution:
    """Unconstrained optimal fraction from the first-order condition.

    No arbitrage guarantees a finite interior optimum, which may be negative
    (short the stock) or above one (leverage).
    """
    f_star = (
        mkt.p * (mkt.R - mkt.u) * mkt.R + (1.0 - mkt.p) * (mkt.R - mkt.d) * mkt.R
    ) / ((mkt.u - mkt.R) * (mkt.d - mkt.R))
    return KsSolution(f_star=f_star, growth=ks_growth_rate(f_star, mkt))


def ks_constrained_fraction(mkt: MarketParams) -> KsSolution:
    """Optimal fraction with ``f`` restricted to [0, 1].

    The case split is driven by the two expectations E[X/R] and E[R/X]:
    both at least one selects the interior solution, a favorable game with
    E[R/X] < 1 pushes everything into the stock, and an unfavorable one with
    E[X/R] < 1 pushes everything into the bond.
    """
    e_x_over_r = (mkt.p * mkt.u + (1.0 - mkt.p) * mkt.d) / mkt.R
    e_r_over_x = mkt.p * mkt.R / mkt.u + (1.0 - mkt.p) * mkt.R / mkt.d
    if e_x_over_r > 1.0 and e_r_over_x < 1.0:
        f_star = 1.0
    elif e_x_over_r >= 1.0 and e_r_over_x >= 1.0:
        f_star = ks_optimal_fraction(mkt).f_star
    elif e_x_over_r < 1.0 and e_r_over_x > 1.0:
        f_star = 0.0
    else:
        # unreachable for valid parameters (Cauchy-Schwarz forces
        # E[X/R]*E[R/X] >= 1); kept as a guard with full diagnostics
        raise ParameterError(
            f"constrained case split not exhaustive: E[X/R]={e_x_over_r}, "
            f"E[R/X]={e_r_over_x}"
        )
    return KsSolution(f_star=f_star, growth=ks_growth_rate(f_star, mkt))


def ks_feasible_interval(mkt: MarketParams) -> tuple[float, float]:
    """Open interval of fractions with strictly positive payoffs on both branches."""
    return (-mkt.R / (mkt.u - mkt.R), mkt.R / (mkt.R - mkt.d))


def ks_grid_oracle(mkt: MarketParams, resolution: int) -> float:
    """Brute-force argmax of the growth rate over a uniform fraction grid.

    Independent of the closed form; used to cross-check it.  The open
    interval endpoints are shrunk by a relative ``1e-9`` to avoid log(0).
    """
    if resolution < 1000:
        raise ParameterError(f"grid resolution must be >= 1000, got {resolution}")
    lo, hi = ks_feasible_interval(mkt)
    width = hi - lo
    fs = np.linspace(lo + _EDGE_SHRINK * width, hi - _EDGE_SHRINK * width, resolution)
    growth = mkt.p * np.log(fs * (mkt.u - mkt.R) + mkt.R) + (1.0 - mkt.p) * np.log(
        fs * (mkt.d - mkt.R) + mkt.R
    )
    return float(fs[int(np.argmax(growth))])
