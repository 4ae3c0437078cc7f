"""Growth-optimal strategy with a rolling one-period put (stock/put/bond).

The portfolio is parametrized by the option fraction ``g`` and the hedging
parameter ``c = f - (S0/P0)*g``, which measures net stock exposure relative
to the put cover.  The put-plus-stock leg has transformed per-unit payoffs

    u~ = (u - R) * S0/P0          on an up move (put expires worthless)
    d~ = K0/P0 - R * S0/P0        on a down move (put exercised)

For every ``c`` the optimal ``g*(c)`` replicates the plain Kelly portfolio:
the relative payoffs coincide branch by branch, so adding the (fairly priced)
option never changes the optimal growth rate.  The value of ``c`` at which
``g*`` vanishes equals the Kelly stock fraction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import FeasibilityError, ParameterError
from .kelly import ks_optimal_fraction
from .market import MarketParams, Move, OptionContract

__all__ = [
    "KoParams",
    "KoSolution",
    "ReplicationReport",
    "ko_payoff",
    "ko_optimal_g",
    "ko_optimal_g_value",
    "ko_growth_rate",
    "feasibility_bounds",
    "hedge_pivot",
    "replication_check",
    "ko_grid_oracle",
    "ko_feasible_g_interval",
]

_EDGE_SHRINK = 1e-9


@dataclass(frozen=True)
class KoParams:
    """Transformed payoffs of the put-plus-stock leg, plus the spot/put ratio."""

    u_tilde: float
    d_tilde: float
    stock_to_put: float

    @classmethod
    def from_contract(cls, mkt: MarketParams, contract: OptionContract) -> "KoParams":
        rho = contract.S0 / contract.P0
        return cls(
            u_tilde=(mkt.u - mkt.R) * rho,
            d_tilde=contract.K0 / contract.P0 - mkt.R * rho,
            stock_to_put=rho,
        )


@dataclass(frozen=True)
class KoSolution:
    """Optimal option fraction for a given hedge parameter ``c``.

    ``f_implied`` is the stock fraction of the stock/bond portfolio that
    replicates the optimal payoffs, ``c + g_star*(u~ - d~)/(u - d)``; it
    equals the Kelly fraction for every ``c``.  The hedged portfolio's own
    stock fraction is ``c + (S0/P0)*g_star`` and varies with ``c``.
    """

    c: float
    g_star: float
    f_implied: float
    growth: float


def ko_payoff(
    g: float, c: float, outcome: Move | int, ko: KoParams, mkt: MarketParams
) -> float:
    """One-period relative payoff of the (g, c) portfolio on the believed tree."""
    if outcome == Move.UP:
        return g * ko.u_tilde + (1.0 - g) * mkt.R + c * (mkt.u - mkt.R)
    return g * ko.d_tilde + (1.0 - g) * mkt.R + c * (mkt.d - mkt.R)


def ko_growth_rate(g: float, c: float, ko: KoParams, mkt: MarketParams) -> float:
    """Expected log relative payoff of the (g, c) portfolio.

    Raises
    ------
    FeasibilityError
        If either payoff branch is non-positive.
    """
    pay_u = ko_payoff(g, c, Move.UP, ko, mkt)
    pay_d = ko_payoff(g, c, Move.DOWN, ko, mkt)
    if pay_u <= 0.0 or pay_d <= 0.0:
        raise FeasibilityError(
            f"(g={g}, c={c}) gives non-positive payoff (up={pay_u}, down={pay_d})"
        )
    return mkt.p * math.log(pay_u) + (1.0 - mkt.p) * math.log(pay_d)


def ko_optimal_g_value(c: float, ko: KoParams, mkt: MarketParams) -> float:
    """``g*(c)`` alone, without the feasibility check or growth evaluation."""
    ut, dt, R, p = ko.u_tilde, ko.d_tilde, mkt.R, mkt.p
    return (
        p * (R - ut) * (R + c * (mkt.d - R)) + (1.0 - p) * (R - dt) * (R + c * (mkt.u - R))
    ) / ((dt - R) * (ut - R))


def ko_optimal_g(c: float, ko: KoParams, mkt: MarketParams) -> KoSolution:
    """Closed-form optimal option fraction for hedge parameter ``c``.

    ``g*`` is affine in ``c`` with slope ``-(u - R)/(u~ - R)``.
    """
    g_star = ko_optimal_g_value(c, ko, mkt)
    growth = ko_growth_rate(g_star, c, ko, mkt)  # raises if branches not positive
    replicating_f = c + g_star * (ko.u_tilde - ko.d_tilde) / (mkt.u - mkt.d)
    return KoSolution(c=c, g_star=g_star, f_implied=replicating_f, growth=growth)


def feasibility_bounds(g: float, ko: KoParams, mkt: MarketParams) -> tuple[float, float]:
    """Hedge-parameter interval ``(c_u(g), c_d(g))`` with positive payoffs.

    The up-branch payoff is increasing in ``c`` and positive above ``c_u(g)``;
    the down branch is decreasing and positive below ``c_d(g)``.  Always
    ``c_u(g) < c_d(g)``, and both bounds decrease in ``g``.
    """
    c_lower = -(g * ko.u_tilde + (1.0 - g) * mkt.R) / (mkt.u - mkt.R)
    c_upper = -(g * ko.d_tilde + (1.0 - g) * mkt.R) / (mkt.d - mkt.R)
    return (c_lower, c_upper)


def hedge_pivot(ko: KoParams, mkt: MarketParams) -> float:
    """The hedge parameter at which the optimal option fraction vanishes.

    Solved exactly from the affine form of ``g*(c)``; equals the Kelly stock
    fraction of the same market.
    """
    g0 = ko_optimal_g_value(0.0, ko, mkt)
    return g0 * (ko.u_tilde - mkt.R) / (mkt.u - mkt.R)


@dataclass(frozen=True)
class ReplicationReport:
    """Branch-by-branch comparison of optimal KO payoffs against Kelly payoffs."""

    passed: bool
    c: float
    g_star: float
    f_star: float
    up_residual: float
    down_residual: float
    rel_tol: float


def replication_check(
    c: float,
    ko: KoParams,
    mkt: MarketParams,
    g: float | None = None,
    rel_tol: float = 1e-10,
) -> ReplicationReport:
    """Check that the optimal (g*(c), c) payoffs equal the Kelly payoffs.

    Passing an explicit ``g`` overrides the optimum, which is useful to
    demonstrate that the identity fails away from it.
    """
    f_star = ks_optimal_fraction(mkt).f_star
    g_val = ko_optimal_g_value(c, ko, mkt) if g is None else g
    res_u = ko_payoff(g_val, c, Move.UP, ko, mkt) - (f_star * (mkt.u - mkt.R) + mkt.R)
    res_d = ko_payoff(g_val, c, Move.DOWN, ko, mkt) - (f_star * (mkt.d - mkt.R) + mkt.R)
    scale_u = abs(f_star * (mkt.u - mkt.R) + mkt.R)
    scale_d = abs(f_star * (mkt.d - mkt.R) + mkt.R)
    passed = abs(res_u) <= rel_tol * scale_u and abs(res_d) <= rel_tol * scale_d
    return ReplicationReport(
        passed=passed,
        c=c,
        g_star=g_val,
        f_star=f_star,
        up_residual=res_u,
        down_residual=res_d,
        rel_tol=rel_tol,
    )


def ko_feasible_g_interval(c: float, ko: KoParams, mkt: MarketParams) -> tuple[float, float]:
    """Open interval of option fractions with positive payoffs at fixed ``c``.

    Obtained by inverting the two payoff positivity constraints in ``g``
    (valid because ``u~ > R`` and ``d~ < R`` for admissible strikes).
    """
    if not (ko.u_tilde > mkt.R and ko.d_tilde < mkt.R):
        raise ParameterError(
            f"transformed payoffs must straddle R, got u~={ko.u_tilde}, "
            f"d~={ko.d_tilde}, R={mkt.R}"
        )
    g_lo = -(mkt.R + c * (mkt.u - mkt.R)) / (ko.u_tilde - mkt.R)
    g_hi = (mkt.R + c * (mkt.d - mkt.R)) / (mkt.R - ko.d_tilde)
    if g_lo >= g_hi:
        raise FeasibilityError(f"no feasible option fraction at c={c}")
    return (g_lo, g_hi)


def ko_grid_oracle(c: float, ko: KoParams, mkt: MarketParams, resolution: int) -> float:
    """Brute-force argmax of the growth rate over ``g`` at fixed ``c``."""
    if resolution < 1000:
        raise ParameterError(f"grid resolution must be >= 1000, got {resolution}")
    lo, hi = ko_feasible_g_interval(c, ko, mkt)
    width = hi - lo
    gs = np.linspace(lo + _EDGE_SHRINK * width, hi - _EDGE_SHRINK * width, resolution)
    pay_u = gs * ko.u_tilde + (1.0 - gs) * mkt.R + c * (mkt.u - mkt.R)
    pay_d = gs * ko.d_tilde + (1.0 - gs) * mkt.R + c * (mkt.d - mkt.R)
    growth = mkt.p * np.log(pay_u) + (1.0 - mkt.p) * np.log(pay_d)
    return float(gs[int(np.argmax(growth))])
