"""Randomized verification suites for the replication and feasibility results.

Each check draws admissible random parameter sets, evaluates an identity or
ordering that must hold for all of them, and reports the worst residual.
The CLI ``verify`` command runs the full battery and prints a report,
including the signed/absolute values of the short-selling threshold
``c_u(0)``, which is reported rather than asserted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kelly import ks_growth_derivative, ks_optimal_fraction
from .market import MarketParams, Move, OptionContract
from .option import (
    KoParams,
    feasibility_bounds,
    hedge_pivot,
    ko_optimal_g_value,
    ko_payoff,
    replication_check,
)

__all__ = [
    "CheckReport",
    "random_market",
    "random_contract",
    "check_replication",
    "check_payoff_ratio_identity",
    "check_bounds_ordering",
    "check_pivot_matches_kelly",
    "check_optimal_g_linearity",
    "check_positivity_ranges",
    "check_first_order_condition",
    "run_all_checks",
]


@dataclass(frozen=True)
class CheckReport:
    name: str
    passed: bool
    draws: int
    worst: float
    tolerance: float
    detail: str = ""


def random_market(rng: np.random.Generator) -> MarketParams:
    """Draw admissible parameters with margins that keep pricing well scaled."""
    d = rng.uniform(0.3, 0.95)
    u = rng.uniform(1.1, 3.0)
    R = d + rng.uniform(0.1, 0.7) * (u - d)
    p = rng.uniform(0.1, 0.9)
    return MarketParams(u=u, d=d, p=p, R=R)


def random_contract(rng: np.random.Generator, mkt: MarketParams) -> OptionContract:
    S0 = rng.uniform(50.0, 150.0)
    K0 = S0 * (mkt.d + rng.uniform(0.05, 0.95) * (mkt.u - mkt.d))
    return OptionContract.from_market(mkt, S0=S0, K0=K0)


def check_replication(draws: int = 1000, seed: int = 0, rel_tol: float = 1e-10) -> CheckReport:
    """Optimal hedged payoffs equal the Kelly payoffs branch by branch."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    passed = True
    for _ in range(draws):
        mkt = random_market(rng)
        ko = KoParams.from_contract(mkt, random_contract(rng, mkt))
        c = hedge_pivot(ko, mkt) + rng.uniform(-3.0, 3.0)
        report = replication_check(c, ko, mkt, rel_tol=rel_tol)
        scale = max(abs(report.up_residual), abs(report.down_residual))
        worst = max(worst, scale)
        passed = passed and report.passed
    return CheckReport("replication", passed, draws, worst, rel_tol)


def check_payoff_ratio_identity(draws: int = 1000, seed: int = 1, tol: float = 1e-12) -> CheckReport:
    """(R - u~)/(R - u) equals (R - d~)/(R - d) and both are positive."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    passed = True
    for _ in range(draws):
        mkt = random_market(rng)
        ko = KoParams.from_contract(mkt, random_contract(rng, mkt))
        left = (mkt.R - ko.u_tilde) / (mkt.R - mkt.u)
        right = (mkt.R - ko.d_tilde) / (mkt.R - mkt.d)
        rel = abs(left - right) / abs(right)
        worst = max(worst, rel)
        passed = passed and rel <= tol and left > 0.0
    return CheckReport("payoff-ratio-identity", passed, draws, worst, tol)


def check_bounds_ordering(draws: int = 1000, seed: int = 2, tol: float = 1e-12) -> CheckReport:
    """c_u(g) < c_d(g) everywhere, and both bounds strictly decrease in g."""
    rng = np.random.default_rng(seed)
    worst = -np.inf
    passed = True
    for _ in range(draws):
        mkt = random_market(rng)
        ko = KoParams.from_contract(mkt, random_contract(rng, mkt))
        g1, g2 = sorted(rng.uniform(-10.0, 10.0, size=2))
        if g2 - g1 < 1e-6:
            g2 = g1 + 1e-6
        lo1, hi1 = feasibility_bounds(g1, ko, mkt)
        lo2, hi2 = feasibility_bounds(g2, ko, mkt)
        scale = max(1.0, abs(lo1), abs(hi1), abs(lo2), abs(hi2))
        # ordering within each g, monotone decrease across g
        margin = max(lo1 - hi1, lo2 - hi2, lo2 - lo1, hi2 - hi1) / scale
        worst = max(worst, margin)
        passed = passed and margin <= tol
    return CheckReport("bounds-ordering", passed, draws, float(worst), tol)


def check_pivot_matches_kelly(draws: int = 100, seed: int = 3, tol: float = 1e-10) -> CheckReport:
    """The root of g*(c) = 0 equals the Kelly stock fraction."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    passed = True
    for _ in range(draws):
        mkt = random_market(rng)
        ko = KoParams.from_contract(mkt, random_contract(rng, mkt))
        pivot = hedge_pivot(ko, mkt)
        f_star = ks_optimal_fraction(mkt).f_star
        err = abs(pivot - f_star) / max(1.0, abs(f_star))
        worst = max(worst, err)
        passed = passed and err <= tol
    return CheckReport("pivot-equals-kelly-fraction", passed, draws, worst, tol)


def check_optimal_g_linearity(draws: int = 200, seed: int = 4, tol: float = 1e-12) -> CheckReport:
    """g*(c) is affine in c with slope -(u - R)/(u~ - R)."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    passed = True
    for _ in range(draws):
        mkt = random_market(rng)
        ko = KoParams.from_contract(mkt, random_contract(rng, mkt))
        c0 = rng.uniform(-2.0, 2.0)
        h = rng.uniform(0.1, 1.0)
        g0 = ko_optimal_g_value(c0, ko, mkt)
        g1 = ko_optimal_g_value(c0 + h, ko, mkt)
        g2 = ko_optimal_g_value(c0 + 2.0 * h, ko, mkt)
        slope = -(mkt.u - mkt.R) / (ko.u_tilde - mkt.R)
        scale = max(1.0, abs(g0), abs(g2))
        err = max(abs(g2 - 2.0 * g1 + g0), abs((g1 - g0) / h - slope)) / scale
        worst = max(worst, err)
        passed = passed and err <= tol
    return CheckReport("optimal-g-linearity", passed, draws, worst, tol)


def check_positivity_ranges(draws: int = 500, seed: int = 5) -> CheckReport:
    """Payoffs stay positive on sampled leveraged/short option fractions.

    For g > 1 the admissible hedge interval sits below c_d(1); for g < 0 it
    sits above c_u(0).  Sampled on bounded ranges g in (1, 10] and [-10, 0).
    """
    rng = np.random.default_rng(seed)
    passed = True
    for _ in range(draws):
        mkt = random_market(rng)
        ko = KoParams.from_contract(mkt, random_contract(rng, mkt))
        _, cd1 = feasibility_bounds(1.0, ko, mkt)
        cu0, _ = feasibility_bounds(0.0, ko, mkt)
        g_long = rng.uniform(1.0 + 1e-6, 10.0)
        lo, hi = feasibility_bounds(g_long, ko, mkt)
        passed = passed and hi < cd1
        c = rng.uniform(lo, min(hi, cd1))
        if lo < c < hi:
            passed = passed and ko_payoff(g_long, c, Move.UP, ko, mkt) > 0.0
            passed = passed and ko_payoff(g_long, c, Move.DOWN, ko, mkt) > 0.0
        g_short = rng.uniform(-10.0, -1e-6)
        lo, hi = feasibility_bounds(g_short, ko, mkt)
        passed = passed and lo > cu0
        c = rng.uniform(max(lo, cu0), hi)
        if lo < c < hi:
            passed = passed and ko_payoff(g_short, c, Move.UP, ko, mkt) > 0.0
            passed = passed and ko_payoff(g_short, c, Move.DOWN, ko, mkt) > 0.0
    return CheckReport("positivity-ranges", passed, draws, 0.0, 0.0)


def check_first_order_condition(draws: int = 500, seed: int = 6, tol: float = 1e-10) -> CheckReport:
    """The growth derivative vanishes at the closed-form Kelly fraction."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    passed = True
    for _ in range(draws):
        mkt = random_market(rng)
        err = abs(ks_growth_derivative(ks_optimal_fraction(mkt).f_star, mkt))
        worst = max(worst, err)
        passed = passed and err <= tol
    return CheckReport("kelly-first-order-condition", passed, draws, worst, tol)


def run_all_checks(draws: int = 1000, seed: int = 0) -> list[CheckReport]:
    small = max(100, draws // 10)
    return [
        check_replication(draws=draws, seed=seed),
        check_payoff_ratio_identity(draws=draws, seed=seed + 1),
        check_bounds_ordering(draws=draws, seed=seed + 2),
        check_pivot_matches_kelly(draws=small, seed=seed + 3),
        check_optimal_g_linearity(draws=small * 2, seed=seed + 4),
        check_positivity_ranges(draws=max(100, draws // 2), seed=seed + 5),
        check_first_order_condition(draws=max(100, draws // 2), seed=seed + 6),
    ]
