"""Growth-optimal (Kelly) portfolios on a binomial market, with put hedging.

The package covers the plain stock/bond Kelly strategy, its stock/put/bond
extension with a rolling-strike one-period put, convex mixes of two hedged
portfolios that are robust to a misspecified up factor, and a reproducible
Monte Carlo harness for comparing them.
"""

from .convex import (
    KocConfig,
    jensen_reference,
    koc_asymptotic_growth,
    koc_log_wealth,
    koc_log_wealth_bounds,
    koc_wealth,
    log_sum_exp_bounds,
)
from .errors import FeasibilityError, ParameterError
from .kelly import (
    KsSolution,
    ks_constrained_fraction,
    ks_feasible_interval,
    ks_grid_oracle,
    ks_growth_derivative,
    ks_growth_rate,
    ks_optimal_fraction,
)
from .market import (
    DOWN,
    UP,
    MarketParams,
    Move,
    OptionContract,
    PricePath,
    RealizedMarket,
    generate_path,
    put_price,
    roll_strike,
)
from .option import (
    KoParams,
    KoSolution,
    ReplicationReport,
    feasibility_bounds,
    hedge_pivot,
    ko_feasible_g_interval,
    ko_grid_oracle,
    ko_growth_rate,
    ko_optimal_g,
    ko_optimal_g_value,
    ko_payoff,
    replication_check,
)
from .simulate import (
    CSV_COLUMNS,
    ConvergenceResult,
    ExperimentConfig,
    ExperimentPaths,
    GapRow,
    ResultRow,
    StrategyPaths,
    StrategySpec,
    SweepResult,
    convergence_study,
    default_um_grid,
    experiment_paths,
    misspecification_sweep,
    run_experiment,
    simulate_wealth,
)

__version__ = "0.1.0"

__all__ = [
    "CSV_COLUMNS",
    "ConvergenceResult",
    "DOWN",
    "ExperimentConfig",
    "ExperimentPaths",
    "FeasibilityError",
    "GapRow",
    "KoParams",
    "KoSolution",
    "KocConfig",
    "KsSolution",
    "MarketParams",
    "Move",
    "OptionContract",
    "ParameterError",
    "PricePath",
    "RealizedMarket",
    "ReplicationReport",
    "ResultRow",
    "StrategyPaths",
    "StrategySpec",
    "SweepResult",
    "UP",
    "convergence_study",
    "default_um_grid",
    "experiment_paths",
    "feasibility_bounds",
    "generate_path",
    "hedge_pivot",
    "jensen_reference",
    "ko_feasible_g_interval",
    "ko_grid_oracle",
    "ko_growth_rate",
    "ko_optimal_g",
    "ko_optimal_g_value",
    "ko_payoff",
    "koc_asymptotic_growth",
    "koc_log_wealth",
    "koc_log_wealth_bounds",
    "koc_wealth",
    "ks_constrained_fraction",
    "ks_feasible_interval",
    "ks_grid_oracle",
    "ks_growth_derivative",
    "ks_growth_rate",
    "ks_optimal_fraction",
    "log_sum_exp_bounds",
    "misspecification_sweep",
    "put_price",
    "replication_check",
    "roll_strike",
    "run_experiment",
    "simulate_wealth",
]
