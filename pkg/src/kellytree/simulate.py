"""Monte Carlo wealth simulation under believed vs realized dynamics.

Strategy weights are always computed from the *believed* parameters; the
realized factors ``(u_m, d_m)`` only decide which payoff each outcome maps
to.  Because the put strike rolls with the realized price (``K_t`` tracks
``S_t`` so ``K_t/S_t`` and ``S_t/P_t`` stay constant) the per-period
relative payoff of every strategy is a constant per outcome:

    linear (stock fraction f):   f*(x - R) + R
    hedged (fractions g, c):     g*(S0/P0)*((K0/S0 - x)^+ + (x - R))
                                   + (1 - g)*R + c*(x - R)

with ``x`` in ``{u_m, d_m}`` and the put settled by the generic payoff
``(K - S)^+``, which also covers realized regimes where an up move leaves
the put in the money.  A non-positive payoff marks the path as ruined at
that step: wealth is zero afterwards and the path is excluded from mean
growth (ruin counts are always reported).

Each path draws its outcomes from a Philox stream keyed by
``(seed, path_index)``, so results do not depend on execution order, and
aggregation uses exact summation, so repeated runs are bit-identical.
"""

from __future__ import annotations

import dataclasses
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .convex import koc_log_wealth
from .errors import ParameterError
from .kelly import ks_optimal_fraction
from .market import MarketParams, OptionContract, PricePath, RealizedMarket, generate_path
from .option import KoParams, hedge_pivot, ko_optimal_g

__all__ = [
    "StrategySpec",
    "ExperimentConfig",
    "ResultRow",
    "SweepResult",
    "ExperimentPaths",
    "StrategyPaths",
    "ConvergenceResult",
    "GapRow",
    "CSV_COLUMNS",
    "simulate_wealth",
    "experiment_paths",
    "run_experiment",
    "misspecification_sweep",
    "convergence_study",
    "default_um_grid",
]

CSV_COLUMNS = (
    "u_m",
    "strategy",
    "c",
    "g_star",
    "f",
    "n",
    "N",
    "mean_growth",
    "stderr",
    "ruin_count",
    "seed",
)

_KINDS = ("ks", "ko", "koc", "bond", "stock")


@dataclass(frozen=True)
class StrategySpec:
    """Descriptor of one constant-fraction strategy.

    kinds
    -----
    ks     stock/bond Kelly; ``f`` optional (defaults to the optimal fraction)
    ko     stock/put/bond at hedge parameter ``c`` with the optimal ``g*(c)``
    koc    convex mix of two ko strategies: ``c1``, ``c2``, weight ``a``
    bond   everything in the bond
    stock  everything in the stock
    """

    kind: str
    f: float | None = None
    c: float | None = None
    c1: float | None = None
    c2: float | None = None
    a: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ParameterError(f"unknown strategy kind {self.kind!r}, expected one of {_KINDS}")
        if self.kind == "ko" and self.c is None:
            raise ParameterError("ko strategy needs a hedge parameter c")
        if self.kind == "koc":
            if self.c1 is None or self.c2 is None or self.a is None:
                raise ParameterError("koc strategy needs c1, c2 and a")
            if not (0.0 < self.a < 1.0):
                raise ParameterError(f"mixing weight must lie in (0, 1), got a={self.a}")

    @property
    def label(self) -> str:
        if self.kind == "ks":
            return "ks" if self.f is None else f"ks[f={self.f:g}]"
        if self.kind == "ko":
            return f"ko[c={self.c:g}]"
        if self.kind == "koc":
            return f"koc[c1={self.c1:g};c2={self.c2:g};a={self.a:g}]"
        return self.kind

    def to_dict(self) -> dict:
        out: dict = {"kind": self.kind}
        for name in ("f", "c", "c1", "c2", "a"):
            value = getattr(self, name)
            if value is not None:
                out[name] = float(value)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "StrategySpec":
        if "kind" not in data:
            raise ParameterError(f"strategy entry needs a 'kind' field, got {data}")
        known = {"kind", "f", "c", "c1", "c2", "a"}
        unknown = set(data) - known
        if unknown:
            raise ParameterError(f"unknown strategy fields {sorted(unknown)} in {data}")
        return cls(**data)


@dataclass(frozen=True)
class ExperimentConfig:
    """One Monte Carlo experiment: market beliefs, realized factors, strategies."""

    believed: MarketParams
    realized: RealizedMarket
    option: OptionContract | None
    strategies: tuple[StrategySpec, ...]
    n: int
    N: int
    seed: int

    def __post_init__(self) -> None:
        if self.n < 1 or self.N < 1:
            raise ParameterError(f"need n >= 1 and N >= 1, got n={self.n}, N={self.N}")
        if not self.strategies:
            raise ParameterError("experiment needs at least one strategy")

    def to_dict(self) -> dict:
        out = {
            "believed": {
                "u": self.believed.u,
                "d": self.believed.d,
                "p": self.believed.p,
                "R": self.believed.R,
            },
            "realized": {"u_m": self.realized.u_m, "d_m": self.realized.d_m},
            "strategies": [s.to_dict() for s in self.strategies],
            "steps": self.n,
            "paths": self.N,
            "seed": self.seed,
        }
        if self.option is not None:
            out["option"] = {"S0": self.option.S0, "K0": self.option.K0}
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        try:
            bel = data["believed"]
            believed = MarketParams(
                u=float(bel["u"]), d=float(bel["d"]), p=float(bel["p"]), R=float(bel["R"])
            )
            real = data["realized"]
            if "d_m" in real:
                realized = RealizedMarket(u_m=float(real["u_m"]), d_m=float(real["d_m"]))
            else:
                realized = RealizedMarket.from_up_factor(float(real["u_m"]))
            option = None
            if "option" in data and data["option"] is not None:
                opt = data["option"]
                option = OptionContract.from_market(
                    believed, S0=float(opt["S0"]), K0=float(opt["K0"])
                )
            strategies = tuple(StrategySpec.from_dict(s) for s in data["strategies"])
            return cls(
                believed=believed,
                realized=realized,
                option=option,
                strategies=strategies,
                n=int(data["steps"]),
                N=int(data["paths"]),
                seed=int(data["seed"]),
            )
        except KeyError as exc:
            raise ParameterError(f"experiment config is missing field {exc}") from exc


# --------------------------------------------------------------------------
# strategy resolution (believed parameters only)
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class _Linear:
    f: float


@dataclass(frozen=True)
class _Hedged:
    g: float
    c: float


@dataclass(frozen=True)
class _Mixed:
    one: _Hedged
    two: _Hedged
    a: float


@dataclass(frozen=True)
class ResolvedStrategy:
    label: str
    program: _Linear | _Hedged | _Mixed
    c: float | None
    g_star: float | None
    f: float | None


def _resolve(spec: StrategySpec, believed: MarketParams, option: OptionContract | None) -> ResolvedStrategy:
    if spec.kind == "bond":
        return ResolvedStrategy(spec.label, _Linear(0.0), None, None, 0.0)
    if spec.kind == "stock":
        return ResolvedStrategy(spec.label, _Linear(1.0), None, None, 1.0)
    if spec.kind == "ks":
        f = ks_optimal_fraction(believed).f_star if spec.f is None else spec.f
        return ResolvedStrategy(spec.label, _Linear(f), None, None, f)
    if option is None:
        raise ParameterError(
            f"strategy {spec.label!r} needs an option contract but none is configured"
        )
    ko = KoParams.from_contract(believed, option)
    if spec.kind == "ko":
        sol = ko_optimal_g(spec.c, ko, believed)
        return ResolvedStrategy(spec.label, _Hedged(sol.g_star, spec.c), spec.c, sol.g_star, sol.f_implied)
    # koc: two hedged components mixed once, no rebalancing between them
    sol1 = ko_optimal_g(spec.c1, ko, believed)
    sol2 = ko_optimal_g(spec.c2, ko, believed)
    pivot = hedge_pivot(ko, believed)
    if not (spec.c1 < pivot < spec.c2):
        warnings.warn(
            f"koc components do not straddle the pivot hedge parameter "
            f"({spec.c1}, {spec.c2}) vs pivot {pivot}; the mix will not be "
            f"robust to misspecification in both directions",
            stacklevel=2,
        )
    return ResolvedStrategy(
        spec.label,
        _Mixed(_Hedged(sol1.g_star, spec.c1), _Hedged(sol2.g_star, spec.c2), spec.a),
        None,
        None,
        None,
    )


def _step_multiplier(
    program: _Linear | _Hedged, believed: MarketParams, option: OptionContract | None, x: float
) -> float:
    """One-period relative payoff when the realized gross return is ``x``."""
    if isinstance(program, _Linear):
        return program.f * (x - believed.R) + believed.R
    rho = option.stock_to_put
    put_leg = max(option.moneyness - x, 0.0) + (x - believed.R)
    return program.g * rho * put_leg + (1.0 - program.g) * believed.R + program.c * (
        x - believed.R
    )


# --------------------------------------------------------------------------
# per-path simulation
# --------------------------------------------------------------------------


def _wealth_sequence(m_up: float, m_dn: float, moves: np.ndarray) -> np.ndarray:
    mults = np.where(moves == 1, m_up, m_dn)
    wealth = np.empty(moves.shape[0] + 1)
    wealth[0] = 1.0
    np.cumprod(mults, out=wealth[1:])
    bad = np.nonzero(mults <= 0.0)[0]
    if bad.size:
        wealth[bad[0] + 1 :] = 0.0
    return wealth


def simulate_wealth(
    cfg: ExperimentConfig, strategy: StrategySpec, path: PricePath
) -> np.ndarray:
    """Wealth sequence ``W_0..W_n`` (``W_0 = 1``) along one realized path.

    Ruined paths hold zero wealth from the ruin step onwards.
    """
    resolved = _resolve(strategy, cfg.believed, cfg.option)
    x_up, x_dn = cfg.realized.u_m, cfg.realized.d_m
    if isinstance(resolved.program, _Mixed):
        mix = resolved.program
        w1 = _wealth_sequence(
            _step_multiplier(mix.one, cfg.believed, cfg.option, x_up),
            _step_multiplier(mix.one, cfg.believed, cfg.option, x_dn),
            path.moves,
        )
        w2 = _wealth_sequence(
            _step_multiplier(mix.two, cfg.believed, cfg.option, x_up),
            _step_multiplier(mix.two, cfg.believed, cfg.option, x_dn),
            path.moves,
        )
        return mix.a * w1 + (1.0 - mix.a) * w2
    return _wealth_sequence(
        _step_multiplier(resolved.program, cfg.believed, cfg.option, x_up),
        _step_multiplier(resolved.program, cfg.believed, cfg.option, x_dn),
        path.moves,
    )


# --------------------------------------------------------------------------
# batch engine
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class StrategyPaths:
    """Per-path terminal statistics for one strategy."""

    label: str
    c: float | None
    g_star: float | None
    f: float | None
    growth: np.ndarray  # (N,), nan where ruined
    log_wealth: np.ndarray  # (N,), nan where ruined
    ruined: np.ndarray  # (N,) bool
    component_log_wealth: tuple[np.ndarray, np.ndarray] | None = None
    component_ruined: tuple[np.ndarray, np.ndarray] | None = None
    mix_weight: float | None = None


@dataclass(frozen=True)
class ExperimentPaths:
    config: ExperimentConfig
    up_counts: np.ndarray  # (N,) int
    strategies: tuple[StrategyPaths, ...]


def _terminal_log_wealth(
    m_up: float, m_dn: float, up_counts: np.ndarray, n: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(growth, log_wealth, ruined) for constant per-outcome multipliers."""
    N = up_counts.shape[0]
    ruined = np.zeros(N, dtype=bool)
    if m_up <= 0.0:
        ruined |= up_counts >= 1
    if m_dn <= 0.0:
        ruined |= up_counts < n
    growth = np.full(N, np.nan)
    log_wealth = np.full(N, np.nan)
    alive = ~ruined
    if np.any(alive):
        log_up = math.log(m_up) if m_up > 0.0 else math.nan
        log_dn = math.log(m_dn) if m_dn > 0.0 else math.nan
        if log_up == log_dn:
            # path-independent strategy: growth is exactly the per-step log
            log_wealth[alive] = n * log_up
            growth[alive] = log_up
        else:
            k = up_counts[alive]
            lw = k * log_up + (n - k) * log_dn
            log_wealth[alive] = lw
            growth[alive] = lw / n
    return growth, log_wealth, ruined


def _hedged_terminal(
    program: _Hedged, cfg: ExperimentConfig, up_counts: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    m_up = _step_multiplier(program, cfg.believed, cfg.option, cfg.realized.u_m)
    m_dn = _step_multiplier(program, cfg.believed, cfg.option, cfg.realized.d_m)
    return _terminal_log_wealth(m_up, m_dn, up_counts, cfg.n)


def _strategy_paths(resolved: ResolvedStrategy, cfg: ExperimentConfig, up_counts: np.ndarray) -> StrategyPaths:
    if isinstance(resolved.program, _Mixed):
        mix = resolved.program
        _, x1, ruined1 = _hedged_terminal(mix.one, cfg, up_counts)
        _, x2, ruined2 = _hedged_terminal(mix.two, cfg, up_counts)
        N = up_counts.shape[0]
        log_wealth = np.full(N, np.nan)
        ruined = ruined1 & ruined2
        for i in range(N):
            if ruined1[i] and ruined2[i]:
                continue
            if ruined1[i]:
                # ruined component contributes zero wealth to the mix
                log_wealth[i] = math.log(1.0 - mix.a) + x2[i]
            elif ruined2[i]:
                log_wealth[i] = math.log(mix.a) + x1[i]
            else:
                log_wealth[i] = koc_log_wealth(x1[i], x2[i], mix.a)
        growth = log_wealth / cfg.n
        growth[ruined] = np.nan
        return StrategyPaths(
            label=resolved.label,
            c=None,
            g_star=None,
            f=None,
            growth=growth,
            log_wealth=log_wealth,
            ruined=ruined,
            component_log_wealth=(x1, x2),
            component_ruined=(ruined1, ruined2),
            mix_weight=mix.a,
        )
    m_up = _step_multiplier(resolved.program, cfg.believed, cfg.option, cfg.realized.u_m)
    m_dn = _step_multiplier(resolved.program, cfg.believed, cfg.option, cfg.realized.d_m)
    growth, log_wealth, ruined = _terminal_log_wealth(m_up, m_dn, up_counts, cfg.n)
    return StrategyPaths(
        label=resolved.label,
        c=resolved.c,
        g_star=resolved.g_star,
        f=resolved.f,
        growth=growth,
        log_wealth=log_wealth,
        ruined=ruined,
    )


def _up_counts(cfg: ExperimentConfig) -> np.ndarray:
    counts = np.empty(cfg.N, dtype=np.int64)
    for i in range(cfg.N):
        counts[i] = generate_path(cfg.believed, cfg.n, (cfg.seed, i)).up_count
    return counts


def experiment_paths(cfg: ExperimentConfig, *, up_counts: np.ndarray | None = None) -> ExperimentPaths:
    """Simulate all paths and return per-path terminal statistics per strategy.

    ``up_counts`` lets sweep drivers reuse the seeded draws when only the
    realized factors change; passing anything else breaks reproducibility.
    """
    if up_counts is None:
        up_counts = _up_counts(cfg)
    resolved = [_resolve(spec, cfg.believed, cfg.option) for spec in cfg.strategies]
    return ExperimentPaths(
        config=cfg,
        up_counts=up_counts,
        strategies=tuple(_strategy_paths(r, cfg, up_counts) for r in resolved),
    )


# --------------------------------------------------------------------------
# aggregation
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ResultRow:
    u_m: float
    strategy: str
    c: float | None
    g_star: float | None
    f: float | None
    n: int
    N: int
    mean_growth: float
    stderr: float
    ruin_count: int
    seed: int


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[ResultRow, ...]

    def to_csv_string(self) -> str:
        import csv
        import io

        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in self.rows:
            writer.writerow(
                [
                    _fmt(row.u_m),
                    row.strategy,
                    _fmt(row.c),
                    _fmt(row.g_star),
                    _fmt(row.f),
                    row.n,
                    row.N,
                    _fmt(row.mean_growth),
                    _fmt(row.stderr),
                    row.ruin_count,
                    row.seed,
                ]
            )
        return buf.getvalue()

    def to_csv(self, path: str) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv_string())


def _fmt(value: float | None) -> str:
    # 17 significant digits: lossless binary64 round trip
    if value is None:
        return ""
    if math.isnan(value):
        return "nan"
    return f"{value:.16e}"


def _mean_stderr(values: np.ndarray) -> tuple[float, float]:
    """Exactly summed mean (clamped into [min, max]) and unbiased standard error."""
    size = values.shape[0]
    if size == 0:
        return (math.nan, math.nan)
    mean = math.fsum(values) / size
    mean = min(max(mean, float(values.min())), float(values.max()))
    if size == 1:
        return (mean, 0.0)
    variance = math.fsum((v - mean) ** 2 for v in values) / (size - 1)
    return (mean, math.sqrt(variance) / math.sqrt(size))


def run_experiment(cfg: ExperimentConfig, *, up_counts: np.ndarray | None = None) -> SweepResult:
    """Aggregate per-path growth into one row per strategy.

    Ruined paths are excluded from the mean and counted separately; with no
    survivors the mean and standard error are reported as nan.
    """
    paths = experiment_paths(cfg, up_counts=up_counts)
    rows = []
    for sp in paths.strategies:
        surviving = sp.growth[~sp.ruined]
        mean, stderr = _mean_stderr(surviving)
        rows.append(
            ResultRow(
                u_m=cfg.realized.u_m,
                strategy=sp.label,
                c=sp.c,
                g_star=sp.g_star,
                f=sp.f,
                n=cfg.n,
                N=cfg.N,
                mean_growth=mean,
                stderr=stderr,
                ruin_count=int(np.count_nonzero(sp.ruined)),
                seed=cfg.seed,
            )
        )
    return SweepResult(rows=tuple(rows))


def default_um_grid() -> tuple[float, ...]:
    """Realized up factors 1.1 to 3.0 in steps of 0.05."""
    return tuple(1.1 + 0.05 * i for i in range(39))


def misspecification_sweep(
    base: ExperimentConfig, u_m_grid: tuple[float, ...] | list[float] | None = None
) -> SweepResult:
    """Re-run the experiment across realized up factors with ``d_m = 1/u_m``.

    Strategy weights stay fixed at the believed-parameter solutions, and the
    same seeded outcome paths are reused at every grid point (the realized
    factors only change the payoff mapping, not the Bernoulli draws).
    """
    grid = default_um_grid() if u_m_grid is None else tuple(u_m_grid)
    for u_m in grid:
        if u_m <= 1.0:
            raise ParameterError(f"sweep grid values must exceed 1, got {u_m}")
    counts = _up_counts(base)  # draws depend only on (p, n, N, seed): share them
    rows: list[ResultRow] = []
    for u_m in grid:
        cfg = dataclasses.replace(base, realized=RealizedMarket.from_up_factor(u_m))
        rows.extend(run_experiment(cfg, up_counts=counts).rows)
    return SweepResult(rows=tuple(rows))


@dataclass(frozen=True)
class GapRow:
    """Distance of the mixed strategy's mean growth from its best component."""

    n: int
    u_m: float
    koc_mean: float
    best_component_mean: float
    gap: float


@dataclass(frozen=True)
class ConvergenceResult:
    rows: SweepResult
    gaps: tuple[GapRow, ...]


def convergence_study(
    base: ExperimentConfig,
    n_grid: tuple[int, ...] | list[int],
    u_m_grid: tuple[float, ...] | list[float] | None = None,
) -> ConvergenceResult:
    """Sweep horizons and misspecifications, tracking the mix-vs-best gap.

    The squeeze bound forces the gap above ``-|log min(a, 1-a)|/n``, so it
    shrinks toward zero as the horizon grows.
    """
    n_values = tuple(int(n) for n in n_grid)
    if any(b <= a for a, b in zip(n_values, n_values[1:])):
        raise ParameterError(f"horizon grid must be ascending, got {n_values}")
    koc_specs = [s for s in base.strategies if s.kind == "koc"]
    if len(koc_specs) != 1:
        raise ParameterError("convergence study needs exactly one koc strategy")
    koc = koc_specs[0]
    ko_labels = {
        StrategySpec(kind="ko", c=koc.c1).label,
        StrategySpec(kind="ko", c=koc.c2).label,
    }
    have = {s.label for s in base.strategies}
    if not ko_labels <= have:
        raise ParameterError(
            f"convergence study needs ko strategies at both mix parameters, "
            f"missing {sorted(ko_labels - have)}"
        )
    all_rows: list[ResultRow] = []
    gaps: list[GapRow] = []
    for n in n_values:
        sweep = misspecification_sweep(dataclasses.replace(base, n=n), u_m_grid)
        all_rows.extend(sweep.rows)
        by_point: dict[float, dict[str, ResultRow]] = {}
        for row in sweep.rows:
            by_point.setdefault(row.u_m, {})[row.strategy] = row
        for u_m, rows in by_point.items():
            koc_mean = rows[koc.label].mean_growth
            best = max(rows[label].mean_growth for label in ko_labels)
            gaps.append(
                GapRow(
                    n=n,
                    u_m=u_m,
                    koc_mean=koc_mean,
                    best_component_mean=best,
                    gap=koc_mean - best,
                )
            )
    return ConvergenceResult(rows=SweepResult(rows=tuple(all_rows)), gaps=tuple(gaps))
