"""Command-line front end: closed-form queries, sweeps, simulation, checks.

Exit codes: 0 success, 2 validation error, 3 runtime infeasibility (for
example a sweep row whose paths are all ruined, or a failed verify suite).
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import sys
from pathlib import Path

import yaml

from .checks import run_all_checks
from .errors import FeasibilityError, ParameterError
from .kelly import ks_constrained_fraction, ks_grid_oracle, ks_optimal_fraction
from .market import MarketParams, OptionContract, generate_path
from .option import (
    KoParams,
    feasibility_bounds,
    hedge_pivot,
    ko_grid_oracle,
    ko_growth_rate,
    ko_optimal_g,
    ko_optimal_g_value,
)
from .simulate import (
    ExperimentConfig,
    ResultRow,
    SweepResult,
    convergence_study,
    default_um_grid,
    misspecification_sweep,
    run_experiment,
    simulate_wealth,
)

LOG2 = math.log(2.0)


def _fmt(v: float) -> str:
    return f"{v:.12g}"


def _print_kv(pairs: list[tuple[str, object]]) -> None:
    for key, value in pairs:
        if isinstance(value, float):
            value = _fmt(value)
        print(f"{key} = {value}")


def _market_from_args(args: argparse.Namespace) -> MarketParams:
    return MarketParams(u=args.u, d=args.d, p=args.p, R=args.R)


def _scale(value: float, log2: bool) -> float:
    return value / LOG2 if log2 else value


# --------------------------------------------------------------------------
# optimize
# --------------------------------------------------------------------------


def cmd_optimize(args: argparse.Namespace) -> int:
    mkt = _market_from_args(args)
    rows: list[tuple[str, object]] = [
        ("command", f"optimize-{args.problem}"),
        ("u", mkt.u),
        ("d", mkt.d),
        ("p", mkt.p),
        ("R", mkt.R),
    ]
    if args.problem in ("ks", "ks-constrained"):
        sol = ks_optimal_fraction(mkt) if args.problem == "ks" else ks_constrained_fraction(mkt)
        rows += [("f_star", sol.f_star), ("growth", _scale(sol.growth, args.log2))]
        if args.oracle:
            f_grid = ks_grid_oracle(mkt, args.resolution)
            rows += [
                ("oracle_f", f_grid),
                ("oracle_residual", f_grid - sol.f_star),
            ]
    else:  # ko
        if args.S0 is None or args.K0 is None or args.c is None:
            raise ParameterError("optimize ko needs --S0, --K0 and --c")
        contract = OptionContract.from_market(mkt, S0=args.S0, K0=args.K0)
        ko = KoParams.from_contract(mkt, contract)
        sol = ko_optimal_g(args.c, ko, mkt)
        rows += [
            ("S0", contract.S0),
            ("K0", contract.K0),
            ("P0", contract.P0),
            ("c", sol.c),
            ("g_star", sol.g_star),
            ("f_implied", sol.f_implied),
            ("growth", _scale(sol.growth, args.log2)),
            ("hedge_pivot", hedge_pivot(ko, mkt)),
        ]
        if args.oracle:
            g_grid = ko_grid_oracle(args.c, ko, mkt, args.resolution)
            rows += [("oracle_g", g_grid), ("oracle_residual", g_grid - sol.g_star)]
    _print_kv(rows)
    return 0


# --------------------------------------------------------------------------
# growth-surface
# --------------------------------------------------------------------------


def cmd_growth_surface(args: argparse.Namespace) -> int:
    mkt = _market_from_args(args)
    contract = OptionContract.from_market(mkt, S0=args.S0, K0=args.K0)
    ko = KoParams.from_contract(mkt, contract)
    lines = ["kind,g,c,growth"]

    def grid(lo: float, hi: float, steps: int) -> list[float]:
        if steps < 2 or hi <= lo:
            raise ParameterError(f"bad grid [{lo}, {hi}] with {steps} steps")
        return [lo + (hi - lo) * i / (steps - 1) for i in range(steps)]

    for g in grid(args.g_min, args.g_max, args.g_steps):
        for c in grid(args.c_min, args.c_max, args.c_steps):
            lo, hi = feasibility_bounds(g, ko, mkt)
            if not (lo < c < hi):
                lines.append(f"grid,{g:.16e},{c:.16e},INFEASIBLE")
                continue
            growth = _scale(ko_growth_rate(g, c, ko, mkt), args.log2)
            lines.append(f"grid,{g:.16e},{c:.16e},{growth:.16e}")
    # optimal locus: the line of equivalent maxima
    for c in grid(args.c_min, args.c_max, args.c_steps):
        g = ko_optimal_g_value(c, ko, mkt)
        growth = _scale(ko_growth_rate(g, c, ko, mkt), args.log2)
        lines.append(f"locus,{g:.16e},{c:.16e},{growth:.16e}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


# --------------------------------------------------------------------------
# config handling
# --------------------------------------------------------------------------


def _load_config(path: str) -> dict:
    p = Path(path)
    if not p.exists():
        raise ParameterError(f"config file not found: {path}")
    with open(p) as fh:
        data = yaml.safe_load(fh)
    if not isinstance(data, dict):
        raise ParameterError(f"config file {path} must hold a mapping")
    return data


def _experiment_from_config(data: dict, args: argparse.Namespace) -> ExperimentConfig:
    data = dict(data)
    data.pop("sweep", None)
    if "realized" not in data:
        # sweeps replace the realized market anyway; default to well specified
        data["realized"] = {"u_m": data["believed"]["u"], "d_m": data["believed"]["d"]}
    cfg = ExperimentConfig.from_dict(data)
    overrides = {}
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "paths", None) is not None:
        overrides["N"] = args.paths
    if getattr(args, "steps", None) is not None:
        overrides["n"] = args.steps
    return dataclasses.replace(cfg, **overrides) if overrides else cfg


def _dump_config(cfg: ExperimentConfig, sweep_section: dict | None, path: str) -> None:
    payload = cfg.to_dict()
    if sweep_section is not None:
        payload["sweep"] = sweep_section
    Path(path).write_text(yaml.safe_dump(payload, sort_keys=True))


def _parse_um_grid(section: dict) -> tuple[float, ...] | None:
    if "u_m_grid" in section:
        return tuple(float(v) for v in section["u_m_grid"])
    if {"u_m_min", "u_m_max", "u_m_step"} <= set(section):
        lo, hi, step = (
            float(section["u_m_min"]),
            float(section["u_m_max"]),
            float(section["u_m_step"]),
        )
        count = int(round((hi - lo) / step)) + 1
        return tuple(lo + step * i for i in range(count))
    return None


def _maybe_log2(result: SweepResult, log2: bool) -> SweepResult:
    if not log2:
        return result
    rows = tuple(
        dataclasses.replace(
            row, mean_growth=row.mean_growth / LOG2, stderr=row.stderr / LOG2
        )
        for row in result.rows
    )
    return SweepResult(rows=rows)


def _write_result(result: SweepResult, out: str | None) -> None:
    if out:
        result.to_csv(out)
        print(f"wrote {len(result.rows)} rows to {out}")
    else:
        sys.stdout.write(result.to_csv_string())


def _print_ranking(result: SweepResult) -> None:
    by_point: dict[tuple[int, float], list[ResultRow]] = {}
    for row in result.rows:
        by_point.setdefault((row.n, row.u_m), []).append(row)
    for (n, u_m), rows in sorted(by_point.items()):
        ranked = sorted(
            rows, key=lambda r: (math.isnan(r.mean_growth), -r.mean_growth if not math.isnan(r.mean_growth) else 0.0)
        )
        desc = " > ".join(
            f"{r.strategy}({_fmt(r.mean_growth)})" if not math.isnan(r.mean_growth) else f"{r.strategy}(ruined)"
            for r in ranked
        )
        print(f"n={n} u_m={_fmt(u_m)}: {desc}")


def _ruin_exit(result: SweepResult) -> int:
    dead = [r for r in result.rows if r.ruin_count >= r.N]
    if dead:
        for row in dead:
            print(
                f"infeasible: all {row.N} paths ruined for {row.strategy} at u_m={_fmt(row.u_m)}",
                file=sys.stderr,
            )
        return 3
    return 0


# --------------------------------------------------------------------------
# sweep / simulate
# --------------------------------------------------------------------------


def cmd_sweep(args: argparse.Namespace) -> int:
    data = _load_config(args.config)
    cfg = _experiment_from_config(data, args)
    sweep_section = data.get("sweep") or {"kind": "misspecification"}
    if args.dump_config:
        _dump_config(cfg, sweep_section, args.dump_config)
    kind = sweep_section.get("kind", "misspecification")
    u_m_grid = _parse_um_grid(sweep_section) or default_um_grid()
    if kind == "misspecification":
        result = misspecification_sweep(cfg, u_m_grid)
    elif kind == "convergence":
        if "n_grid" not in sweep_section:
            raise ParameterError("convergence sweep needs an n_grid list")
        study = convergence_study(
            cfg, tuple(int(n) for n in sweep_section["n_grid"]), u_m_grid
        )
        result = study.rows
        for gap in study.gaps:
            print(
                f"gap n={gap.n} u_m={_fmt(gap.u_m)}: koc-best={_fmt(gap.gap)}",
                file=sys.stderr,
            )
    else:
        raise ParameterError(f"unknown sweep kind {kind!r}")
    result = _maybe_log2(result, args.log2)
    _write_result(result, args.out)
    _print_ranking(result)
    return _ruin_exit(result)


def cmd_simulate(args: argparse.Namespace) -> int:
    data = _load_config(args.config)
    cfg = _experiment_from_config(data, args)
    if args.dump_config:
        _dump_config(cfg, data.get("sweep"), args.dump_config)
    result = _maybe_log2(run_experiment(cfg), args.log2)
    _write_result(result, args.out)
    if args.wealth_out:
        path = generate_path(cfg.believed, cfg.n, (cfg.seed, args.path_index))
        lines = ["t,strategy,wealth"]
        for spec in cfg.strategies:
            wealth = simulate_wealth(cfg, spec, path)
            lines.extend(
                f"{t},{spec.label},{w:.16e}" for t, w in enumerate(wealth)
            )
        Path(args.wealth_out).write_text("\n".join(lines) + "\n")
        print(f"wrote wealth sequences for path {args.path_index} to {args.wealth_out}")
    return _ruin_exit(result)


# --------------------------------------------------------------------------
# verify
# --------------------------------------------------------------------------


def cmd_verify(args: argparse.Namespace) -> int:
    reports = run_all_checks(draws=args.draws, seed=args.seed)
    all_passed = True
    for rep in reports:
        status = "PASS" if rep.passed else "FAIL"
        all_passed = all_passed and rep.passed
        print(
            f"[{status}] {rep.name}: worst residual {rep.worst:.3e} "
            f"(tolerance {rep.tolerance:.1e}, draws {rep.draws})"
        )
    mkt = MarketParams(u=args.u, d=args.d, p=args.p, R=args.R)
    contract = OptionContract.from_market(mkt, S0=args.S0, K0=args.K0)
    ko = KoParams.from_contract(mkt, contract)
    cu0, cd1 = feasibility_bounds(0.0, ko, mkt)[0], feasibility_bounds(1.0, ko, mkt)[1]
    print(f"short-selling threshold c_u(0) = {_fmt(cu0)} (absolute value {_fmt(abs(cu0))})")
    print(f"leverage threshold c_d(1) = {_fmt(cd1)}")
    print(f"hedge pivot = {_fmt(hedge_pivot(ko, mkt))}")
    return 0 if all_passed else 3


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------


def _add_market_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--u", type=float, required=True, help="believed up factor")
    p.add_argument("--d", type=float, required=True, help="believed down factor")
    p.add_argument("--p", type=float, required=True, help="up probability")
    p.add_argument("--R", type=float, required=True, help="gross bond return per period")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kellytree",
        description="Growth-optimal stock/put/bond strategies on a binomial market",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_opt = sub.add_parser("optimize", help="closed-form optimal fractions")
    p_opt.add_argument("problem", choices=("ks", "ks-constrained", "ko"))
    _add_market_flags(p_opt)
    p_opt.add_argument("--S0", type=float, help="spot price (ko)")
    p_opt.add_argument("--K0", type=float, help="strike price (ko)")
    p_opt.add_argument("--c", type=float, help="hedge parameter (ko)")
    p_opt.add_argument("--oracle", action="store_true", help="cross-check with the grid oracle")
    p_opt.add_argument("--resolution", type=int, default=1_000_000)
    p_opt.add_argument("--log2", action="store_true", help="report growth in bits per period")
    p_opt.set_defaults(func=cmd_optimize)

    p_surface = sub.add_parser("growth-surface", help="tabulate growth over a (g, c) grid")
    _add_market_flags(p_surface)
    p_surface.add_argument("--S0", type=float, required=True)
    p_surface.add_argument("--K0", type=float, required=True)
    p_surface.add_argument("--g-min", type=float, default=-0.5)
    p_surface.add_argument("--g-max", type=float, default=1.5)
    p_surface.add_argument("--g-steps", type=int, default=101)
    p_surface.add_argument("--c-min", type=float, default=-1.0)
    p_surface.add_argument("--c-max", type=float, default=1.5)
    p_surface.add_argument("--c-steps", type=int, default=101)
    p_surface.add_argument("--out", help="write CSV here instead of stdout")
    p_surface.add_argument("--log2", action="store_true")
    p_surface.set_defaults(func=cmd_growth_surface)

    for name, func, help_text in (
        ("sweep", cmd_sweep, "run a misspecification or convergence sweep from a config file"),
        ("simulate", cmd_simulate, "run one experiment from a config file"),
    ):
        p_run = sub.add_parser(name, help=help_text)
        p_run.add_argument("--config", required=True, help="YAML experiment config")
        p_run.add_argument("--out", help="write the result CSV here instead of stdout")
        p_run.add_argument("--seed", type=int, help="override the config seed")
        p_run.add_argument("--paths", type=int, help="override the config path count N")
        p_run.add_argument("--steps", type=int, help="override the config step count n")
        p_run.add_argument("--dump-config", help="write the effective config as YAML")
        p_run.add_argument("--log2", action="store_true")
        if name == "simulate":
            p_run.add_argument("--wealth-out", help="write per-step wealth for one path")
            p_run.add_argument("--path-index", type=int, default=0)
        p_run.set_defaults(func=func)

    p_verify = sub.add_parser("verify", help="run randomized identity/ordering checks")
    p_verify.add_argument("--draws", type=int, default=1000)
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--u", type=float, default=2.0)
    p_verify.add_argument("--d", type=float, default=0.5)
    p_verify.add_argument("--p", type=float, default=0.5)
    p_verify.add_argument("--R", type=float, default=1.05)
    p_verify.add_argument("--S0", type=float, default=100.0)
    p_verify.add_argument("--K0", type=float, default=110.0)
    p_verify.set_defaults(func=cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParameterError, FeasibilityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
