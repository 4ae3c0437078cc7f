import math
from pathlib import Path

import pytest
import yaml

from kellytree import ExperimentConfig, ks_optimal_fraction
from kellytree.cli import main


def parse_kv(output: str) -> dict:
    pairs = {}
    for line in output.strip().splitlines():
        if " = " in line:
            key, value = line.split(" = ", 1)
            pairs[key] = value
    return pairs


def write_config(path: Path, **overrides) -> Path:
    data = {
        "believed": {"u": 2.0, "d": 0.5, "p": 0.5, "R": 1.05},
        "option": {"S0": 100.0, "K0": 110.0},
        "strategies": [
            {"kind": "ks"},
            {"kind": "ko", "c": 0.0},
            {"kind": "ko", "c": 0.9},
            {"kind": "koc", "c1": 0.0, "c2": 0.9, "a": 0.5},
        ],
        "paths": 60,
        "steps": 120,
        "seed": 42,
        "sweep": {"kind": "misspecification", "u_m_grid": [1.2, 2.0, 3.0]},
    }
    data.update(overrides)
    target = path / "config.yaml"
    target.write_text(yaml.safe_dump(data))
    return target


class TestOptimize:
    def test_ks_reports_the_kelly_fraction(self, capsys):
        code = main(
            ["optimize", "ks", "--u", "1.5", "--d", "0.6667", "--p", "0.5", "--R", "1.05"]
        )
        assert code == 0
        values = parse_kv(capsys.readouterr().out)
        assert float(values["f_star"]) == pytest.approx(0.2029, abs=2e-4)

    def test_oracle_flag_cross_checks(self, capsys):
        code = main(
            [
                "optimize",
                "ks",
                "--u",
                "1.5",
                "--d",
                "0.66666666666666663",
                "--p",
                "0.5",
                "--R",
                "1.05",
                "--oracle",
            ]
        )
        assert code == 0
        values = parse_kv(capsys.readouterr().out)
        assert abs(float(values["oracle_residual"])) < 1e-5

    def test_ko_at_the_pivot_holds_no_options(self, capsys):
        code = main(
            [
                "optimize",
                "ko",
                "--u",
                "2",
                "--d",
                "0.5",
                "--p",
                "0.5",
                "--R",
                "1.05",
                "--S0",
                "100",
                "--K0",
                "110",
                "--c",
                "0.4019138755980861",
            ]
        )
        assert code == 0
        values = parse_kv(capsys.readouterr().out)
        assert abs(float(values["g_star"])) <= 1e-10

    def test_invalid_factors_exit_2(self, capsys):
        code = main(
            ["optimize", "ks", "--u", "1.0", "--d", "1.2", "--p", "0.5", "--R", "1.05"]
        )
        assert code == 2
        assert "error:" in capsys.readouterr().err

    def test_arbitrage_exit_2(self, capsys):
        code = main(
            ["optimize", "ks", "--u", "1.5", "--d", "0.9", "--p", "0.5", "--R", "0.8"]
        )
        assert code == 2

    def test_log2_rescales_growth(self, capsys):
        argv = ["optimize", "ks", "--u", "1.5", "--d", "0.5", "--p", "0.5", "--R", "1.05"]
        main(argv)
        nats = float(parse_kv(capsys.readouterr().out)["growth"])
        main(argv + ["--log2"])
        bits = float(parse_kv(capsys.readouterr().out)["growth"])
        assert bits == pytest.approx(nats / math.log(2.0), rel=1e-12)


class TestGrowthSurface:
    def test_surface_peaks_at_kelly_growth(self, capsys, wide_market):
        code = main(
            [
                "growth-surface",
                "--u",
                "2",
                "--d",
                "0.5",
                "--p",
                "0.5",
                "--R",
                "1.05",
                "--S0",
                "100",
                "--K0",
                "110",
                "--g-steps",
                "41",
                "--c-steps",
                "41",
            ]
        )
        assert code == 0
        out = capsys.readouterr().out
        lines = out.strip().splitlines()
        assert lines[0] == "kind,g,c,growth"
        assert any(line.endswith("INFEASIBLE") for line in lines[1:])
        growths = [
            float(line.split(",")[3])
            for line in lines[1:]
            if not line.endswith("INFEASIBLE")
        ]
        target = ks_optimal_fraction(wide_market).growth
        # the locus rows carry the exact optimum; no grid cell exceeds it
        assert max(growths) == pytest.approx(target, abs=1e-12)

    def test_two_strikes_share_the_same_peak(self, tmp_path):
        peaks = []
        for strike in ("110", "91"):
            out = tmp_path / f"surface_{strike}.csv"
            code = main(
                [
                    "growth-surface",
                    "--u",
                    "2",
                    "--d",
                    "0.5",
                    "--p",
                    "0.5",
                    "--R",
                    "1.05",
                    "--S0",
                    "100",
                    "--K0",
                    strike,
                    "--g-steps",
                    "21",
                    "--c-steps",
                    "21",
                    "--out",
                    str(out),
                ]
            )
            assert code == 0
            rows = out.read_text().strip().splitlines()[1:]
            peaks.append(
                max(
                    float(r.split(",")[3])
                    for r in rows
                    if not r.endswith("INFEASIBLE")
                )
            )
        assert abs(peaks[0] - peaks[1]) <= 1e-12


class TestSweep:
    def test_missing_config_names_the_path(self, capsys):
        code = main(["sweep", "--config", "/nonexistent/config.yaml"])
        assert code == 2
        assert "/nonexistent/config.yaml" in capsys.readouterr().err

    def test_byte_identical_reruns(self, tmp_path, capsys):
        config = write_config(tmp_path)
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(["sweep", "--config", str(config), "--seed", "42", "--out", str(out1)]) == 0
        assert main(["sweep", "--config", str(config), "--seed", "42", "--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_seed_changes_the_output(self, tmp_path):
        config = write_config(tmp_path)
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        main(["sweep", "--config", str(config), "--seed", "1", "--out", str(out1)])
        main(["sweep", "--config", str(config), "--seed", "2", "--out", str(out2)])
        assert out1.read_bytes() != out2.read_bytes()

    def test_csv_schema(self, tmp_path):
        config = write_config(tmp_path)
        out = tmp_path / "rows.csv"
        main(["sweep", "--config", str(config), "--out", str(out)])
        header = out.read_text().splitlines()[0]
        assert header == "u_m,strategy,c,g_star,f,n,N,mean_growth,stderr,ruin_count,seed"

    def test_dump_config_round_trips(self, tmp_path, capsys):
        config = write_config(tmp_path)
        dumped = tmp_path / "effective.yaml"
        code = main(
            [
                "sweep",
                "--config",
                str(config),
                "--seed",
                "99",
                "--paths",
                "30",
                "--dump-config",
                str(dumped),
                "--out",
                str(tmp_path / "out.csv"),
            ]
        )
        assert code == 0
        reloaded = yaml.safe_load(dumped.read_text())
        cfg = ExperimentConfig.from_dict(reloaded)
        assert cfg.seed == 99
        assert cfg.N == 30
        assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg

    def test_all_ruined_exits_3(self, tmp_path, capsys):
        config = write_config(
            tmp_path,
            strategies=[{"kind": "ko", "c": 6.0}],
            sweep={"kind": "misspecification", "u_m_grid": [3.0]},
        )
        code = main(["sweep", "--config", str(config), "--out", str(tmp_path / "r.csv")])
        assert code == 3
        assert "ruined" in capsys.readouterr().err

    def test_convergence_sweep(self, tmp_path, capsys):
        config = write_config(
            tmp_path,
            sweep={
                "kind": "convergence",
                "u_m_grid": [1.5, 2.5],
                "n_grid": [5, 60],
            },
        )
        out = tmp_path / "conv.csv"
        code = main(["sweep", "--config", str(config), "--out", str(out)])
        assert code == 0
        err = capsys.readouterr().err
        assert "gap n=5" in err and "gap n=60" in err
        body = out.read_text().strip().splitlines()[1:]
        assert len(body) == 2 * 2 * 4  # n values x grid points x strategies


class TestSimulateCommand:
    def test_single_run_and_wealth_dump(self, tmp_path):
        config = write_config(tmp_path, realized={"u_m": 1.5})
        out = tmp_path / "run.csv"
        wealth = tmp_path / "wealth.csv"
        code = main(
            [
                "simulate",
                "--config",
                str(config),
                "--out",
                str(out),
                "--wealth-out",
                str(wealth),
            ]
        )
        assert code == 0
        rows = out.read_text().strip().splitlines()
        assert len(rows) == 1 + 4
        wealth_rows = wealth.read_text().strip().splitlines()
        assert wealth_rows[0] == "t,strategy,wealth"
        first = wealth_rows[1].split(",")
        assert first[0] == "0" and float(first[2]) == 1.0

    def test_stdout_when_no_out_flag(self, tmp_path, capsys):
        config = write_config(tmp_path, realized={"u_m": 1.5})
        code = main(["simulate", "--config", str(config)])
        assert code == 0
        out = capsys.readouterr().out
        assert out.startswith("u_m,strategy,")


class TestVerify:
    def test_report_and_exit_code(self, capsys):
        code = main(["verify", "--draws", "150", "--seed", "1"])
        assert code == 0
        out = capsys.readouterr().out
        assert "[PASS]" in out and "[FAIL]" not in out
        # the short-selling threshold is reported with both signs
        assert "c_u(0) = -1.10526315789" in out
        assert "absolute value 1.10526315789" in out
