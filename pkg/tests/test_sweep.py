import json
import math

import pytest

from plankcover.cli import main
from plankcover.sweep import CSV_HEADER, SweepConfigError, cells, fit_slope, parse_k_rule, run_sweep


def test_k_rule_parsing():
    k = parse_k_rule("ceil(8 * eps^(-1.75))")
    assert [k(e) for e in (0.2, 0.1, 0.05)] == [math.ceil(8 * e**-1.75) for e in (0.2, 0.1, 0.05)]
    assert [parse_k_rule("ceil(2 * eps^(-1))")(e) for e in (0.2, 0.1, 0.05)] == [10, 20, 40]
    for bad in ("8 * eps", "ceil(eps)", "ceil(2 + eps^(-1))", "__import__('os')"):
        with pytest.raises(SweepConfigError):
            parse_k_rule(bad)


def test_fit_slope_exact_power_law():
    eps = [0.2, 0.1, 0.05]
    assert fit_slope(eps, [3 * e**-1.5 for e in eps]) == pytest.approx(1.5)


def test_parallel_sweep_slope_one(tmp_path, capsys):
    cfg = {"generator": "parallel", "mode": "fixed_order", "epsilons": [0.2, 0.1, 0.05],
           "seeds": [0], "k_rule": "ceil(2 * eps^(-1))", "verify_samples": 20_000}
    f = tmp_path / "cfg.json"
    f.write_text(json.dumps(cfg))
    out = tmp_path / "rows.csv"
    assert main(["sweep", str(f), "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    rows = [l.split(",") for l in lines[1:]]
    assert [int(r[2]) for r in rows] == [10, 20, 40]
    assert all(r[3] == "true" for r in rows)
    summary = json.loads((tmp_path / "rows.csv.exponents.json").read_text())
    assert summary["exponents"][0]["slope"] == pytest.approx(1.0, abs=1e-9)


def test_empty_grid_exits_2(tmp_path, capsys):
    f = tmp_path / "cfg.json"
    f.write_text(json.dumps({"generator": "random", "epsilons": [], "k_rule": "ceil(1 * eps^(-1))"}))
    assert main(["sweep", str(f)]) == 2
    assert "empty" in capsys.readouterr().err


def test_cell_failures_are_recorded_not_fatal():
    cfg = {"generator": "random", "epsilons": [0.3], "seeds": [0], "k_rule": "ceil(4 * eps^(-1))",
           "tol_support": -1.0}
    rows = run_sweep(cfg)
    assert len(rows) == 1 and rows[0].error and not rows[0].covered


def test_groups_and_row_order_independence():
    cfg = {"epsilons": [0.3, 0.2], "seeds": [1, 2], "verify_samples": 5000,
           "groups": [{"generator": "random", "k_rule": "ceil(6 * eps^(-1.5))"},
                      {"generator": "adversarial", "params": {"cap_angle": 0.6}}]}
    all_cells = cells(cfg)
    assert len(all_cells) == 8
    rows = run_sweep(cfg, timing=False)
    single = run_sweep({**cfg["groups"][1], "epsilons": [0.2], "seeds": [2], "verify_samples": 5000}, timing=False)
    assert rows[-1] == single[0]
