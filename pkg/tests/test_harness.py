import json
import math
import os

import numpy as np
import pytest

from budgetrgp import cli, harness
from budgetrgp.harness import (SweepConfig, parse_b_grid, parse_t_grid,
                               pattern_for_family, read_rows_csv, run_selfcheck,
                               run_sweep, rows_to_csv, suite_counting,
                               summarize_rows, threshold_table, wilson_interval)


class TestWilson:
    def test_zero_successes_floor(self):
        lo, hi = wilson_interval(0, 50)
        assert lo == 0.0
        assert 0 < hi < 0.12

    def test_all_successes_ceiling(self):
        lo, hi = wilson_interval(50, 50)
        assert hi == 1.0
        assert 0.88 < lo < 1.0

    def test_width_scales_inverse_sqrt(self):
        def width(k, r):
            lo, hi = wilson_interval(k, r)
            return hi - lo
        w1 = width(100, 400)
        w2 = width(400, 1600)
        assert w1 / w2 == pytest.approx(2.0, rel=0.05)

    def test_contains_true_rate(self):
        lo, hi = wilson_interval(20, 100)
        assert lo < 0.2 < hi


class TestFamiliesAndGrids:
    def test_pattern_families(self):
        assert pattern_for_family("wheel:5").family_tag == "wheel(5)"
        assert pattern_for_family("clique:4").family_tag == "clique(4)"
        assert pattern_for_family("cycle:6").family_tag == "cycle(6)"
        assert pattern_for_family("k1t:path2").e == 5

    def test_custom_pattern_file(self, tmp_path):
        p = tmp_path / "pat.json"
        p.write_text(json.dumps({"vertices": 3, "edges": [[0, 1], [1, 2], [2, 0]]}))
        pat = pattern_for_family(f"custom:{p}")
        assert (pat.v, pat.e) == (3, 3)

    def test_t_grid_forms(self):
        n = 100
        assert parse_t_grid("50,100", n) == [50, 100]
        assert parse_t_grid("n^1.5", n) == [1000]
        grid = parse_t_grid("logn:1.2:1.8:4", n)
        assert len(grid) == 4 and grid == sorted(grid)
        assert parse_t_grid("99999999", n) == [harness.pair_count(n)]

    def test_b_grid_threshold_multiples(self):
        n, t = 100, 1000
        grid = parse_b_grid("thr*0.25,thr*1,thr*4", "wheel:4", n, t)
        # wheel threshold at the crossover point is exactly 10 (2.5 rounds
        # to 2 under round-half-even)
        assert grid == [2, 10, 40]
        assert parse_b_grid("7,3", "wheel:4", n, t) == [3, 7]
        assert parse_b_grid("thr*0.0001", "wheel:4", n, t) == [1]   # floor at 1


def tiny_config(tmp_path, **kw):
    defaults = dict(n=30, family="clique:3", strategy="buy-all",
                    t_grid=[40, 80], b_grid_spec="3,9", reps=12,
                    master_seed=42, jobs=1, out=str(tmp_path / "rows.csv"))
    defaults.update(kw)
    return SweepConfig(**defaults)


class TestSweep:
    def test_schema_and_ordering(self, tmp_path):
        config = tiny_config(tmp_path)
        rows, summary = run_sweep(config)
        assert len(rows) == 2 * 2 * 12
        text = open(config.out).read()
        header = text.splitlines()[0]
        assert header == "n,t,b,family,strategy,seed,success,hit_step,budget_used,degraded,runtime_ms"
        keys = [(r["t"], r["b"], r["seed"]) for r in rows]
        assert keys == sorted(keys)
        for r in rows:
            assert r["success"] in (0, 1)
            if r["success"] == 0:
                assert r["hit_step"] == ""

    def test_reproducible_modulo_runtime(self, tmp_path):
        c1 = tiny_config(tmp_path, out=str(tmp_path / "a.csv"))
        c2 = tiny_config(tmp_path, out=str(tmp_path / "b.csv"))
        run_sweep(c1)
        run_sweep(c2)

        def strip_runtime(path):
            lines = open(path).read().splitlines()
            return [",".join(line.split(",")[:-1]) for line in lines]

        assert strip_runtime(c1.out) == strip_runtime(c2.out)

    def test_parallel_equals_serial(self, tmp_path):
        serial = tiny_config(tmp_path, out=str(tmp_path / "s.csv"))
        parallel = tiny_config(tmp_path, out=str(tmp_path / "p.csv"), jobs=2)
        rows_s, _ = run_sweep(serial)
        rows_p, _ = run_sweep(parallel)
        strip = lambda rows: [{k: v for k, v in r.items() if k != "runtime_ms"}
                              for r in rows]
        assert strip(rows_s) == strip(rows_p)

    def test_summary_equals_column_means(self, tmp_path):
        config = tiny_config(tmp_path)
        rows, summary = run_sweep(config)
        for point in summary:
            group = [r for r in rows if (r["t"], r["b"]) == (point["t"], point["b"])]
            assert point["trials"] == len(group)
            assert point["rate"] == pytest.approx(np.mean([r["success"] for r in group]))
            lo, hi = wilson_interval(point["successes"], point["trials"])
            assert (point["wilson_lo"], point["wilson_hi"]) == (lo, hi)

    def test_unwritable_output_fails_before_trials(self, tmp_path):
        config = tiny_config(tmp_path, out=str(tmp_path / "nodir" / "rows.csv"))
        with pytest.raises(OSError):
            run_sweep(config)

    def test_auto_strategy_resolution(self, tmp_path):
        config = tiny_config(tmp_path, strategy="auto", family="clique:4",
                             t_grid=[120], b_grid_spec="10", reps=2)
        rows, _ = run_sweep(config)
        assert all(r["strategy"] == "wheel:4:auto" for r in rows)


class TestThresholdTable:
    def test_crossover_row_equal_envelopes(self):
        rows = threshold_table("wheel:4", 100, [700, 1000, 1400])
        mid = [r for r in rows if r["t"] == 1000][0]
        assert mid["lower"] == mid["upper"] == "10.0"
        assert all(r["cutoff_ok"] == 1 for r in rows)   # cutoff 4/3 < grid floor

    def test_below_cutoff_flagged(self):
        n = 400
        t_low = int(n ** 1.30)
        rows = threshold_table("wheel:5", n, [t_low])
        assert rows[0]["cutoff_ok"] == 0

    def test_k6_piecewise_family(self, tmp_path):
        rows = threshold_table("clique:6", 200, [int(200 ** 1.65), int(200 ** 1.8)])
        assert all(float(r["upper"]) > 0 for r in rows)
        out = tmp_path / "thr.csv"
        harness.write_threshold_csv(str(out), rows)
        text = out.read_text().splitlines()
        assert text[0] == "family,n,t,lower,upper,cutoff_ok"


class TestSelfcheck:
    def test_quick_selfcheck_passes(self):
        results = run_selfcheck(quick=True)
        assert all(r.passed for r in results), [r.detail for r in results if not r.passed]
        assert {r.name for r in results} == {"counting", "incremental", "uniformity",
                                             "concentration"}

    def test_injected_counting_bug_is_caught(self, monkeypatch):
        import budgetrgp.harness as hmod
        real = hmod.count_labelled
        monkeypatch.setattr(hmod, "count_labelled", lambda h, p: 2 * real(h, p))
        result = suite_counting(num_hosts=5)
        assert not result.passed
        assert "mismatch" in result.detail


class TestCli:
    def test_trial_json(self, capsys):
        rc = cli.main(["trial", "--n", "6", "--t", "15", "--b", "15",
                       "--family", "wheel:4", "--strategy", "buy-all", "--seed", "3"])
        assert rc == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["success"] is True
        assert doc["budget_used"] <= 15

    def test_trial_budget_too_small(self, capsys):
        rc = cli.main(["trial", "--n", "4", "--t", "3", "--b", "1",
                       "--family", "clique:3", "--strategy", "buy-all"])
        assert rc == 0
        assert json.loads(capsys.readouterr().out)["success"] is False

    def test_trial_reps_aggregate(self, capsys):
        rc = cli.main(["trial", "--n", "4", "--t", "3", "--b", "3",
                       "--family", "clique:3", "--strategy", "buy-all",
                       "--seed", "1", "--reps", "400"])
        assert rc == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["reps"] == 400
        assert 0.12 < doc["success_rate"] < 0.28
        assert doc["wilson95"][0] < doc["success_rate"] < doc["wilson95"][1]

    def test_usage_error_exit_1(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.main(["trial", "--n", "6"])
        assert exc.value.code == 1

    def test_invalid_value_exit_1(self, capsys):
        rc = cli.main(["trial", "--n", "4", "--t", "99", "--b", "3",
                       "--family", "clique:3", "--strategy", "buy-all"])
        assert rc == 1   # t > M is an invalid parameter

    def test_runtime_failure_exit_2(self, tmp_path, capsys):
        rc = cli.main(["count", "--graph", str(tmp_path / "missing.json"),
                       "--pattern", "clique:3"])
        assert rc == 2

    def test_sweep_writes_csv_and_summary(self, tmp_path, capsys):
        out = tmp_path / "sweep.csv"
        rc = cli.main(["sweep", "--n", "30", "--family", "clique:3",
                       "--strategy", "buy-all", "--t-grid", "60",
                       "--b-grid", "3,12", "--reps", "10", "--seed", "5",
                       "--out", str(out)])
        assert rc == 0
        assert out.exists()
        stdout = capsys.readouterr().out
        assert "t,b,trials,successes,rate" in stdout
        rows = read_rows_csv(str(out))
        assert len(rows) == 20

    def test_thresholds_csv(self, tmp_path, capsys):
        out = tmp_path / "thr.csv"
        rc = cli.main(["thresholds", "--family", "wheel:4", "--n", "100",
                       "--t-grid", "n^1.5,1200", "--out", str(out)])
        assert rc == 0
        rows = read_rows_csv(str(out))
        assert rows[0]["lower"] == rows[0]["upper"] == "10.0"

    def test_count_subcommand(self, tmp_path, capsys):
        g = tmp_path / "g.json"
        g.write_text(json.dumps({"vertices": 4,
                                 "edges": [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]]}))
        rc = cli.main(["count", "--graph", str(g), "--pattern", "clique:3"])
        assert rc == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["labelled"] == 24
        assert doc["unlabelled"] == 4
        assert doc["contains"] is True

    def test_selfcheck_quick_exit_zero(self, capsys):
        rc = cli.main(["selfcheck", "--quick"])
        assert rc == 0
        out = capsys.readouterr().out
        assert out.count("[PASS]") == 4

    def test_selfcheck_failure_exit_three(self, monkeypatch, capsys):
        from budgetrgp.harness import SuiteResult
        monkeypatch.setattr(cli, "run_selfcheck",
                            lambda quick=False: [SuiteResult("counting", False, "boom")])
        rc = cli.main(["selfcheck"])
        assert rc == 3
        assert "[FAIL]" in capsys.readouterr().out
