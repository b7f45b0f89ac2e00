import io
import math

import numpy as np
import pandas as pd
import pytest

from plotphase import (MissingColumnError, PlotSpec, fifty_percent_contour,
                       load_sweep, log_n, render_phase, success_grid)
from plotphase.render import SWEEP_COLUMNS


def synth_sweep(n, t_vals, b_vals, rate_fn, reps=20) -> pd.DataFrame:
    rows = []
    for t in t_vals:
        for b in b_vals:
            rate = rate_fn(t, b)
            wins = round(rate * reps)
            for rep in range(reps):
                rows.append({
                    "n": n, "t": t, "b": b, "family": "wheel:4",
                    "strategy": "wheel:4:auto", "seed": rep,
                    "success": 1 if rep < wins else 0, "hit_step": "",
                    "budget_used": b, "degraded": 0, "runtime_ms": 1.0,
                })
    return pd.DataFrame(rows, columns=SWEEP_COLUMNS)


def synth_thresholds(n, t_vals, value_fn) -> pd.DataFrame:
    return pd.DataFrame([
        {"family": "wheel:4", "n": n, "t": t, "lower": value_fn(t),
         "upper": value_fn(t), "cutoff_ok": 1}
        for t in t_vals])


class TestTransforms:
    def test_axis_transform_exact_on_power_fixture(self):
        # t = n^1.5 with n a power of ten maps to exactly 1.5
        assert log_n(1000, 100) == 1.5
        assert log_n([100, 1000, 10000], 100).tolist() == [1.0, 1.5, 2.0]

    def test_success_grid_shape_and_blanks(self):
        n = 100
        sweep = synth_sweep(n, [1000, 2000], [10, 40],
                            lambda t, b: 1.0 if b >= 20 else 0.0)
        # drop one cell entirely: it must stay NaN, never interpolated
        sweep = sweep[~((sweep["t"] == 2000) & (sweep["b"] == 10))]
        xs, ys, grid = success_grid(sweep)
        assert grid.shape == (2, 2)
        assert np.isnan(grid[0, 1])
        assert grid[1, 0] == 1.0 and grid[0, 0] == 0.0


class TestSchema:
    def test_missing_column_named(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("n,t,b\n4,3,3\n")
        with pytest.raises(MissingColumnError) as err:
            load_sweep(str(bad))
        assert "family" in str(err.value)

    def test_thresholds_schema_checked(self, tmp_path):
        bad = tmp_path / "thr.csv"
        bad.write_text("family,n,t\nwheel:4,100,1000\n")
        spec = PlotSpec(thresholds_csv=str(bad), out=str(tmp_path / "o.png"))
        with pytest.raises(MissingColumnError) as err:
            render_phase(spec)
        assert "lower" in str(err.value)


class TestRendering:
    def test_envelope_only_with_warning_on_empty_sweep(self, tmp_path):
        thr = tmp_path / "thr.csv"
        synth_thresholds(100, [700, 1000, 1400],
                         lambda t: 1e8 / t ** 2.5).to_csv(thr, index=False)
        empty = tmp_path / "empty.csv"
        empty.write_text(",".join(SWEEP_COLUMNS) + "\n")
        out = tmp_path / "fig.png"
        spec = PlotSpec(sweep_csv=str(empty), thresholds_csv=str(thr),
                        family="wheel:4", out=str(out))
        with pytest.warns(UserWarning):
            render_phase(spec)
        assert out.exists() and out.stat().st_size > 4000

    def test_transition_band_sits_above_overlay_for_shifted_rule(self, tmp_path):
        # success iff b >= 2 * upper(n, t): the 50% contour must run about
        # log_n(2) above the overlay curve, never below it.
        n = 100
        t_vals = [800, 1600, 3200]
        upper = lambda t: 4e7 / t ** 2
        b_vals = sorted({max(1, round(upper(t) * f))
                         for t in t_vals for f in (0.5, 1, 2, 4, 8)})
        sweep = synth_sweep(n, t_vals, b_vals,
                            lambda t, b: 1.0 if b >= 2 * upper(t) else 0.0)
        xs, ys_cross = fifty_percent_contour(sweep)
        assert len(xs) == len(t_vals)
        for x, y_cross in zip(xs, ys_cross):
            t = round(n ** x)
            y_up = log_n(upper(t), n)
            assert y_cross >= y_up - 1e-9
            assert y_cross <= y_up + math.log(4) / math.log(n)

    def test_render_full_figure(self, tmp_path):
        n = 100
        t_vals = [800, 1600, 3200]
        upper = lambda t: 4e7 / t ** 2
        sweep = synth_sweep(n, t_vals, [5, 20, 80],
                            lambda t, b: min(1.0, b / (2 * upper(t))))
        sw, thr = tmp_path / "s.csv", tmp_path / "t.csv"
        sweep.to_csv(sw, index=False)
        synth_thresholds(n, t_vals, upper).to_csv(thr, index=False)
        out = tmp_path / "fig.png"
        render_phase(PlotSpec(sweep_csv=str(sw), thresholds_csv=str(thr),
                              family="wheel:4", out=str(out)))
        assert out.exists() and out.stat().st_size > 10_000

    def test_pixel_identical_rerender(self, tmp_path):
        n = 100
        sweep = synth_sweep(n, [1000, 2000], [10, 40],
                            lambda t, b: 0.5)
        sw, thr = tmp_path / "s.csv", tmp_path / "t.csv"
        sweep.to_csv(sw, index=False)
        synth_thresholds(n, [1000, 2000], lambda t: 20.0).to_csv(thr, index=False)
        a, b = tmp_path / "a.png", tmp_path / "b.png"
        render_phase(PlotSpec(sweep_csv=str(sw), thresholds_csv=str(thr), out=str(a)))
        render_phase(PlotSpec(sweep_csv=str(sw), thresholds_csv=str(thr), out=str(b)))
        assert a.read_bytes() == b.read_bytes()


class TestCli:
    def test_cli_renders(self, tmp_path, capsys):
        from plotphase.cli import main
        thr = tmp_path / "thr.csv"
        synth_thresholds(100, [700, 1000], lambda t: 10.0).to_csv(thr, index=False)
        out = tmp_path / "fig.png"
        rc = main(["--thresholds", str(thr), "--family", "wheel:4",
                   "--out", str(out)])
        assert rc == 0
        assert out.exists()

    def test_cli_schema_error_exit_1(self, tmp_path):
        from plotphase.cli import main
        bad = tmp_path / "bad.csv"
        bad.write_text("family,n\nwheel:4,100\n")
        rc = main(["--thresholds", str(bad), "--out", str(tmp_path / "x.png")])
        assert rc == 1

    def test_cli_missing_file_exit_2(self, tmp_path):
        from plotphase.cli import main
        rc = main(["--thresholds", str(tmp_path / "none.csv"),
                   "--out", str(tmp_path / "x.png")])
        assert rc == 2
