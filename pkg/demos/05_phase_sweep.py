#!/usr/bin/env python3
"""A small (t, b) phase sweep with CSV output, plus a depth-comparison sweep.

Produces sweep_demo.csv and thresholds_demo.csv in the working directory;
feed both to the plotting frontend:

    plot-phase --sweep sweep_demo.csv --thresholds thresholds_demo.csv \
               --family wheel:4 --out phase_demo.png

Run:  python3 demos/05_phase_sweep.py
"""

import math

import numpy as np

from budgetrgp import make_clique, run_trial
from budgetrgp.harness import (SweepConfig, parse_t_grid, run_sweep,
                               threshold_table, write_threshold_csv)

# -- success-rate grid over (t, b) for the 4-clique target -------------------

n = 300
config = SweepConfig(
    n=n, family="wheel:4", strategy="auto",
    t_grid=parse_t_grid("logn:1.55:1.85:4", n),
    b_grid_spec="thr*0.25,thr*1,thr*4,thr*16",
    reps=40, master_seed=20240601, jobs=2, out="sweep_demo.csv")
rows, summary = run_sweep(config)
print(f"wrote {len(rows)} trials to sweep_demo.csv")
print("t      b    rate   (95% interval)")
for point in summary:
    print(f"{point['t']:6d} {point['b']:4d} {point['rate']:6.2f}  "
          f"[{point['wilson_lo']:.2f}, {point['wilson_hi']:.2f}]")

write_threshold_csv("thresholds_demo.csv",
                    threshold_table("wheel:4", n, parse_t_grid("logn:1.55:1.85:9", n)))
print("wrote threshold envelopes to thresholds_demo.csv")

# -- depth comparison for a 4-clique target -----------------------------------
#
# Different nesting depths trade star-building time against the residual
# clique they must finish; at fixed (n, t) the cheapest sufficient budget
# varies with depth.  Depth 0 buys inside one random set; depth 1 grows
# stars first and hunts a triangle in their leaf sets.

n = 200
t = math.ceil(n ** 1.75)
k4 = make_clique(4)
print(f"\n4-clique via nested-star strategies at n={n}, t={t}:")
print("depth    b=50  b=200  b=800")
for depth, alpha in ((0, 31), (1, 200)):
    rates = []
    for b in (50, 200, 800):
        spec = f"depth-clique:4:{depth}:alpha={alpha}"
        wins = np.mean([run_trial(n, t, b, spec, k4, seed=s).success
                        for s in range(30)])
        rates.append(wins)
    print(f"  {depth}     " + "  ".join(f"{r:5.2f}" for r in rates))
