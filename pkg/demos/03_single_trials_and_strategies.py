#!/usr/bin/env python3
"""Budget-constrained trials under the built-in Builder strategies.

Run:  python3 demos/03_single_trials_and_strategies.py
"""

import math

from budgetrgp import choose_params, make_clique, make_wheel, run_trial

# -- one trial, fully deterministic ------------------------------------------

res = run_trial(n=6, t=15, b=15, strategy="buy-all", target=make_wheel(4), seed=3)
print(f"buy-all on the full n=6 process: success={res.success} at step {res.hit_step}, "
      f"{res.budget_used} edges bought")

# -- a two-stage sparse-regime run, with its stage ledger --------------------

n, t = 60, 377              # t ~ n^1.45, below the n^1.5 crossover
b = 8 * round(max(n ** 8 / t ** 5, n ** 2 / t))
params = choose_params(("wheel", 4), n, t, b)
print(f"\nsparse wheel at n={n}, t={t}, b={b}: centre set size {params.x_size}")
if params.warnings:
    print("finite-scale margin notes:")
    for w in params.warnings:
        print("  -", w)
res = run_trial(n, t, b, "wheel:4:auto", make_wheel(4), seed=11, run_to_end=True)
print("stage ledger:")
for rec in res.stage_ledger:
    print(f"  [{rec.depth}] {rec.label}: {rec.steps_used}/{rec.steps_allotted} steps, "
          f"{rec.edges_bought}/{rec.edge_cap} edges")

# -- the dense regime delegates a cycle hunt into one neighbourhood ----------

n = 1000
t = math.ceil(n ** 1.8)
for b in (8, 32, 128):
    wins = sum(run_trial(n, t, b, "wheel:4:auto", make_wheel(4), seed=s).success
               for s in range(30))
    print(f"dense wheel n={n}, t={t}, b={b:4d}: {wins}/30 successes")

# -- nested clique strategies -------------------------------------------------

n, t, b = 200, math.ceil(200 ** 1.75), 200
for spec in ("depth-clique:4:0:alpha=31", "depth-clique:4:1:alpha=200"):
    wins = sum(run_trial(n, t, b, spec, make_clique(4), seed=s).success
               for s in range(30))
    print(f"{spec:28s}: {wins}/30 successes at n={n}")
