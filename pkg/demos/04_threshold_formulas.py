#!/usr/bin/env python3
"""Budget-threshold envelopes, crossovers, copy-count bounds, expectations.

Run:  python3 demos/04_threshold_formulas.py
"""

import math
from fractions import Fraction

from budgetrgp import (copy_count_bound, crossover_of, expected_copies_gt,
                       expected_copies_process, make_clique, make_wheel,
                       threshold, threshold_formula)

# -- exact crossover exponents ------------------------------------------------

for family in ("wheel:4", "wheel:6", "clique:5", "k1t:2"):
    formula = threshold_formula(family)
    env = formula.upper if formula.upper is not None else formula.lower
    m1, m2 = env.monomials()[:2]
    tau = crossover_of(m1, m2)
    print(f"{family:9s} envelope terms {str(m1):12s} / {str(m2):16s} "
          f"cross at t = n^{tau}  (cutoff exponent {formula.cutoff})")

# -- numeric envelope values ---------------------------------------------------

n = 10_000
print(f"\nbudget envelopes at n={n}:")
for exp in (1.40, 1.50, 1.60, 1.80):
    t = math.ceil(n ** exp)
    row = threshold("wheel:4", n, t)
    print(f"  t=n^{exp:.2f}: lower={row['lower']:12.2f} upper={row['upper']:12.2f} "
          f"cutoff_ok={row['cutoff_ok']}")

# -- the copy-count bound ------------------------------------------------------

n, t, b = 200, 4000, 50
for pat in (make_clique(3), make_clique(4), make_wheel(5)):
    print(f"copy bound for {pat.family_tag} at n={n}, t={t}, b={b}: "
          f"{copy_count_bound(pat, n, t, b):.3f} (eta = ln n)")

# -- first-moment expectations below the appearance cutoff --------------------

w5 = make_wheel(5)
print("\nexpected unlabelled wheel(5) copies at t = n^1.3 (cutoff is n^(11/8)):")
for n in (200, 400, 800, 3200, 12800):
    t = math.ceil(n ** 1.3)
    print(f"  n={n:6d}: density-model {expected_copies_gt(w5, n, t):8.4f}   "
          f"exact t-edge model {expected_copies_process(w5, n, t):8.4f}")
