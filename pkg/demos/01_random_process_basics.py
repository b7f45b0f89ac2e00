#!/usr/bin/env python3
"""Streamed random edge offers: determinism, uniformity, induced subprocesses.

Run:  python3 demos/01_random_process_basics.py
"""

import numpy as np

from budgetrgp import new_process, subprocess_view

# -- a seeded stream is a lazy uniform permutation of all pairs -------------

stream = new_process(6, seed=2024)
print(f"n=6 process: M = {stream.M} pairs")
print("first five offers:", [stream.next_offer() for _ in range(5)])

replay = new_process(6, seed=2024)
print("replay matches:", np.array_equal(replay.take(5), stream.trace))

# -- empirical uniformity of the first offer --------------------------------

counts = {}
for seed in range(6000):
    offer = new_process(4, seed=seed).next_offer()
    counts[offer] = counts.get(offer, 0) + 1
print("\nfirst-offer frequencies over 6000 seeds at n=4 (expect ~1000 each):")
for pair, c in sorted(counts.items()):
    print(f"  {pair}: {c}")

# -- induced subprocess on a vertex subset ----------------------------------
#
# Watching only offers inside U during a window gives a random graph process
# on U whose length concentrates near (window length) * |U|^2 / n^2.

n, window = 500, 40_000
stream = new_process(n, seed=7)
trace = stream.take(window)
U = np.arange(60)
view = subprocess_view(trace, U, j=0, t_seg=window)
expect = window * (len(U) / n) ** 2
print(f"\ninduced offers inside |U|=60 of n=500 over {window} steps: "
      f"{view.observed_length} (naive expectation ~{expect:.0f})")

lengths = []
for seed in range(30):
    tr = new_process(n, seed=seed).take(window)
    lengths.append(subprocess_view(tr, U, j=0, t_seg=window).observed_length)
print(f"over 30 seeds: mean {np.mean(lengths):.1f}, min {min(lengths)}, max {max(lengths)}")
