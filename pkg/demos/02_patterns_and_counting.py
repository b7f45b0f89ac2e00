#!/usr/bin/env python3
"""Target patterns, labelled/unlabelled copy counting, incremental detection.

Run:  python3 demos/02_patterns_and_counting.py
"""

from budgetrgp import (Graph, contains, count_labelled, count_unlabelled,
                       incremental_contains, make_clique, make_cycle, make_k1t,
                       make_wheel, tree_path)

# -- the built-in families --------------------------------------------------

for pat in (make_wheel(4), make_wheel(5), make_clique(5), make_cycle(5),
            make_k1t(tree_path(2))):
    print(f"{pat.family_tag:12s} v={pat.v} e={pat.e} aut={pat.aut}")

print("\nwheel on 4 vertices IS the 4-clique:",
      make_wheel(4).edges == make_clique(4).edges)

# -- counting in a host ------------------------------------------------------

k5 = Graph.from_edges(5, [(i, j) for i in range(5) for j in range(i + 1, 5)])
w4 = make_wheel(4)
print(f"\ncomplete 5-vertex host: labelled W4 copies = {count_labelled(k5, w4)}, "
      f"unlabelled = {count_unlabelled(k5, w4)} (5 four-subsets, aut 24)")

# -- incremental detection: checks only around the inserted edge ------------

host = Graph(8)
edges = [(0, 1), (1, 2), (2, 3), (3, 0), (0, 4), (1, 4), (2, 4)]
triangle = make_clique(3)
for u, v in edges:
    host.add_edge(u, v)
    hit = incremental_contains(host, triangle, (u, v))
    print(f"added ({u},{v}) -> triangle through it: {hit}")
print("full-host check agrees:", contains(host, triangle))
