"""Small undirected host graphs with bitset adjacency.

Vertices are 0..n-1.  Adjacency rows are Python ints used as bitmasks, which
keeps neighbourhood intersection (the inner operation of subgraph search)
a single ``&``.
"""

from __future__ import annotations

import json
from typing import Iterable, Iterator

from .errors import InvalidParameterError


def iter_bits(mask: int) -> Iterator[int]:
    """Yield the set bit positions of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class Graph:
    """Mutable simple graph on vertex set {0, ..., n-1}."""

    __slots__ = ("n", "adj", "edge_count")

    def __init__(self, n: int):
        if n < 1:
            raise InvalidParameterError(f"graph needs at least one vertex, got n={n}")
        self.n = n
        self.adj = [0] * n
        self.edge_count = 0

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        g = cls(n)
        for u, v in edges:
            g.add_edge(u, v)
        return g

    def add_edge(self, u: int, v: int) -> bool:
        """Insert {u, v}; returns False if it was already present."""
        if u == v:
            raise InvalidParameterError(f"self-loop at vertex {u}")
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise InvalidParameterError(f"edge ({u},{v}) outside vertex range [0,{self.n})")
        if self.adj[u] >> v & 1:
            return False
        self.adj[u] |= 1 << v
        self.adj[v] |= 1 << u
        self.edge_count += 1
        return True

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def degree(self, u: int) -> int:
        return self.adj[u].bit_count()

    def neighbors(self, u: int) -> Iterator[int]:
        return iter_bits(self.adj[u])

    def edges(self) -> Iterator[tuple[int, int]]:
        for u in range(self.n):
            higher = self.adj[u] >> (u + 1) << (u + 1)
            for v in iter_bits(higher):
                yield (u, v)

    def copy(self) -> "Graph":
        g = Graph.__new__(Graph)
        g.n = self.n
        g.adj = list(self.adj)
        g.edge_count = self.edge_count
        return g

    def __repr__(self):
        return f"Graph(n={self.n}, edges={self.edge_count})"


def load_graph_json(source) -> Graph:
    """Read a graph from ``{"vertices": n, "edges": [[u, v], ...]}`` (0-indexed).

    ``source`` may be a path, an open file, or an already-parsed dict.
    """
    if isinstance(source, dict):
        doc = source
    elif hasattr(source, "read"):
        doc = json.load(source)
    else:
        with open(source) as fh:
            doc = json.load(fh)
    if not isinstance(doc, dict) or "vertices" not in doc or "edges" not in doc:
        raise InvalidParameterError("graph document must have 'vertices' and 'edges' keys")
    n = doc["vertices"]
    if not isinstance(n, int) or n < 1:
        raise InvalidParameterError(f"'vertices' must be a positive integer, got {n!r}")
    g = Graph(n)
    for item in doc["edges"]:
        if not (isinstance(item, (list, tuple)) and len(item) == 2):
            raise InvalidParameterError(f"edge entry {item!r} is not a pair")
        u, v = item
        if not g.add_edge(int(u), int(v)):
            raise InvalidParameterError(f"duplicate edge ({u},{v}) in document")
    return g
