"""Target patterns and subgraph containment/counting.

Containment is non-induced throughout: a copy of a pattern is an injective
map of its vertices into the host under which every pattern edge lands on a
host edge.  ``count_labelled`` counts these maps; ``count_unlabelled``
divides by the automorphism count.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

from .errors import InternalCheckError, InvalidParameterError, InvalidPatternError
from .graphs import Graph, iter_bits

MAX_PATTERN_VERTICES = 12


@dataclass(frozen=True)
class Embedding:
    """An injective, edge-preserving assignment pattern vertex -> host vertex."""

    map: tuple[int, ...]


class PatternGraph:
    """A fixed labelled target graph on at most 12 vertices."""

    __slots__ = ("v", "edges", "family_tag", "aut", "_adj", "_order_cache", "_edge_orders")

    def __init__(self, v: int, edges: Sequence[tuple[int, int]], family_tag: str = "custom"):
        if v < 1:
            raise InvalidPatternError(f"pattern needs at least one vertex, got {v}")
        if v > MAX_PATTERN_VERTICES:
            raise InvalidPatternError(
                f"pattern has {v} vertices; the toolkit caps patterns at {MAX_PATTERN_VERTICES}"
            )
        seen = set()
        norm = []
        for u, w in edges:
            if u == w:
                raise InvalidPatternError(f"self-loop at pattern vertex {u}")
            if not (0 <= u < v and 0 <= w < v):
                raise InvalidPatternError(f"pattern edge ({u},{w}) outside range [0,{v})")
            e = (min(u, w), max(u, w))
            if e in seen:
                raise InvalidPatternError(f"duplicate pattern edge {e}")
            seen.add(e)
            norm.append(e)
        self.v = v
        self.edges = tuple(sorted(norm))
        self.family_tag = family_tag
        adj = [0] * v
        for u, w in self.edges:
            adj[u] |= 1 << w
            adj[w] |= 1 << u
        self._adj = adj
        self._order_cache = None
        self._edge_orders = None
        # Self-count of labelled embeddings equals the automorphism group size.
        self.aut = count_labelled(self.as_graph(), self)

    @property
    def e(self) -> int:
        return len(self.edges)

    def degree(self, u: int) -> int:
        return self._adj[u].bit_count()

    def as_graph(self) -> Graph:
        return Graph.from_edges(self.v, self.edges)

    def is_connected(self) -> bool:
        if self.v == 1:
            return True
        seen = 1
        frontier = [0]
        while frontier:
            u = frontier.pop()
            for w in iter_bits(self._adj[u]):
                if not (seen >> w & 1):
                    seen |= 1 << w
                    frontier.append(w)
        return seen == (1 << self.v) - 1

    # -- search plans ------------------------------------------------------

    def search_plan(self):
        """Vertex order plus, per position, the earlier positions it must attach to."""
        if self._order_cache is None:
            self._order_cache = _build_plan(self, ())
        return self._order_cache

    def rooted_plans(self):
        """Search plans rooted at each directed pattern edge (for incremental checks)."""
        if self._edge_orders is None:
            plans = []
            for a, b in self.edges:
                plans.append((a, b, _build_plan(self, (a, b))))
                plans.append((b, a, _build_plan(self, (b, a))))
            self._edge_orders = plans
        return self._edge_orders

    def __repr__(self):
        return f"PatternGraph({self.family_tag}, v={self.v}, e={self.e}, aut={self.aut})"


def _build_plan(pat: PatternGraph, seed: tuple[int, ...]):
    """Greedy order: most-anchored first, ties by degree, starting from ``seed``."""
    order = list(seed)
    placed = set(seed)
    while len(order) < pat.v:
        best = None
        best_key = None
        for u in range(pat.v):
            if u in placed:
                continue
            anchors = sum(1 for w in iter_bits(pat._adj[u]) if w in placed)
            key = (anchors, pat.degree(u), -u)
            if best_key is None or key > best_key:
                best, best_key = u, key
        order.append(best)
        placed.add(best)
    pos = {u: i for i, u in enumerate(order)}
    anchor_lists = []
    for i, u in enumerate(order):
        anchor_lists.append(tuple(pos[w] for w in iter_bits(pat._adj[u]) if pos[w] < i))
    return tuple(order), tuple(anchor_lists)


# -- constructors ----------------------------------------------------------


def make_wheel(k: int) -> PatternGraph:
    """Wheel on k vertices: a (k-1)-cycle plus a hub adjacent to every rim vertex."""
    if k < 4:
        raise InvalidParameterError(f"wheel needs k >= 4, got {k}")
    rim = list(range(1, k))
    edges = [(0, r) for r in rim]
    edges += [(rim[i], rim[(i + 1) % len(rim)]) for i in range(len(rim))]
    return PatternGraph(k, edges, family_tag=f"wheel({k})")


def make_clique(r: int) -> PatternGraph:
    if r < 2:
        raise InvalidParameterError(f"clique needs r >= 2, got {r}")
    edges = [(i, j) for i in range(r) for j in range(i + 1, r)]
    return PatternGraph(r, edges, family_tag=f"clique({r})")


def make_cycle(l: int) -> PatternGraph:
    if l < 3:
        raise InvalidParameterError(f"cycle needs l >= 3, got {l}")
    edges = [(i, (i + 1) % l) for i in range(l)]
    return PatternGraph(l, edges, family_tag=f"cycle({l})")


def make_k1t(tree_edges: Sequence[tuple[int, int]]) -> PatternGraph:
    """Tree plus one universal vertex adjacent to every tree vertex.

    A tree with m edges yields a pattern with m+2 vertices and 2m+1 edges.
    """
    edges = list(tree_edges)
    if not edges:
        raise InvalidPatternError("k1t needs a tree with at least one edge")
    labels = sorted({x for e in edges for x in e})
    relab = {x: i for i, x in enumerate(labels)}
    m = len(edges)
    if len(labels) != m + 1:
        raise InvalidPatternError(
            f"input is not a tree: {m} edges over {len(labels)} vertices"
        )
    tree = [(relab[u], relab[w]) for u, w in edges]
    if not _is_tree(len(labels), tree):
        raise InvalidPatternError("input edges contain a cycle or are disconnected")
    hub = m + 1
    full = tree + [(hub, i) for i in range(m + 1)]
    return PatternGraph(m + 2, full, family_tag=f"k1t(m={m})")


def _is_tree(n: int, edges: list[tuple[int, int]]) -> bool:
    if len(edges) != n - 1:
        return False
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, w in edges:
        ru, rw = find(u), find(w)
        if ru == rw:
            return False
        parent[ru] = rw
    return True


def tree_path(m: int) -> list[tuple[int, int]]:
    """Path with m edges, as an edge list usable by make_k1t."""
    if m < 1:
        raise InvalidParameterError(f"path needs m >= 1 edges, got {m}")
    return [(i, i + 1) for i in range(m)]


def tree_star(m: int) -> list[tuple[int, int]]:
    """Star with m edges (centre 0)."""
    if m < 1:
        raise InvalidParameterError(f"star needs m >= 1 edges, got {m}")
    return [(0, i + 1) for i in range(m)]


def parse_tree_spec(token: str) -> list[tuple[int, int]]:
    """edge | pathM | starM -> tree edge list (M counts edges)."""
    token = token.strip().lower()
    if token == "edge":
        return tree_path(1)
    if token.startswith("path") and token[4:].isdigit():
        return tree_path(int(token[4:]))
    if token.startswith("star") and token[4:].isdigit():
        return tree_star(int(token[4:]))
    raise InvalidParameterError(f"unknown tree spec {token!r} (want edge, pathM or starM)")


def load_pattern_json(source) -> PatternGraph:
    """Custom pattern from ``{"vertices": int, "edges": [[u,v],...]}``, 0-indexed."""
    if isinstance(source, dict):
        doc = source
    elif hasattr(source, "read"):
        doc = json.load(source)
    else:
        with open(source) as fh:
            doc = json.load(fh)
    if not isinstance(doc, dict) or "vertices" not in doc or "edges" not in doc:
        raise InvalidPatternError("pattern document must have 'vertices' and 'edges' keys")
    try:
        edges = [(int(u), int(v)) for u, v in doc["edges"]]
    except (TypeError, ValueError) as exc:
        raise InvalidPatternError(f"malformed edge list: {exc}") from exc
    return PatternGraph(int(doc["vertices"]), edges, family_tag="custom")


# -- containment and counting ---------------------------------------------


def _search(host: Graph, pat: PatternGraph, order, anchors, images, used, depth, count_all):
    """Backtracking core; returns the number of completions (stops at 1 unless counting)."""
    if depth == len(order):
        return 1
    anc = anchors[depth]
    if anc:
        cand = host.adj[images[anc[0]]]
        for a in anc[1:]:
            cand &= host.adj[images[a]]
        cand &= ~used
    else:
        cand = ((1 << host.n) - 1) & ~used
    total = 0
    for w in iter_bits(cand):
        images[depth] = w
        total += _search(host, pat, order, anchors, images, used | (1 << w), depth + 1, count_all)
        if total and not count_all:
            return total
    return total


def count_labelled(host: Graph, pattern: PatternGraph) -> int:
    """Number of injective edge-preserving maps from the pattern into the host."""
    if pattern.v > host.n:
        return 0
    order, anchors = pattern.search_plan()
    images = [0] * pattern.v
    return _search(host, pattern, order, anchors, images, 0, 0, True)


def count_unlabelled(host: Graph, pattern: PatternGraph) -> int:
    """Labelled count divided by the automorphism count; the division must be exact."""
    total = count_labelled(host, pattern)
    q, rem = divmod(total, pattern.aut)
    if rem:
        raise InternalCheckError(
            f"labelled count {total} not divisible by aut={pattern.aut} for {pattern.family_tag}"
        )
    return q


def contains(host: Graph, pattern: PatternGraph) -> bool:
    """True iff the host has a copy of the pattern."""
    if pattern.v > host.n:
        return False
    order, anchors = pattern.search_plan()
    images = [0] * pattern.v
    return _search(host, pattern, order, anchors, images, 0, 0, False) > 0


def find_embedding(host: Graph, pattern: PatternGraph) -> Embedding | None:
    """One witness embedding, or None."""
    if pattern.v > host.n:
        return None
    order, anchors = pattern.search_plan()
    images = [0] * pattern.v

    def walk(depth, used):
        if depth == len(order):
            return True
        anc = anchors[depth]
        if anc:
            cand = host.adj[images[anc[0]]]
            for a in anc[1:]:
                cand &= host.adj[images[a]]
            cand &= ~used
        else:
            cand = ((1 << host.n) - 1) & ~used
        for w in iter_bits(cand):
            images[depth] = w
            if walk(depth + 1, used | (1 << w)):
                return True
        return False

    if not walk(0, 0):
        return None
    by_vertex = [0] * pattern.v
    for pos, pv in enumerate(order):
        by_vertex[pv] = images[pos]
    return Embedding(tuple(by_vertex))


def incremental_contains(host: Graph, pattern: PatternGraph, new_edge: tuple[int, int]) -> bool:
    """True iff some copy of the pattern uses ``new_edge``.

    Called after every insertion starting from a pattern-free host, this is
    equivalent to ``contains`` while only searching locally around the new
    edge: the two endpoints are pinned to each pattern edge in both
    orientations and the backtracking grows outward from there.
    """
    u, v = new_edge
    if not host.has_edge(u, v):
        raise InvalidParameterError(f"new_edge ({u},{v}) is not in the host")
    if pattern.v > host.n:
        return False
    for a, b, (order, anchors) in pattern.rooted_plans():
        images = [0] * pattern.v
        images[0], images[1] = u, v
        # Pinned endpoints must satisfy pattern adjacency among themselves
        # (always true: (a, b) is a pattern edge and (u, v) a host edge).
        used = (1 << u) | (1 << v)
        if _search(host, pattern, order, anchors, images, used, 2, False):
            return True
    return False
