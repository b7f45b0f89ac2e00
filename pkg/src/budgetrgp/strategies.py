"""Builder strategies and their tuning parameters.

Every strategy describes itself to the engine as a sequence of stages
(:mod:`budgetrgp.engine`): a time window, an edge cap, and either a
vectorized eligibility predicate, a per-offer decision function, or a
delegated sub-strategy simulated on a vertex subset.

Strategy spec strings (CLI and harness):

    buy-all | buy-none
    wheel:K[:REGIME]        REGIME in {auto, sparse, dense}
    k5[:REGIME]
    k1t:TREE[:REGIME]       TREE in {edge, pathM, starM}
    depth-clique:S:I
    cycle:L
    tree:TREE

with optional trailing overrides such as ``wheel:4:dense:ntilde=30:t1=5000``.
Supported override keys: r, xsize, ntilde, t1, alpha, kj.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InfeasibleParametersError, InvalidParameterError
from .graphs import iter_bits
from .engine import DecideStage, PredicateStage, SubprocessStage
from . import patterns

_BIG = 1 << 62


# ---------------------------------------------------------------------------
# Parameter selection
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ParamSet:
    """Concrete values for every tuning quantity a strategy may need.

    ``warnings`` lists the asymptotic side conditions that fail the 10x
    finite-scale margin at these values; they are heuristic regime
    indicators, not errors.
    """

    family: str
    regime: str                       # sparse | dense | depth
    r: int | None = None
    x_size: int | None = None
    n_tilde: int | None = None
    t1: int | None = None
    alpha: int | None = None
    k_js: tuple[int, ...] | None = None
    depth: int | None = None
    s: int | None = None
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        for name in ("r", "x_size", "n_tilde", "t1", "alpha", "depth", "s"):
            val = getattr(self, name)
            if val is not None and (val < 0 or (name != "depth" and val < 1)):
                raise InvalidParameterError(f"{name}={val} must be positive")


def crossover_exponent(family: str, m: int | None = None) -> float:
    """Exponent of the t-crossover between sparse and dense regimes."""
    if family == "wheel":
        return 1.5
    if family == "k5":
        return 13 / 8
    if family == "k1t":
        return (3 * m + 1) / (2 * m + 1)
    raise InvalidParameterError(f"no crossover for family {family!r}")


def _ratio_warn(warnings: list, label: str, small, big, ratio: float):
    """Record when `small` is not below `big` by the finite-scale margin."""
    if small * ratio > big:
        warnings.append(f"{label}: {small:.4g} !<< {big:.4g} (margin {ratio:g}x)")


def choose_params(family, n: int, t: int, b: int, *, regime: str = "auto",
                  overrides: dict | None = None, ratio: float = 10.0) -> ParamSet:
    """Pick concrete strategy parameters for a target family at scale (n, t, b).

    ``family`` is a tuple: ("wheel", k), ("k5",), ("k1t", m) or
    ("depth-clique", s, i).  Every asymptotic side condition is checked
    numerically; failures at this finite scale are reported as warnings on
    the returned ParamSet.  Raises when no runnable assignment exists.
    """
    overrides = dict(overrides or {})
    if n < 2 or t < 1 or b < 1:
        raise InvalidParameterError(f"need n >= 2, t >= 1, b >= 1; got {n}, {t}, {b}")
    kind = family[0]
    warnings: list[str] = []
    ln_n = math.log(n)

    if kind == "depth-clique":
        s, depth = family[1], family[2]
        if s < 3 or not (0 <= depth <= s - 1):
            raise InvalidParameterError(f"depth-clique needs s >= 3 and 0 <= i <= s-1; got s={s}, i={depth}")
        alpha = int(overrides.pop("alpha", max(2, math.ceil(n / ln_n))))
        alpha = min(alpha, n)
        kj_default = max(1, math.ceil((b / s) ** (1.0 / (depth + 1))))
        kj = overrides.pop("kj", kj_default)
        k_js = tuple(int(kj) for _ in range(depth)) if depth else ()
        _reject_unknown(overrides)
        return ParamSet(family=_family_tag(family), regime="depth", alpha=alpha,
                        k_js=k_js, depth=depth, s=s, warnings=tuple(warnings))

    if kind == "wheel":
        k = family[1]
        if k < 4:
            raise InvalidParameterError(f"wheel needs k >= 4, got {k}")
        cross = crossover_exponent("wheel")
        x_exp = (3 * k - 3, 2 * k - 2)
        low_env_exp = 1.0
    elif kind == "k5":
        cross = crossover_exponent("k5")
        x_exp = (16, 10)
        low_env_exp = 5 / 3
    elif kind == "k1t":
        m = family[1]
        if m < 1:
            raise InvalidParameterError(f"k1t needs a tree with m >= 1 edges, got {m}")
        cross = crossover_exponent("k1t", m)
        x_exp = (3 * m + 1, 2 * m + 1)
        low_env_exp = m / (m + 1)
    else:
        raise InvalidParameterError(f"unknown strategy family {family!r}")

    if regime == "auto":
        # Tie at the exact crossover resolves to sparse (deterministic replay).
        regime = "sparse" if t <= n ** cross * (1 + 1e-12) else "dense"
    if regime not in ("sparse", "dense"):
        raise InvalidParameterError(f"regime must be auto, sparse or dense; got {regime!r}")

    if regime == "sparse":
        r = int(overrides.pop("r", max(1, math.ceil(t / ln_n))))
        raw = math.ceil(n ** x_exp[0] / r ** x_exp[1])
        x_size = int(overrides.pop("xsize", 0)) or min(max(raw, 1), n // 2)
        if x_size > n // 2:
            raise InfeasibleParametersError(f"x_size={x_size} exceeds n/2={n // 2}")
        if raw > n // 2:
            warnings.append(f"x_size clamped from {raw} to {x_size}")
        _ratio_warn(warnings, "r = o(t)", r, t, ratio)
        if kind == "wheel":
            _ratio_warn(warnings, "n^(3k-4) t / r^(2k-2) = o(b)",
                        n ** (3 * k - 4) * t / r ** (2 * k - 2), b, ratio)
        elif kind == "k5":
            _ratio_warn(warnings, "r = w(n^3/2)", n ** 1.5, r, ratio)
            _ratio_warn(warnings, "n^9 t^4 / r^10 = o(1)", n ** 9 * t ** 4 / r ** 10, 1.0, ratio)
            _ratio_warn(warnings, "n^12 t^3 / r^10 = o(b)", n ** 12 * t ** 3 / r ** 10, b, ratio)
        else:
            _ratio_warn(warnings, "r = w(n^(3m/(2m+1)))", n ** (3 * m / (2 * m + 1)), r, ratio)
            _ratio_warn(warnings, "n^3m t / r^(2m+1) = o(b)",
                        n ** (3 * m) * t / r ** (2 * m + 1), b, ratio)
            _ratio_warn(warnings, "n^(3m-3) t^3 / r^(2m+1) = o(b)",
                        n ** (3 * m - 3) * t ** 3 / r ** (2 * m + 1), b, ratio)
        _reject_unknown(overrides)
        return ParamSet(family=_family_tag(family), regime="sparse", r=r, x_size=x_size,
                        warnings=tuple(warnings))

    # Dense regime: neighbourhood size as the geometric mean of the two
    # budget envelopes it must sit between, star time fitted into the
    # feasibility window.
    low_env = (n * n / t) ** low_env_exp
    pair_cap = min(b, t / n)
    nt_geo = max(1, math.ceil(math.sqrt(low_env * max(pair_cap, 1.0))))
    t1_cap = min(t // max(ln_n, 1.0), math.ceil(t / 2) - 1)
    t1_cap = int(t1_cap)
    nt_max = t1_cap // n
    if nt_max < 1:
        raise InfeasibleParametersError(
            f"dense regime needs t1 >= n for one star; window allows t1 <= {t1_cap} at n={n}"
        )
    n_tilde = int(overrides.pop("ntilde", 0)) or min(nt_geo, nt_max, n - 1)
    if n_tilde > n:
        raise InfeasibleParametersError(f"n_tilde={n_tilde} exceeds n={n}")
    if nt_geo > n_tilde:
        warnings.append(f"n_tilde clamped from {nt_geo} to {n_tilde}")
    t1_default = min(max(n_tilde * n, math.ceil((n * n / n_tilde ** 2) * ln_n)), t1_cap)
    t1 = int(overrides.pop("t1", 0)) or t1_default
    if not (n_tilde * n <= t1 < math.ceil(t / 2)):
        raise InfeasibleParametersError(
            f"need n_tilde*n <= t1 < t/2; got n_tilde={n_tilde}, t1={t1}, t={t}"
        )
    _ratio_warn(warnings, "n_tilde = w(lower envelope)", low_env, n_tilde, ratio)
    _ratio_warn(warnings, "n_tilde = o(b)", n_tilde, b, ratio)
    _ratio_warn(warnings, "n_tilde = o(t/n)", n_tilde, t / n, ratio)
    _ratio_warn(warnings, "t1 = o(t)", t1, t, ratio)
    _ratio_warn(warnings, "t1 n_tilde^2 = w(n^2)", n * n, t1 * n_tilde ** 2, ratio)
    _reject_unknown(overrides)
    return ParamSet(family=_family_tag(family), regime="dense", n_tilde=n_tilde, t1=t1,
                    warnings=tuple(warnings))


def _family_tag(family) -> str:
    return ":".join(str(x) for x in family)


def _reject_unknown(overrides: dict):
    if overrides:
        raise InvalidParameterError(f"unknown parameter overrides: {sorted(overrides)}")


# ---------------------------------------------------------------------------
# Strategy base machinery
# ---------------------------------------------------------------------------


class Strategy:
    """Base: a named stage supplier bound to one trial at a time."""

    name = "strategy"

    def __init__(self, universe=None):
        self.universe = None if universe is None else np.asarray(universe, dtype=np.int64)
        self.ctx = None
        self.t_local = None
        self.b_local = None

    def bind(self, ctx, t_local: int, b_local: int):
        self.ctx = ctx
        self.t_local = t_local
        self.b_local = b_local

    # Subclasses implement stages(ctx) as a generator; state read between
    # yields sees the purchases of the stage that just ran.
    def stages(self, ctx):
        raise NotImplementedError

    # -- helpers ----------------------------------------------------------

    def _vertices(self, ctx) -> np.ndarray:
        if self.universe is not None:
            return self.universe
        return np.arange(ctx.n, dtype=np.int64)

    def _umask(self, ctx) -> int:
        if self.universe is None:
            return (1 << ctx.n) - 1
        mask = 0
        for v in self.universe.tolist():
            mask |= 1 << v
        return mask

    def _built_neighbors(self, ctx, x: int) -> np.ndarray:
        """Neighbours of x in the built graph, restricted to this universe."""
        bits = ctx.built.adj[x] & self._umask(ctx)
        return np.fromiter(iter_bits(bits), dtype=np.int64)


def _pair_codes(n: int, us, vs) -> np.ndarray:
    us = np.asarray(us, dtype=np.int64)
    vs = np.asarray(vs, dtype=np.int64)
    return np.minimum(us, vs) * n + np.maximum(us, vs)


def _membership(n: int, verts) -> np.ndarray:
    m = np.zeros(n, dtype=bool)
    m[np.asarray(verts, dtype=np.int64)] = True
    return m


class BuyAll(Strategy):
    """Accept every offer until time or budget runs out."""

    name = "buy-all"

    def stages(self, ctx):
        yield PredicateStage("buy-all", None, self.b_local,
                             lambda us, vs: np.ones(len(us), dtype=bool))


class BuyNone(Strategy):
    """Reject everything (baseline)."""

    name = "buy-none"

    def stages(self, ctx):
        return
        yield  # pragma: no cover


class PerOffer(Strategy):
    """Adapter for user-supplied per-offer decision callables."""

    name = "per-offer"

    def __init__(self, decide, edge_cap=_BIG, universe=None, label="per-offer"):
        super().__init__(universe)
        self._decide = decide
        self._cap = edge_cap
        self.name = label

    def stages(self, ctx):
        yield DecideStage(self.name, None, self._cap, lambda u, v: self._decide(u, v))


# ---------------------------------------------------------------------------
# Sparse-regime star-of-stars strategy (wheels, K5, K1T)
# ---------------------------------------------------------------------------


class TwoStageSparse(Strategy):
    """Stage 1 joins a small centre set X to the rest; stage 2 buys inside
    the acquired neighbourhoods.  The target family only affects parameter
    choice and the success pattern the engine watches for."""

    def __init__(self, family, n: int, t: int, b: int, params: ParamSet, universe=None):
        super().__init__(universe)
        if params.x_size is None:
            raise InvalidParameterError("sparse strategy needs params.x_size")
        self.family = family
        self.n_logical = n
        self.t = t
        self.b = b
        self.params = params
        self.name = f"{_family_tag(family)}:sparse"
        if params.x_size > max(1, n // 2):
            raise InvalidParameterError(
                f"x_size={params.x_size} must be at most half of n={n}")

    def stages(self, ctx):
        verts = self._vertices(ctx)
        x_size = min(self.params.x_size, max(1, len(verts) - 1))
        X = verts[:x_size]
        side = np.zeros(ctx.n, dtype=np.int8)
        side[verts] = 2
        side[X] = 1
        t_half = self.t // 2
        b_half = self.b // 2

        yield PredicateStage("sparse-stage1-join-X-V", t_half, b_half,
                             lambda us, vs: side[us] + side[vs] == 3)

        umask = self._umask(ctx)
        codes = set()
        for x in X.tolist():
            nbrs = list(iter_bits(ctx.built.adj[x] & umask))
            for i, u in enumerate(nbrs):
                for v in nbrs[i + 1:]:
                    codes.add(min(u, v) * ctx.n + max(u, v))
        cand = np.fromiter(sorted(codes), dtype=np.int64) if codes else np.empty(0, np.int64)
        remaining_cap = self.b - ctx.purchased

        def inside_neighbourhood(us, vs):
            if cand.size == 0:
                return np.zeros(len(us), dtype=bool)
            c = _pair_codes(ctx.n, us, vs)
            pos = np.searchsorted(cand, c)
            pos[pos >= cand.size] = cand.size - 1
            return cand[pos] == c

        yield PredicateStage("sparse-stage2-inside-neighbourhoods", None,
                             remaining_cap, inside_neighbourhood)


# ---------------------------------------------------------------------------
# Dense-regime star-then-delegate strategy (wheels, K5, K1T)
# ---------------------------------------------------------------------------


class DenseStarThen(Strategy):
    """Grow one star, then run a delegated strategy inside its leaf set.

    ``inner_factory(U, sim_steps, edge_cap)`` builds the delegated strategy.
    """

    def __init__(self, family, n: int, t: int, b: int, params: ParamSet,
                 inner_factory, min_leaves: int, universe=None):
        super().__init__(universe)
        if params.n_tilde is None or params.t1 is None:
            raise InvalidParameterError("dense strategy needs params.n_tilde and params.t1")
        self.family = family
        self.n_logical = n
        self.t = t
        self.b = b
        self.params = params
        self.inner_factory = inner_factory
        self.min_leaves = min_leaves
        self.name = f"{_family_tag(family)}:dense"

    def stages(self, ctx):
        verts = self._vertices(ctx)
        x = int(verts[0])
        n_tilde, t1 = self.params.n_tilde, self.params.t1

        yield PredicateStage("dense-stage1-star", t1, n_tilde,
                             lambda us, vs: (us == x) | (vs == x))

        U = self._built_neighbors(ctx, x)
        if len(U) < n_tilde:
            ctx.flags.add("degraded-run")
        if len(U) < self.min_leaves:
            ctx.flags.add("infeasible-subroutine")
            return
        sim_steps = int(self.t * n_tilde ** 2 / (4 * self.n_logical ** 2))
        cap = self.b // 2
        if sim_steps < 1 or cap < 1:
            ctx.flags.add("infeasible-subroutine")
            return
        inner = self.inner_factory(U, sim_steps, cap)
        if inner is None:
            ctx.flags.add("infeasible-subroutine")
            return
        yield SubprocessStage("dense-stage2-delegate", self.t // 2, U, sim_steps, cap, inner)


# ---------------------------------------------------------------------------
# Subroutines: dense subset for cycles, layered greedy for trees
# ---------------------------------------------------------------------------


class CycleSubset(Strategy):
    """Buy everything inside a random subset W sized so the expected number
    of intra-W offers stays within the edge budget."""

    def __init__(self, l: int, time_budget: int, edge_budget: int, universe=None):
        super().__init__(universe)
        if l < 3:
            raise InvalidParameterError(f"cycle needs l >= 3, got {l}")
        self.l = l
        self.time_budget = time_budget
        self.edge_budget = edge_budget
        self.name = f"cycle:{l}"

    def stages(self, ctx):
        U = self._vertices(ctx)
        if len(U) < self.l or self.time_budget < 1 or self.edge_budget < 1:
            ctx.flags.add("infeasible-subroutine")
            return
        w = min(len(U), int(len(U) * math.sqrt(self.edge_budget / (2 * self.time_budget))))
        w = max(w, self.l)
        W = np.sort(ctx.rng.choice(U, size=w, replace=False)) if w < len(U) else U
        member = _membership(ctx.n, W)
        yield PredicateStage(f"cycle-subset-w{w}", None, self.edge_budget,
                             lambda us, vs: member[us] & member[vs])


class TreeGreedy(Strategy):
    """Layered greedy tree embedding along a root-BFS edge order.

    Partial embeddings are grown one BFS edge at a time; an offer is bought
    iff it extends at least one stored embedding whose next layer still has
    purchase headroom (layer caps halve geometrically down the order).
    """

    _MAX_EMB_PER_LEVEL = 4096

    def __init__(self, tree_edges: Sequence[tuple[int, int]], time_budget: int,
                 edge_budget: int, universe=None):
        super().__init__(universe)
        edges = list(tree_edges)
        labels = sorted({x for e in edges for x in e})
        relab = {x: i for i, x in enumerate(labels)}
        edges = [(relab[u], relab[v]) for u, v in edges]
        self.m = len(edges)
        if self.m < 1 or len(labels) != self.m + 1 or not patterns._is_tree(len(labels), edges):
            raise InvalidParameterError("tree_greedy needs a tree with at least one edge")
        self.time_budget = time_budget
        self.edge_budget = edge_budget
        self.name = f"tree:m{self.m}"
        # Root-BFS edge order from vertex 0: bfs_edges[j] = (parent_slot, child_vertex)
        adj = {i: [] for i in range(self.m + 1)}
        for u, v in edges:
            adj[u].append(v)
            adj[v].append(u)
        order = [0]
        slot = {0: 0}
        self.bfs_edges = []
        queue = [0]
        while queue:
            u = queue.pop(0)
            for v in sorted(adj[u]):
                if v not in slot:
                    slot[v] = len(order)
                    order.append(v)
                    self.bfs_edges.append((slot[u], slot[v]))
                    queue.append(v)

    def bind(self, ctx, t_local, b_local):
        super().bind(ctx, t_local, b_local)
        # levels[j] = embeddings covering the first j BFS edges (tuples of hosts)
        self.levels = [[] for _ in range(self.m + 1)]
        self.layer_caps = [math.ceil(self.edge_budget / (2 ** (j + 1) * self.m))
                           for j in range(self.m)]
        self.layer_used = [0] * self.m
        self._pending = None

    def _extensions(self, u, v):
        """All (level j, new embedding) pairs the offer (u, v) would create."""
        out = []
        for j in range(self.m - 1, -1, -1):
            if self.layer_used[j] >= self.layer_caps[j]:
                continue
            p_slot, c_slot = self.bfs_edges[j]
            if j == 0:
                out.append((0, (u, v)))
                out.append((0, (v, u)))
                continue
            for emb in self.levels[j]:
                anchor = emb[p_slot]
                if anchor == u and v not in emb:
                    out.append((j, emb + (v,)))
                elif anchor == v and u not in emb:
                    out.append((j, emb + (u,)))
        return out

    def _decide(self, u, v):
        exts = self._extensions(u, v)
        if not exts:
            return False
        self._pending = exts
        return True

    def _on_buy(self, u, v):
        exts = self._pending or []
        self._pending = None
        lowest = min(j for j, _ in exts)
        self.layer_used[lowest] += 1
        for j, emb in exts:
            lvl = self.levels[j + 1]
            if len(lvl) < self._MAX_EMB_PER_LEVEL:
                lvl.append(emb)

    def stages(self, ctx):
        U = self._vertices(ctx)
        if len(U) < self.m + 1 or self.time_budget < 1 or self.edge_budget < 1:
            ctx.flags.add("infeasible-subroutine")
            return
        yield DecideStage(self.name, None, self.edge_budget, self._decide, self._on_buy)


# ---------------------------------------------------------------------------
# Depth-i clique strategy
# ---------------------------------------------------------------------------


class DepthClique(Strategy):
    """Nested star-growing levels followed by buy-all inside the surviving
    common neighbourhoods; succeeds when a clique of the residual order
    appears inside one of them."""

    def __init__(self, s: int, depth: int, n: int, t: int, b: int,
                 params: ParamSet, universe=None):
        super().__init__(universe)
        if s < 3 or not (0 <= depth <= s - 1):
            raise InvalidParameterError(f"need s >= 3 and 0 <= i <= s-1; got s={s}, i={depth}")
        self.s = s
        self.depth = depth
        self.n_logical = n
        self.t = t
        self.b = b
        self.params = params
        self.name = f"depth-clique:{s}:{depth}"

    def stages(self, ctx):
        verts = self._vertices(ctx)
        s, i = self.s, self.depth
        steps_per = self.t // s
        cap_per = self.b // s      # may be 0: the round then only watches time pass
        rng = ctx.rng

        # Fixed contiguous equipartition; the random seed set A is drawn on top.
        parts = np.array_split(verts, s)
        part_index = np.full(ctx.n, -1, dtype=np.int64)
        for idx, part in enumerate(parts):
            part_index[part] = idx
        alpha = min(self.params.alpha or len(verts), len(verts))
        A = np.sort(rng.choice(verts, size=alpha, replace=False))
        a_member = _membership(ctx.n, A)

        vectors = [()]
        neigh = {(): A}

        for j in range(1, i + 1):
            k_j = self.params.k_js[j - 1]
            stage_codes: set[int] = set()
            plan = []
            survivors = []
            for vec in vectors:
                Nprev = neigh[vec]
                in_level = Nprev[part_index[Nprev] == j - 1]
                targets = Nprev[part_index[Nprev] >= j]
                if len(in_level) < k_j:
                    ctx.flags.add("pruned-branch")
                    continue
                Y = np.sort(rng.choice(in_level, size=k_j, replace=False))
                plan.append((vec, Y, targets))
                survivors.append(vec)
                for y in Y.tolist():
                    for v in targets.tolist():
                        stage_codes.add(min(y, v) * ctx.n + max(y, v))
            if not plan:
                ctx.flags.add("pruned-all-branches")
                return
            cand = np.fromiter(sorted(stage_codes), dtype=np.int64)

            def level_eligible(us, vs, cand=cand):
                c = _pair_codes(ctx.n, us, vs)
                pos = np.searchsorted(cand, c)
                pos[pos >= cand.size] = cand.size - 1
                return cand[pos] == c

            stage = PredicateStage(f"depth-level-{j}", steps_per, cap_per, level_eligible)
            yield stage

            bought_adj: dict[int, set[int]] = {}
            for _, u, v in stage.accepted:
                bought_adj.setdefault(u, set()).add(v)
                bought_adj.setdefault(v, set()).add(u)
            vectors = []
            new_neigh = {}
            for vec, Y, targets in plan:
                for y in Y.tolist():
                    got = bought_adj.get(y, ())
                    ext = np.array([v for v in targets.tolist() if v in got], dtype=np.int64)
                    nv = vec + (y,)
                    vectors.append(nv)
                    new_neigh[nv] = ext
            neigh = new_neigh

        if i == 0:
            # Depth 0 is exactly buy-everything inside the random set A.
            final_eligible = lambda us, vs: a_member[us] & a_member[vs]
        else:
            final_codes: set[int] = set()
            for vec in vectors:
                members = neigh[vec].tolist()
                for a, u in enumerate(members):
                    for v in members[a + 1:]:
                        final_codes.add(min(u, v) * ctx.n + max(u, v))
            if not final_codes:
                ctx.flags.add("pruned-all-branches")
                return
            candf = np.fromiter(sorted(final_codes), dtype=np.int64)

            def final_eligible(us, vs, cand=candf):
                c = _pair_codes(ctx.n, us, vs)
                pos = np.searchsorted(cand, c)
                pos[pos >= cand.size] = cand.size - 1
                return cand[pos] == c

        yield PredicateStage("depth-final-intra-neighbourhood", steps_per, cap_per,
                             final_eligible)


# ---------------------------------------------------------------------------
# Concrete family constructors (spec operations)
# ---------------------------------------------------------------------------


def wheel_sparse(k: int, n: int, t: int, b: int, params: ParamSet, universe=None) -> Strategy:
    return TwoStageSparse(("wheel", k), n, t, b, params, universe)


def wheel_dense(k: int, n: int, t: int, b: int, params: ParamSet, universe=None) -> Strategy:
    def factory(U, sim_steps, cap):
        return CycleSubset(k - 1, sim_steps, cap, universe=U)
    return DenseStarThen(("wheel", k), n, t, b, params, factory, min_leaves=k - 1,
                         universe=universe)


def k5_sparse(n: int, t: int, b: int, params: ParamSet, universe=None) -> Strategy:
    return TwoStageSparse(("k5",), n, t, b, params, universe)


def k5_dense(n: int, t: int, b: int, params: ParamSet, universe=None) -> Strategy:
    def factory(U, sim_steps, cap):
        try:
            return _wheel_auto(4, len(U), sim_steps, cap, universe=U)
        except (InfeasibleParametersError, InvalidParameterError):
            return None
    return DenseStarThen(("k5",), n, t, b, params, factory, min_leaves=4, universe=universe)


def k1t_sparse(tree_edges, n: int, t: int, b: int, params: ParamSet, universe=None) -> Strategy:
    m = len(list(tree_edges))
    return TwoStageSparse(("k1t", m), n, t, b, params, universe)


def k1t_dense(tree_edges, n: int, t: int, b: int, params: ParamSet, universe=None) -> Strategy:
    edges = list(tree_edges)
    m = len(edges)

    def factory(U, sim_steps, cap):
        return TreeGreedy(edges, sim_steps, cap, universe=U)
    return DenseStarThen(("k1t", m), n, t, b, params, factory, min_leaves=m + 1,
                         universe=universe)


def cycle_subset(l: int, U, time_budget: int, edge_budget: int) -> Strategy:
    return CycleSubset(l, time_budget, edge_budget, universe=U)


def tree_greedy(tree_edges, U, time_budget: int, edge_budget: int) -> Strategy:
    return TreeGreedy(tree_edges, time_budget, edge_budget, universe=U)


def depth_clique(s: int, i: int, n: int, t: int, b: int, params: ParamSet,
                 universe=None) -> Strategy:
    return DepthClique(s, i, n, t, b, params, universe)


def _wheel_auto(k, n, t, b, *, regime="auto", overrides=None, universe=None) -> Strategy:
    params = choose_params(("wheel", k), n, t, b, regime=regime, overrides=overrides)
    if params.regime == "sparse":
        return wheel_sparse(k, n, t, b, params, universe)
    return wheel_dense(k, n, t, b, params, universe)


def _k5_auto(n, t, b, *, regime="auto", overrides=None, universe=None) -> Strategy:
    params = choose_params(("k5",), n, t, b, regime=regime, overrides=overrides)
    if params.regime == "sparse":
        return k5_sparse(n, t, b, params, universe)
    return k5_dense(n, t, b, params, universe)


def _k1t_auto(tree_edges, n, t, b, *, regime="auto", overrides=None, universe=None) -> Strategy:
    m = len(list(tree_edges))
    params = choose_params(("k1t", m), n, t, b, regime=regime, overrides=overrides)
    if params.regime == "sparse":
        return k1t_sparse(tree_edges, n, t, b, params, universe)
    return k1t_dense(tree_edges, n, t, b, params, universe)


# ---------------------------------------------------------------------------
# Spec-string parsing
# ---------------------------------------------------------------------------


parse_tree_spec = patterns.parse_tree_spec


def _split_overrides(tokens: list[str]):
    plain, over = [], {}
    for tok in tokens:
        if "=" in tok:
            key, val = tok.split("=", 1)
            try:
                over[key] = int(val)
            except ValueError as exc:
                raise InvalidParameterError(f"override {tok!r} is not an integer") from exc
        else:
            plain.append(tok)
    return plain, over


def parse_strategy(spec: str, n: int, t: int, b: int, universe=None) -> Strategy:
    """Build a strategy object from a spec string at scale (n, t, b)."""
    tokens, overrides = _split_overrides([s.strip() for s in spec.split(":") if s.strip()])
    if not tokens:
        raise InvalidParameterError("empty strategy spec")
    head, rest = tokens[0], tokens[1:]

    def regime_of(toks, at):
        return toks[at] if len(toks) > at else "auto"

    if head == "buy-all":
        return BuyAll(universe)
    if head == "buy-none":
        return BuyNone(universe)
    if head == "wheel":
        if not rest or not rest[0].isdigit():
            raise InvalidParameterError("wheel spec needs k, e.g. wheel:4:auto")
        return _wheel_auto(int(rest[0]), n, t, b, regime=regime_of(rest, 1),
                           overrides=overrides, universe=universe)
    if head == "k5":
        return _k5_auto(n, t, b, regime=regime_of(rest, 0), overrides=overrides,
                        universe=universe)
    if head == "k1t":
        if not rest:
            raise InvalidParameterError("k1t spec needs a tree, e.g. k1t:path2:auto")
        tree = parse_tree_spec(rest[0])
        return _k1t_auto(tree, n, t, b, regime=regime_of(rest, 1), overrides=overrides,
                         universe=universe)
    if head == "depth-clique":
        if len(rest) < 2:
            raise InvalidParameterError("depth-clique spec needs s and i, e.g. depth-clique:6:2")
        s, i = int(rest[0]), int(rest[1])
        params = choose_params(("depth-clique", s, i), n, t, b, overrides=overrides)
        return depth_clique(s, i, n, t, b, params, universe)
    if head == "cycle":
        if not rest or not rest[0].isdigit():
            raise InvalidParameterError("cycle spec needs l, e.g. cycle:5")
        _reject_unknown(overrides)
        U = universe if universe is not None else np.arange(n, dtype=np.int64)
        return cycle_subset(int(rest[0]), U, t, b)
    if head == "tree":
        if not rest:
            raise InvalidParameterError("tree spec needs a tree, e.g. tree:star4")
        _reject_unknown(overrides)
        U = universe if universe is not None else np.arange(n, dtype=np.int64)
        return tree_greedy(parse_tree_spec(rest[0]), U, t, b)
    raise InvalidParameterError(f"unknown strategy spec {spec!r}")


def default_strategy_for_family(family_spec: str) -> str:
    """The natural strategy spec for a target family string."""
    tokens = family_spec.split(":")
    head = tokens[0]
    if head == "wheel":
        return f"wheel:{tokens[1]}:auto"
    if head == "clique":
        r = int(tokens[1])
        if r == 3:
            return "k1t:path1:auto"
        if r == 4:
            return "wheel:4:auto"
        if r == 5:
            return "k5:auto"
        return f"depth-clique:{r}:1"
    if head == "cycle":
        return f"cycle:{tokens[1]}"
    if head == "k1t":
        return f"k1t:{tokens[1]}:auto"
    raise InvalidParameterError(f"no default strategy for family {family_spec!r}")
