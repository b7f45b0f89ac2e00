"""Random graph process generation and budget-constrained trial execution.

A trial streams a uniformly random permutation of all vertex pairs past a
strategy.  Strategies describe themselves as a sequence of *stages* (see the
stage classes below); the engine enforces every time window and edge cap,
applies purchases to the built graph, and detects target containment
incrementally after each purchase.
"""

from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ExhaustedProcessError, InvalidParameterError, StrategyError
from .graphs import Graph
from .patterns import PatternGraph, incremental_contains

_BATCH = 4096
_SMALL_M = 8192          # materialize the whole permutation below this many pairs
_DENSE_N_CAP = 4096      # bool-array bookkeeping up to n*n = 16.7M entries

_PAIR_TABLE_CACHE: dict[int, np.ndarray] = {}


def _all_pairs(n: int) -> np.ndarray:
    """(M, 2) table of the pairs of [n], cached (only used for small n)."""
    table = _PAIR_TABLE_CACHE.get(n)
    if table is None:
        iu, iv = np.triu_indices(n, 1)
        table = np.column_stack((iu, iv))
        if len(_PAIR_TABLE_CACHE) > 64:
            _PAIR_TABLE_CACHE.clear()
        _PAIR_TABLE_CACHE[n] = table
    return table


def pair_count(n: int) -> int:
    return n * (n - 1) // 2


def derive_seed(*parts) -> int:
    """Stable 64-bit seed from any printable parts (master seed, grid point, rep).

    Uses a keyed-less blake2b digest so sweeps are reproducible across runs,
    platforms and worker processes.
    """
    text = "|".join(str(p) for p in parts)
    return int.from_bytes(hashlib.blake2b(text.encode(), digest_size=8).digest(), "big")


class ProcessStream:
    """Lazily generated uniform random permutation of the edges of K_n.

    Deterministic: two streams built with equal ``(n, seed)`` produce the
    same offer sequence.  Offers are generated by batched rejection sampling
    against the set of already-offered pairs; once half the pairs are out,
    the remainder is shuffled explicitly.
    """

    def __init__(self, n: int, seed):
        if n < 2:
            raise InvalidParameterError(f"process needs n >= 2 vertices, got {n}")
        self.n = n
        self.M = pair_count(n)
        self.seed = seed
        self.offered_count = 0
        self._rng = np.random.Generator(np.random.PCG64(seed))
        self._chunks: list[np.ndarray] = []   # (k, 2) arrays, generated order
        self._generated = 0
        self._shuffled_rest = False
        if self.M <= _SMALL_M:
            perm = self._rng.permutation(self.M)
            self._chunks.append(_all_pairs(n)[perm])
            self._generated = self.M
            self._shuffled_rest = True
            self._used = None
        elif n <= _DENSE_N_CAP:
            self._used = np.zeros(n * n, dtype=bool)
        else:
            self._used = set()

    # -- generation --------------------------------------------------------

    def _refill(self):
        if self._shuffled_rest:
            return
        if 2 * self._generated >= self.M:
            self._shuffle_remainder()
            return
        n = self.n
        us = self._rng.integers(0, n, _BATCH)
        vs = self._rng.integers(0, n, _BATCH)
        keep = us != vs
        us, vs = us[keep], vs[keep]
        codes = np.minimum(us, vs) * n + np.maximum(us, vs)
        if isinstance(self._used, set):
            out = []
            used = self._used
            for c in codes.tolist():
                if c not in used:
                    used.add(c)
                    out.append(c)
            fresh = np.array(out, dtype=np.int64)
        else:
            codes = codes[~self._used[codes]]
            _, first = np.unique(codes, return_index=True)
            fresh = codes[np.sort(first)]
            self._used[fresh] = True
        if fresh.size:
            self._chunks.append(np.column_stack((fresh // n, fresh % n)))
            self._generated += fresh.size

    def _shuffle_remainder(self):
        n = self.n
        if isinstance(self._used, set):
            rows = []
            used = self._used
            for u in range(n):
                vs = np.arange(u + 1, n, dtype=np.int64)
                cs = u * n + vs
                keep = np.fromiter((c not in used for c in cs.tolist()), bool, len(cs))
                if keep.any():
                    rows.append(cs[keep])
            rest = np.concatenate(rows) if rows else np.empty(0, np.int64)
        else:
            grid = self._used.reshape(n, n)
            valid = np.triu(np.ones((n, n), dtype=bool), 1) & ~grid
            rest = np.flatnonzero(valid)
        rest = self._rng.permutation(rest)
        if rest.size:
            self._chunks.append(np.column_stack((rest // n, rest % n)))
        self._generated = self.M
        self._shuffled_rest = True
        self._used = None

    # -- consumption -------------------------------------------------------

    def take(self, k: int) -> np.ndarray:
        """Next ``k`` offers as a ``(k, 2)`` array; raises once the stream is dry."""
        if k < 0:
            raise InvalidParameterError(f"cannot take {k} offers")
        if self.offered_count + k > self.M:
            raise ExhaustedProcessError(
                f"requested {k} offers with only {self.M - self.offered_count} remaining"
            )
        while self._generated < self.offered_count + k:
            self._refill()
        out = self._slice(self.offered_count, self.offered_count + k)
        self.offered_count += k
        return out

    def next_offer(self) -> tuple[int, int]:
        """The next offered pair."""
        if self.offered_count >= self.M:
            raise ExhaustedProcessError(f"all {self.M} pairs have been offered")
        row = self.take(1)[0]
        return int(row[0]), int(row[1])

    def _slice(self, lo: int, hi: int) -> np.ndarray:
        if len(self._chunks) > 1:
            self._chunks = [np.concatenate(self._chunks, axis=0)]
        if not self._chunks:
            return np.empty((0, 2), dtype=np.int64)
        return self._chunks[0][lo:hi]

    @property
    def trace(self) -> np.ndarray:
        """Offers consumed so far, in order, as a ``(offered_count, 2)`` array."""
        return self._slice(0, self.offered_count)


def new_process(n: int, seed) -> ProcessStream:
    """Fresh stream over the pairs of an n-vertex set; deterministic given seed."""
    return ProcessStream(n, seed)


def trial_stream(n: int, seed: int) -> ProcessStream:
    """The exact offer stream run_trial(n, ..., seed) consumes.

    Exposed so tests and notebooks can replay a trial's offers independently
    of the engine.
    """
    return ProcessStream(n, np.random.SeedSequence((int(seed), 0)))


def next_offer(stream: ProcessStream) -> tuple[int, int]:
    return stream.next_offer()


# -- subprocess views ------------------------------------------------------


@dataclass(frozen=True)
class SubprocessView:
    """Offers with both endpoints in U during global steps (j, j+t_seg]."""

    U: np.ndarray
    j: int
    t_seg: int
    offers: np.ndarray      # (observed_length, 2), global vertex labels
    steps: np.ndarray       # matching global step numbers (1-based)

    @property
    def observed_length(self) -> int:
        return len(self.offers)


def subprocess_view(stream_trace, U, j: int, t_seg: int) -> SubprocessView:
    """Induced offer subsequence inside U over steps (j, j+t_seg]."""
    if isinstance(stream_trace, ProcessStream):
        if j + t_seg > stream_trace.M:
            raise InvalidParameterError(f"j + t_seg = {j + t_seg} exceeds M = {stream_trace.M}")
        trace = stream_trace.trace
    else:
        trace = np.asarray(stream_trace)
    if j < 0 or t_seg < 0:
        raise InvalidParameterError("j and t_seg must be non-negative")
    if j + t_seg > len(trace):
        raise InvalidParameterError(
            f"trace holds {len(trace)} offers; need j + t_seg = {j + t_seg}"
        )
    U = np.unique(np.asarray(list(U) if not isinstance(U, np.ndarray) else U, dtype=np.int64))
    window = trace[j:j + t_seg]
    if len(U) == 0:
        member = np.zeros(0, dtype=bool)
        mask = np.zeros(len(window), dtype=bool)
    else:
        top = int(max(window.max(initial=0), U.max())) + 1
        member = np.zeros(top, dtype=bool)
        member[U] = True
        mask = member[window[:, 0]] & member[window[:, 1]]
    idx = np.flatnonzero(mask)
    return SubprocessView(U=U, j=j, t_seg=t_seg,
                          offers=window[idx], steps=idx + j + 1)


# -- strategy/engine protocol ----------------------------------------------


class PredicateStage:
    """Buy every offered edge passing a vectorized predicate, within caps."""

    __slots__ = ("label", "steps", "edge_cap", "fn", "accepted")

    def __init__(self, label: str, steps, edge_cap: int,
                 fn: Callable[[np.ndarray, np.ndarray], np.ndarray]):
        self.label = label
        self.steps = steps          # None = rest of the available window
        self.edge_cap = edge_cap
        self.fn = fn
        self.accepted: list[tuple[int, int, int]] = []


class DecideStage:
    """Per-offer sequential decisions (for strategies with evolving state).

    ``fn(u, v)`` must be a pure decision; state updates that assume the
    purchase happened belong in ``on_buy``, which runs only when the engine
    actually records the edge.
    """

    __slots__ = ("label", "steps", "edge_cap", "fn", "on_buy", "accepted")

    def __init__(self, label: str, steps, edge_cap: int, fn: Callable[[int, int], bool],
                 on_buy: Callable[[int, int], None] | None = None):
        self.label = label
        self.steps = steps
        self.edge_cap = edge_cap
        self.fn = fn
        self.on_buy = on_buy
        self.accepted: list[tuple[int, int, int]] = []


class SubprocessStage:
    """Delegate a time window to an inner strategy simulated on a vertex subset.

    Offers outside ``universe`` are discarded; the inner strategy sees at most
    ``sim_steps`` of the remaining offers as its own process and may buy at
    most ``edge_cap`` edges.
    """

    __slots__ = ("label", "steps", "universe", "sim_steps", "edge_cap", "inner", "accepted")

    def __init__(self, label: str, steps, universe, sim_steps: int, edge_cap: int, inner):
        self.label = label
        self.steps = steps
        self.universe = np.asarray(universe, dtype=np.int64)
        self.sim_steps = sim_steps
        self.edge_cap = edge_cap
        self.inner = inner
        self.accepted: list[tuple[int, int, int]] = []


@dataclass
class StageRecord:
    label: str
    depth: int
    steps_allotted: int
    steps_used: int
    edge_cap: int
    edges_bought: int

    def compliant(self) -> bool:
        return self.edges_bought <= self.edge_cap and self.steps_used <= self.steps_allotted


class BuilderContext:
    """Mutable per-trial state shared between the engine and the strategy."""

    def __init__(self, n: int, t: int, b: int, strategy_seed=None):
        self.n = n
        self.t = t
        self.b = b
        self.step = 0                    # last processed global step
        self.built = Graph(n)
        self.purchased = 0
        self.stage_ledger: list[StageRecord] = []
        self.flags: set[str] = set()
        self._strategy_seed = strategy_seed
        self._rng = None

    @property
    def rng(self) -> np.random.Generator:
        """Strategy-side randomness; a separate stream from the offer sequence."""
        if self._rng is None:
            self._rng = np.random.Generator(np.random.PCG64(self._strategy_seed))
        return self._rng


@dataclass(frozen=True)
class TrialResult:
    n: int
    t: int
    b: int
    seed: int
    success: bool
    hit_step: int | None
    budget_used: int
    steps_used: int
    runtime_ms: float
    degraded: bool
    flags: tuple[str, ...]
    stage_ledger: tuple[StageRecord, ...]
    built: Graph


_DEGRADED_FLAGS = {"degraded-run", "infeasible-subroutine", "pruned-all-branches"}


class _TrialDone(Exception):
    pass


class _TrialState:
    __slots__ = ("ctx", "target", "run_to_end", "hit_step")

    def __init__(self, ctx, target, run_to_end):
        self.ctx = ctx
        self.target = target
        self.run_to_end = run_to_end
        self.hit_step = None

    def apply(self, step: int, u: int, v: int):
        ctx = self.ctx
        ctx.built.add_edge(u, v)
        ctx.purchased += 1
        ctx.step = max(ctx.step, step)
        if (self.hit_step is None and self.target is not None
                and ctx.purchased >= self.target.e
                and incremental_contains(ctx.built, self.target, (u, v))):
            self.hit_step = step
            if not self.run_to_end:
                raise _TrialDone


class _StreamSource:
    """Offers from a live stream, limited to the first ``limit`` global steps."""

    def __init__(self, stream: ProcessStream, limit: int):
        self.stream = stream
        self.limit = limit

    def remaining(self) -> int:
        return self.limit - self.stream.offered_count

    def take(self, k: int):
        start = self.stream.offered_count
        rows = self.stream.take(k)
        steps = np.arange(start + 1, start + k + 1, dtype=np.int64)
        return steps, rows[:, 0], rows[:, 1]


class _ArraySource:
    """Offers from a pre-filtered in-memory window (simulated subprocess)."""

    def __init__(self, steps: np.ndarray, us: np.ndarray, vs: np.ndarray):
        self.steps = steps
        self.us = us
        self.vs = vs
        self.pos = 0

    def remaining(self) -> int:
        return len(self.steps) - self.pos

    def take(self, k: int):
        lo, hi = self.pos, self.pos + k
        self.pos = hi
        return self.steps[lo:hi], self.us[lo:hi], self.vs[lo:hi]


def _wrap_strategy_call(fn, step, *args):
    try:
        return fn(*args)
    except (_TrialDone, StrategyError):
        raise
    except Exception as exc:
        raise StrategyError(f"{type(exc).__name__}: {exc}", step=step) from exc


def _run_strategy(state: _TrialState, strategy, source, allowance: int, depth: int,
                  nominal_t: int) -> int:
    """Run a strategy's stages over an offer source; returns edges bought.

    ``nominal_t`` is the time budget the strategy plans with (the delegated
    simulated time for nested runs); the source may hold fewer offers.
    """
    ctx = state.ctx
    next_step = ctx.step + 1
    _wrap_strategy_call(strategy.bind, next_step, ctx, nominal_t, allowance)
    bought_here = 0
    gen = strategy.stages(ctx)
    while True:
        try:
            stage = next(gen)
        except StopIteration:
            break
        except (_TrialDone, StrategyError):
            raise
        except Exception as exc:
            raise StrategyError(f"{type(exc).__name__}: {exc}", step=ctx.step + 1) from exc
        if stage is None:
            continue
        avail = source.remaining()
        if avail <= 0:
            break
        alloted = avail if stage.steps is None else min(int(stage.steps), avail)
        record = StageRecord(label=stage.label, depth=depth,
                             steps_allotted=alloted, steps_used=0,
                             edge_cap=int(stage.edge_cap), edges_bought=0)
        ctx.stage_ledger.append(record)
        if alloted <= 0:
            continue
        slack = min(int(stage.edge_cap), allowance - bought_here)
        if isinstance(stage, SubprocessStage):
            bought = _run_sub_stage(state, stage, source, alloted, slack, record, depth)
        elif isinstance(stage, DecideStage):
            bought = _run_decide_stage(state, stage, source, alloted, slack, record)
        else:
            bought = _run_vector_stage(state, stage, source, alloted, slack, record)
        bought_here += bought
    return bought_here


def _global_slack(ctx) -> int:
    return ctx.b - ctx.purchased


def _apply_accepted(state, stage, record, steps, us, vs):
    """Apply purchases in offer order; on early success the rest never happen.

    Bookkeeping precedes ``apply`` because a successful purchase unwinds the
    trial immediately and must still appear in the ledger.
    """
    for s, u, v in zip(steps.tolist(), us.tolist(), vs.tolist()):
        record.edges_bought += 1
        stage.accepted.append((s, u, v))
        state.apply(s, u, v)


def _run_vector_stage(state, stage, source, alloted, slack, record) -> int:
    ctx = state.ctx
    steps, us, vs = source.take(alloted)
    record.steps_used = len(steps)
    ctx.step = max(ctx.step, int(steps[-1])) if len(steps) else ctx.step
    mask = _wrap_strategy_call(stage.fn, int(steps[0]), us, vs)
    mask = np.asarray(mask, dtype=bool)
    want = np.flatnonzero(mask)
    cap = min(slack, _global_slack(ctx))
    if len(want) > cap:
        # Clip is logged only when a cap other than the stage's own declared
        # one was the binder (an over-accepting strategy hit the hard gate).
        if int(stage.edge_cap) > cap:
            ctx.flags.add("budget-clipped")
        want = want[:cap]
    if len(want) == 0:
        return 0
    before = record.edges_bought
    _apply_accepted(state, stage, record, steps[want], us[want], vs[want])
    return record.edges_bought - before


def _run_decide_stage(state, stage, source, alloted, slack, record) -> int:
    ctx = state.ctx
    bought = 0
    block = 8192
    left = alloted
    while left > 0:
        steps, us, vs = source.take(min(block, left))
        if len(steps) == 0:
            break
        left -= len(steps)
        record.steps_used += len(steps)
        for s, u, v in zip(steps.tolist(), us.tolist(), vs.tolist()):
            ctx.step = max(ctx.step, s)
            if not _wrap_strategy_call(stage.fn, s, u, v):
                continue
            if bought >= slack or _global_slack(ctx) <= 0:
                if int(stage.edge_cap) > bought:
                    ctx.flags.add("budget-clipped")
                continue
            record.edges_bought += 1
            stage.accepted.append((s, u, v))
            bought += 1
            state.apply(s, u, v)
            if stage.on_buy is not None:
                _wrap_strategy_call(stage.on_buy, s, u, v)
    return bought


def _run_sub_stage(state, stage, source, alloted, slack, record, depth) -> int:
    ctx = state.ctx
    steps, us, vs = source.take(alloted)
    record.steps_used = len(steps)
    if len(steps):
        ctx.step = max(ctx.step, int(steps[-1]))
    member = np.zeros(ctx.n, dtype=bool)
    member[stage.universe] = True
    mask = member[us] & member[vs]
    idx = np.flatnonzero(mask)[: max(0, int(stage.sim_steps))]
    sub = _ArraySource(steps[idx], us[idx], vs[idx])
    before = ctx.purchased
    try:
        _run_strategy(state, stage.inner, sub, min(slack, int(stage.edge_cap)),
                      depth + 1, int(stage.sim_steps))
    finally:
        record.edges_bought = ctx.purchased - before
    return record.edges_bought


def run_trial(n: int, t: int, b: int, strategy, target: PatternGraph | None, seed: int,
              *, run_to_end: bool = False) -> TrialResult:
    """One budget-constrained trial; deterministic given all arguments.

    ``strategy`` is a strategy object or a spec string such as
    ``"wheel:4:auto"``.  Success means the target pattern appeared in the
    built graph at or before step t; with ``run_to_end`` the trial keeps
    going after the first hit so the final graph is available for counting.
    """
    if n < 2:
        raise InvalidParameterError(f"need n >= 2, got {n}")
    M = pair_count(n)
    if not (1 <= b <= t <= M):
        raise InvalidParameterError(f"need 1 <= b <= t <= M; got b={b}, t={t}, M={M}")
    seed = int(seed)
    if seed < 0:
        raise InvalidParameterError("seed must be a non-negative integer")
    if isinstance(strategy, str):
        from .strategies import parse_strategy
        strategy = parse_strategy(strategy, n=n, t=t, b=b)
    t0 = time.perf_counter()
    stream = ProcessStream(n, np.random.SeedSequence((seed, 0)))
    ctx = BuilderContext(n, t, b, strategy_seed=np.random.SeedSequence((seed, 1)))
    state = _TrialState(ctx, target, run_to_end)
    try:
        _run_strategy(state, strategy, _StreamSource(stream, t), b, 0, t)
    except _TrialDone:
        pass
    success = state.hit_step is not None
    stopped_early = success and not run_to_end
    runtime_ms = (time.perf_counter() - t0) * 1e3
    return TrialResult(
        n=n, t=t, b=b, seed=seed,
        success=success,
        hit_step=state.hit_step,
        budget_used=ctx.purchased,
        steps_used=state.hit_step if stopped_early else t,
        runtime_ms=runtime_ms,
        degraded=bool(ctx.flags & _DEGRADED_FLAGS),
        flags=tuple(sorted(ctx.flags)),
        stage_ledger=tuple(ctx.stage_ledger),
        built=ctx.built,
    )
