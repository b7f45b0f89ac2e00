"""Sweep machinery, CSV persistence, self-check suites.

The CSV schema is fixed:
    n,t,b,family,strategy,seed,success,hit_step,budget_used,degraded,runtime_ms
with success in {0,1} and hit_step empty on failure.  Rows are sorted by
(t, b, seed) so identical configurations diff cleanly; runtime_ms is wall
clock and is the one column exempt from byte-for-byte reproducibility.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.stats import chi2 as _chi2

from . import analysis
from .engine import ProcessStream, derive_seed, pair_count, run_trial, subprocess_view
from .errors import InvalidParameterError
from .graphs import Graph
from .patterns import (PatternGraph, contains, count_labelled,
                       incremental_contains, load_pattern_json, make_clique,
                       make_cycle, make_k1t, make_wheel, parse_tree_spec)
from .strategies import default_strategy_for_family

CSV_COLUMNS = ("n", "t", "b", "family", "strategy", "seed", "success", "hit_step",
               "budget_used", "degraded", "runtime_ms")

_Z95 = 1.959963984540054


def wilson_interval(successes: int, trials: int, z: float = _Z95) -> tuple[float, float]:
    """Wilson score interval; exact 0 lower bound at 0/R and 1 upper at R/R."""
    if trials <= 0:
        raise InvalidParameterError("wilson interval needs at least one trial")
    phat = successes / trials
    denom = trials + z * z
    centre = (successes + z * z / 2) / denom
    half = z * math.sqrt(successes * (trials - successes) / trials + z * z / 4) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


# ---------------------------------------------------------------------------
# Target families
# ---------------------------------------------------------------------------


def pattern_for_family(family: str) -> PatternGraph:
    """Target pattern for a family string: wheel:K, clique:R, cycle:L,
    k1t:TREE, or custom:PATH.json.

    Cached: callers must treat the returned pattern as read-only.
    """
    cached = _PATTERN_CACHE.get(family)
    if cached is None:
        cached = _build_pattern(family)
        if len(_PATTERN_CACHE) > 128:
            _PATTERN_CACHE.clear()
        _PATTERN_CACHE[family] = cached
    return cached


_PATTERN_CACHE: dict[str, PatternGraph] = {}


def _build_pattern(family: str) -> PatternGraph:
    tokens = family.split(":")
    head = tokens[0].strip().lower()
    if head == "wheel":
        return make_wheel(int(tokens[1]))
    if head == "clique":
        return make_clique(int(tokens[1]))
    if head == "cycle":
        return make_cycle(int(tokens[1]))
    if head == "k1t":
        return make_k1t(parse_tree_spec(tokens[1]))
    if head == "custom":
        return load_pattern_json(":".join(tokens[1:]))
    raise InvalidParameterError(f"unknown target family {family!r}")


def parse_t_grid(spec: str, n: int) -> list[int]:
    """t grid: comma list of INT | n^EXP | logn:LO:HI:NUM (log_n spaced)."""
    M = pair_count(n)
    values: list[int] = []
    for item in spec.split(","):
        item = item.strip()
        if not item:
            continue
        if item.startswith("logn:"):
            _, lo, hi, num = item.split(":")
            for e in np.linspace(float(lo), float(hi), int(num)):
                values.append(math.ceil(n ** e))
        elif item.startswith("n^"):
            values.append(math.ceil(n ** float(item[2:])))
        else:
            values.append(int(item))
    values = sorted({min(max(v, 1), M) for v in values})
    if not values:
        raise InvalidParameterError(f"empty t grid from {spec!r}")
    return values


def parse_b_grid(spec: str, family: str, n: int, t: int) -> list[int]:
    """b grid at one (n, t): comma list of INT | thr*FLOAT.

    ``thr`` is the family's upper-envelope budget (lower envelope when no
    explicit strategy bound exists), so grids track the formulas across n.
    """
    thr = None
    values: list[int] = []
    for item in spec.split(","):
        item = item.strip()
        if not item:
            continue
        if item.startswith("thr*"):
            if thr is None:
                info = analysis.threshold(_threshold_family(family), n, t)
                thr = info["upper"] if info["upper"] is not None else info["lower"]
            values.append(max(1, round(thr * float(item[4:]))))
        else:
            values.append(int(item))
    values = sorted({min(max(v, 1), t) for v in values})
    if not values:
        raise InvalidParameterError(f"empty b grid from {spec!r}")
    return values


def _threshold_family(family: str) -> str:
    """Map a target family to its threshold-formula family."""
    tokens = family.split(":")
    head = tokens[0].strip().lower()
    if head == "k1t" and len(tokens) > 1 and not tokens[1].isdigit():
        return f"k1t:{len(parse_tree_spec(tokens[1]))}"
    if head == "cycle":
        raise InvalidParameterError("no built-in threshold formula for plain cycles")
    return family


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------


@dataclass
class SweepConfig:
    n: int
    family: str
    t_grid: list[int]
    b_grid_spec: str
    strategy: str = "auto"
    reps: int = 100
    master_seed: int = 0
    jobs: int = 1
    out: str | None = None
    run_to_end: bool = False

    def resolved_strategy(self) -> str:
        if self.strategy == "auto":
            return default_strategy_for_family(self.family)
        return self.strategy


def _trial_row(args) -> dict:
    n, t, b, family, strategy, seed, run_to_end = args
    target = pattern_for_family(family)
    res = run_trial(n, t, b, strategy, target, seed, run_to_end=run_to_end)
    return {
        "n": n, "t": t, "b": b, "family": family, "strategy": strategy,
        "seed": seed, "success": int(res.success),
        "hit_step": "" if res.hit_step is None else res.hit_step,
        "budget_used": res.budget_used, "degraded": int(res.degraded),
        "runtime_ms": round(res.runtime_ms, 3),
    }


def run_sweep(config: SweepConfig) -> tuple[list[dict], list[dict]]:
    """All trial rows (sorted by t, b, seed) plus per-point Wilson summaries."""
    if config.reps < 1:
        raise InvalidParameterError("reps must be >= 1")
    if config.out:
        # fail on an unwritable output path before any trial runs
        with open(config.out, "a"):
            pass
    strategy = config.resolved_strategy()
    tasks = []
    for t in config.t_grid:
        for b in parse_b_grid(config.b_grid_spec, config.family, config.n, t):
            for rep in range(config.reps):
                seed = derive_seed(config.master_seed, t, b, rep)
                tasks.append((config.n, t, b, config.family, strategy, seed,
                              config.run_to_end))
    if config.jobs > 1:
        chunk = max(16, len(tasks) // (config.jobs * 16))
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            rows = list(pool.map(_trial_row, tasks, chunksize=chunk))
    else:
        rows = [_trial_row(task) for task in tasks]
    rows.sort(key=lambda r: (r["t"], r["b"], r["seed"]))
    summary = summarize_rows(rows)
    if config.out:
        write_rows_csv(config.out, rows)
    return rows, summary


def summarize_rows(rows: list[dict]) -> list[dict]:
    """Success rates with 95% Wilson intervals per (n, t, b) grid point."""
    out = []
    keyfn = lambda r: (r["n"], r["t"], r["b"])
    for (n, t, b), group in itertools.groupby(sorted(rows, key=keyfn), key=keyfn):
        group = list(group)
        wins = sum(int(r["success"]) for r in group)
        lo, hi = wilson_interval(wins, len(group))
        out.append({"n": n, "t": t, "b": b, "trials": len(group), "successes": wins,
                    "rate": wins / len(group), "wilson_lo": lo, "wilson_hi": hi})
    return out


def write_rows_csv(path: str, rows: list[dict]):
    """Write the fixed-schema CSV atomically (temp file + rename)."""
    text = rows_to_csv(rows)
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".csv.part")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({col: row[col] for col in CSV_COLUMNS})
    return buf.getvalue()


def read_rows_csv(path: str) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


# ---------------------------------------------------------------------------
# Threshold tables
# ---------------------------------------------------------------------------


def threshold_table(family: str, n: int, t_grid: list[int]) -> list[dict]:
    rows = []
    for t in t_grid:
        info = analysis.threshold(_threshold_family(family), n, t)
        rows.append({
            "family": family, "n": n, "t": t,
            "lower": repr(info["lower"]),
            "upper": "" if info["upper"] is None else repr(info["upper"]),
            "cutoff_ok": int(info["cutoff_ok"]),
        })
    return rows


def write_threshold_csv(path: str, rows: list[dict]):
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".csv.part")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=("family", "n", "t", "lower",
                                                    "upper", "cutoff_ok"),
                                    lineterminator="\n")
            writer.writeheader()
            writer.writerows(rows)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------------------
# Self-check oracle suites
# ---------------------------------------------------------------------------


@dataclass
class SuiteResult:
    name: str
    passed: bool
    detail: str


def exhaustive_count_labelled(host: Graph, pattern: PatternGraph) -> int:
    """Independent counting oracle: enumerate every injective vertex map."""
    if pattern.v > host.n:
        return 0
    edges = pattern.edges
    total = 0
    for images in itertools.permutations(range(host.n), pattern.v):
        ok = True
        for a, b in edges:
            if not host.has_edge(images[a], images[b]):
                ok = False
                break
        total += ok
    return total


def random_host(rng: np.random.Generator, n_min=4, n_max=8) -> Graph:
    n = int(rng.integers(n_min, n_max + 1))
    p = float(rng.uniform(0.25, 0.75))
    g = Graph(n)
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                g.add_edge(u, v)
    return g


def oracle_pattern_set() -> list[PatternGraph]:
    return [make_clique(3), make_clique(4), make_cycle(4), make_cycle(5),
            make_wheel(4), make_wheel(5), make_k1t(parse_tree_spec("path2"))]


def suite_counting(num_hosts: int = 200, seed: int = 2024) -> SuiteResult:
    """count_labelled against exhaustive injective-map enumeration."""
    rng = np.random.default_rng(seed)
    pats = oracle_pattern_set()
    checked = 0
    for _ in range(num_hosts):
        host = random_host(rng)
        for pat in pats:
            fast = count_labelled(host, pat)
            slow = exhaustive_count_labelled(host, pat)
            if fast != slow:
                return SuiteResult("counting", False,
                                   f"mismatch on {pat.family_tag}: fast={fast} oracle={slow}")
            checked += 1
    return SuiteResult("counting", True, f"{checked} host/pattern counts matched")


def suite_incremental(num_sequences: int = 100, seed: int = 2025) -> SuiteResult:
    """Per-insertion detection equals from-scratch containment at every step."""
    rng = np.random.default_rng(seed)
    pats = [make_clique(3), make_cycle(4), make_wheel(4)]
    for snum in range(num_sequences):
        pat = pats[snum % len(pats)]
        n = 10
        order = rng.permutation(pair_count(n))
        iu, iv = np.triu_indices(n, 1)
        host = Graph(n)
        seen = False
        for idx in order[: int(rng.integers(12, 30))]:
            u, v = int(iu[idx]), int(iv[idx])
            host.add_edge(u, v)
            if not seen:
                inc = incremental_contains(host, pat, (u, v))
                scratch = contains(host, pat)
                if inc != scratch:
                    return SuiteResult("incremental", False,
                                       f"divergence on {pat.family_tag} seq {snum}")
                seen = scratch
    return SuiteResult("incremental", True, f"{num_sequences} insertion sequences agreed")


def suite_uniformity(reps: int = 100_000, seed: int = 2026) -> SuiteResult:
    """First offers at n=4 uniform over the 6 pairs (chi-square, 99% level)."""
    counts = np.zeros(6, dtype=np.int64)
    for s in range(reps):
        stream = ProcessStream(4, np.random.SeedSequence((derive_seed(seed, s), 0)))
        u, v = stream.next_offer()
        counts[{(0, 1): 0, (0, 2): 1, (0, 3): 2, (1, 2): 3, (1, 3): 4, (2, 3): 5}[(u, v)]] += 1
    expected = reps / 6
    stat = float(((counts - expected) ** 2 / expected).sum())
    crit = float(_chi2.ppf(0.99, df=5))
    ok = stat < crit
    return SuiteResult("uniformity", ok,
                       f"chi2={stat:.2f} vs crit(0.99, df=5)={crit:.2f}, counts={counts.tolist()}")


def suite_concentration(runs: int = 200, seed: int = 2027) -> SuiteResult:
    """Induced subprocess length at the fixed desk instance.

    n=2000, first 60 neighbours of a vertex within t1=2e5 steps, then count
    offers inside them over the next t2=1e6 steps; the length must land in
    [450, 1350] in at least 95% of runs.  At these parameters the expected
    length is ~885 with standard deviation ~30, so failures are vanishingly
    rare and 95% leaves wide margin.
    """
    n, n_tilde, t1, t2 = 2000, 60, 200_000, 1_000_000
    lo, hi = 450, 1350
    inside = 0
    lengths = []
    for s in range(runs):
        stream = ProcessStream(n, np.random.SeedSequence((derive_seed(seed, s), 0)))
        offers = stream.take(t1 + t2)
        head = offers[:t1]
        incident = np.flatnonzero((head[:, 0] == 0) | (head[:, 1] == 0))
        nbrs = np.where(head[incident, 0] == 0, head[incident, 1], head[incident, 0])
        if len(nbrs) < n_tilde:
            continue
        view = subprocess_view(offers, nbrs[:n_tilde], t1, t2)
        lengths.append(view.observed_length)
        inside += lo <= view.observed_length <= hi
    frac = inside / runs
    ok = frac >= 0.95
    mean_len = float(np.mean(lengths)) if lengths else float("nan")
    return SuiteResult("concentration", ok,
                       f"{inside}/{runs} runs in [{lo},{hi}] (mean length {mean_len:.0f})")


def run_selfcheck(quick: bool = False) -> list[SuiteResult]:
    if quick:
        return [suite_counting(40), suite_incremental(30),
                suite_uniformity(20_000), suite_concentration(40)]
    return [suite_counting(), suite_incremental(), suite_uniformity(),
            suite_concentration()]
