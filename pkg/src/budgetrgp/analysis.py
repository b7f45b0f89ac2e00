"""Closed-form budget bounds, threshold envelopes, and their empirical checks.

All exponents are carried as exact rationals; numbers only appear when a
formula is finally evaluated at a concrete (n, t).  Asymptotic side
conditions can never be *proved* at finite scale, so everything here that
involves omega/o comparisons is reported as a ratio against a configurable
margin and labelled heuristic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .errors import (IncompleteInputError, InvalidParameterError,
                     InvalidPatternError)
from .engine import derive_seed, pair_count, run_trial
from .patterns import PatternGraph, count_labelled


# ---------------------------------------------------------------------------
# Monomials n^a / t^c and envelope expressions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Monomial:
    """The function (n, t) -> n^a / t^c with rational exponents."""

    a: Fraction
    c: Fraction

    def value(self, n: int, t: int) -> float:
        a, c = self.a, self.c
        if a.denominator == 1 and c.denominator == 1:
            return float(Fraction(n ** a.numerator, t ** c.numerator))
        return math.exp(float(a) * math.log(n) - float(c) * math.log(t))

    def exponent_at(self, tau: Fraction) -> Fraction:
        """log_n of the value when t = n^tau."""
        return self.a - self.c * tau

    def __str__(self):
        return f"n^{self.a}/t^{self.c}"


def _mono(a, c) -> Monomial:
    return Monomial(Fraction(a), Fraction(c))


def crossover_of(term1: Monomial, term2: Monomial) -> Fraction:
    """The exponent tau with term1 = term2 at t = n^tau (exact rational)."""
    if term1.c == term2.c:
        raise InvalidParameterError(f"terms {term1} and {term2} never cross")
    return (term1.a - term2.a) / (term1.c - term2.c)


class Envelope:
    """max (or min) of sub-expressions, each a Monomial or an Envelope."""

    def __init__(self, op: str, parts: Sequence):
        assert op in ("max", "min")
        self.op = op
        self.parts = tuple(parts)

    def value(self, n: int, t: int) -> float:
        vals = [p.value(n, t) for p in self.parts]
        return max(vals) if self.op == "max" else min(vals)

    def exponent_at(self, tau: Fraction) -> Fraction:
        exps = [p.exponent_at(tau) for p in self.parts]
        return max(exps) if self.op == "max" else min(exps)

    def monomials(self) -> list[Monomial]:
        out = []
        for p in self.parts:
            out.extend([p] if isinstance(p, Monomial) else p.monomials())
        return out

    def __str__(self):
        return f"{self.op}({', '.join(str(p) for p in self.parts)})"


@dataclass(frozen=True)
class ThresholdFormula:
    """Budget envelopes for one target family.

    ``lower`` bounds the budget below which every strategy fails (order
    terms); ``upper`` is the budget order above which a known strategy
    succeeds (None where no explicit strategy exists).  ``cutoff`` is the
    t-exponent below which no budget suffices at all.
    """

    family: str
    lower: Envelope
    upper: Envelope | None
    cutoff: Fraction

    def t_cutoff(self, n: int) -> float:
        return n ** float(self.cutoff)


def _clique_lower(r: int) -> Envelope:
    return Envelope("max", [
        _mono(r * (r - 2), r * (r - 1) // 2 - 1),
        Monomial(Fraction(2 * (r - 2), 2), Fraction(r - 2, 2)),
    ])


def threshold_formula(family: str) -> ThresholdFormula:
    """Envelope formulas for a family string: wheel:K, clique:R, k1t:M|TREE, k6."""
    tokens = family.replace("(", ":").replace(")", "").split(":")
    head = tokens[0].strip().lower()
    if head == "k6":
        head, tokens = "clique", ["clique", "6"]

    if head == "wheel":
        k = int(tokens[1])
        if k < 4:
            raise InvalidParameterError(f"wheel family needs k >= 4, got {k}")
        env = Envelope("max", [_mono(3 * k - 4, 2 * k - 3), _mono(2, 1)])
        cutoff = Fraction(3, 2) - Fraction(1, 2 * (k - 1))
        return ThresholdFormula(family=f"wheel:{k}", lower=env, upper=env, cutoff=cutoff)

    if head == "k1t":
        token = tokens[1]
        if token.isdigit():
            m = int(token)
        else:
            from .patterns import parse_tree_spec
            m = len(parse_tree_spec(token))
        if m < 1:
            raise InvalidParameterError(f"k1t family needs m >= 1, got {m}")
        env = Envelope("max", [
            _mono(3 * m, 2 * m),
            Monomial(Fraction(2 * m, m + 1), Fraction(m, m + 1)),
        ])
        return ThresholdFormula(family=f"k1t:{m}", lower=env, upper=env,
                                cutoff=Fraction(3 * m, 2 * m + 1))

    if head == "clique":
        r = int(tokens[1])
        if r < 3:
            raise InvalidParameterError(f"clique family needs r >= 3, got {r}")
        lower = _clique_lower(r)
        cutoff = Fraction(2) - Fraction(2, r - 1)
        if r == 3:
            upper = lower
        elif r == 4:
            upper = Envelope("max", [_mono(8, 5), _mono(2, 1)])
        elif r == 5:
            upper = Envelope("max", [_mono(12, 7), Monomial(Fraction(10, 3), Fraction(5, 3))])
        elif r == 6:
            upper = Envelope("min", [
                _mono(8, 4),
                Envelope("max", [_mono(21, 12), _mono(16, 9),
                                 Monomial(Fraction(14, 3), Fraction(7, 3))]),
            ])
        else:
            upper = None
        return ThresholdFormula(family=f"clique:{r}", lower=lower, upper=upper, cutoff=cutoff)

    raise InvalidParameterError(f"unknown threshold family {family!r}")


def threshold(family: str, n: int, t: int) -> dict:
    """Evaluate the family's envelopes at (n, t)."""
    if n < 2 or not (1 <= t <= pair_count(n)):
        raise InvalidParameterError(f"need n >= 2 and 1 <= t <= M; got n={n}, t={t}")
    formula = threshold_formula(family)
    upper = formula.upper.value(n, t) if formula.upper is not None else None
    return {
        "family": formula.family,
        "lower": formula.lower.value(n, t),
        "upper": upper,
        "t_cutoff": formula.t_cutoff(n),
        "cutoff_ok": t >= formula.t_cutoff(n) * (1 - 1e-12),
    }


# ---------------------------------------------------------------------------
# Copy-count bound and first-moment expectations
# ---------------------------------------------------------------------------


def copy_count_bound(F: PatternGraph, n: int, t: int, b: int,
                     eta: float | None = None) -> float:
    """Upper bound eta * b * min(b, np)^(v-2) * p^(e-v+1) on built copies of F.

    The rational core is exact; ``eta`` (default ln n) scales it at the end.
    Requires F connected with at least two vertices.
    """
    if F.v < 2 or not F.is_connected():
        raise InvalidPatternError(
            f"the copy-count bound needs a connected pattern with v >= 2, got {F.family_tag}")
    M = pair_count(n)
    if not (1 <= b <= t <= M):
        raise InvalidParameterError(f"need 1 <= b <= t <= M; got b={b}, t={t}, M={M}")
    if eta is None:
        eta = math.log(n)
    p = Fraction(t, M)
    core = Fraction(b) * min(Fraction(b), n * p) ** (F.v - 2) * p ** (F.e - F.v + 1)
    return float(eta) * float(core)


def expected_copies_gt(F: PatternGraph, n: int, t: int) -> float:
    """Expected unlabelled copies of F in the unrestricted process at step t,
    in the standard density heuristic: (n)_v * p^e / aut with p = t/M.

    This is the first-moment quantity the threshold cutoffs come from.  For
    the exact expectation under the uniform t-edge model (what a simulated
    process actually produces) see :func:`expected_copies_process`; the two
    agree up to a (1 + O(e^2/t)) factor.
    """
    M = pair_count(n)
    if not (0 <= t <= M):
        raise InvalidParameterError(f"need 0 <= t <= M; got t={t}")
    if F.v > n:
        return 0.0
    p = Fraction(t, M)
    return float(Fraction(_falling(n, F.v)) * p ** F.e / F.aut)


def expected_copies_process(F: PatternGraph, n: int, t: int) -> float:
    """Exact expected unlabelled copies of F in the uniform t-edge graph:
    (n)_v / aut * (t)_e / (M)_e."""
    M = pair_count(n)
    if not (0 <= t <= M):
        raise InvalidParameterError(f"need 0 <= t <= M; got t={t}")
    if F.v > n or F.e > t:
        return 0.0
    return float(Fraction(_falling(n, F.v) * _falling(t, F.e),
                          F.aut * _falling(M, F.e)))


def _falling(x: int, k: int) -> int:
    out = 1
    for i in range(k):
        out *= x - i
    return out


def k_edge_subgraphs(F: PatternGraph, k: int) -> list[frozenset]:
    """All k-edge subsets of F's edges (their graphs have no isolated vertices)."""
    if not (0 <= k <= F.e):
        raise InvalidParameterError(f"need 0 <= k <= e(F)={F.e}; got k={k}")
    return [frozenset(sub) for sub in combinations(F.edges, k)]


def containment_probability_bound(F: PatternGraph, k: int, f_values, p_tilde: float,
                                  n: int, t: int, b: int) -> float:
    """Containment-probability diagnostic from per-subgraph copy-count caps.

    Evaluates, with unit implied constants, the sum of
    f(H) * n^(v(F)-v(H)) * p^(e(F)-k) over the k-edge subgraphs H of F plus
    the p_tilde tail.  ``f_values`` maps each required H (a frozenset of
    edges) to a count cap holding except with probability p_tilde, or is a
    callable doing the same.  The empty subgraph (k = 0) defaults to 1.
    This is an up-to-constants diagnostic, not a certified probability.
    """
    if not (0 < p_tilde <= 1):
        raise InvalidParameterError(f"p_tilde must be in (0, 1], got {p_tilde}")
    M = pair_count(n)
    if not (1 <= b <= t <= M):
        raise InvalidParameterError(f"need 1 <= b <= t <= M; got b={b}, t={t}, M={M}")
    p = t / M
    total = 0.0
    for H in k_edge_subgraphs(F, k):
        if callable(f_values):
            f_h = float(f_values(H))
        elif H in f_values:
            f_h = float(f_values[H])
        elif not H:
            f_h = 1.0
        else:
            edges = sorted(tuple(e) for e in H)
            raise IncompleteInputError(f"missing f_value for subgraph with edges {edges}")
        v_h = len({x for e in H for x in e})
        total += f_h * n ** (F.v - v_h) * p ** (F.e - k)
    return total + float(p_tilde)


# ---------------------------------------------------------------------------
# Empirical soundness of the copy-count bound
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundReport:
    """How observed end-of-trial copy counts compare to the evaluated bound."""

    strategy: str
    pattern: str
    n: int
    t: int
    b: int
    eta: float
    bound: float
    trials: int
    empirical_max: int
    exceed_count: int

    @property
    def sound_fraction(self) -> float:
        return 1.0 - self.exceed_count / self.trials


def nc_soundness_report(strategy_spec: str, patterns_list: Iterable[PatternGraph],
                        n: int, t: int, b: int, reps: int, master_seed: int,
                        eta: float | None = None,
                        ledger_sink: list | None = None) -> list[BoundReport]:
    """Run trials to completion and compare labelled counts to the bound.

    ``ledger_sink``, when given, collects every non-compliant stage record
    encountered (there should be none; the engine enforces the caps).
    """
    patterns_list = list(patterns_list)
    eta_val = math.log(n) if eta is None else eta
    bounds = [copy_count_bound(F, n, t, b, eta_val) for F in patterns_list]
    maxima = [0] * len(patterns_list)
    exceed = [0] * len(patterns_list)
    for rep in range(reps):
        seed = derive_seed(master_seed, n, t, b, strategy_spec, rep)
        res = run_trial(n, t, b, strategy_spec, None, seed, run_to_end=True)
        if ledger_sink is not None:
            ledger_sink.extend((strategy_spec, seed, rec)
                               for rec in res.stage_ledger if not rec.compliant())
        for i, F in enumerate(patterns_list):
            cnt = count_labelled(res.built, F)
            maxima[i] = max(maxima[i], cnt)
            if cnt > bounds[i]:
                exceed[i] += 1
    return [
        BoundReport(strategy=strategy_spec, pattern=F.family_tag, n=n, t=t, b=b,
                    eta=eta_val, bound=bounds[i], trials=reps,
                    empirical_max=maxima[i], exceed_count=exceed[i])
        for i, F in enumerate(patterns_list)
    ]
