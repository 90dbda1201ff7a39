"""Fixed-point statistics of Haar-random tree automorphisms.

Exact per-level tables over enumerated quotients, the martingale fiber
check, closed forms for the full automorphism group and for dihedral
towers, and seeded Monte-Carlo estimation.  All probabilities stay exact
rationals until a float is explicitly asked for.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import SourceNotUniform
from .presentation import WreathPresentation
from .quotient import DEFAULT_ELEMENT_BUDGET, FiniteQuotient, enumerate_tower
from .tree import TreeShape, uniform_aut_sample

Z99 = 2.5758293035489004  # two-sided 99% normal quantile


@dataclass
class LevelStats:
    level: int
    order: int
    fixers: int
    proportion: Fraction
    histogram: dict

    def to_json(self):
        return {
            "level": self.level,
            "group_order": self.order,
            "fixers": self.fixers,
            "proportion_num": self.proportion.numerator,
            "proportion_den": self.proportion.denominator,
            "proportion_float": float(self.proportion),
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
        }


@dataclass
class FixedPointTable:
    levels: list
    truncated: bool = False
    note: str = ""

    @property
    def proportions(self):
        return [row.proportion for row in self.levels]

    def to_json(self):
        return {
            "levels": [row.to_json() for row in self.levels],
            "truncated": self.truncated,
            "note": self.note,
        }

    def to_csv_rows(self):
        rows = [["level", "group_order", "fixers", "proportion_num",
                 "proportion_den", "proportion_float"]]
        for r in self.levels:
            rows.append([r.level, r.order, r.fixers, r.proportion.numerator,
                         r.proportion.denominator, float(r.proportion)])
        return rows


def fixed_point_table(pres: WreathPresentation, n_max: int,
                      element_budget: int = DEFAULT_ELEMENT_BUDGET,
                      gen_words=None, tower=None) -> FixedPointTable:
    """Exact counts of elements fixing a vertex, per level.

    The level-n fixer proportion is an upper bound for the fixed-end
    proportion and decreases in n; the table truncates (flagged) when a
    level exceeds the element budget.
    """
    if tower is None:
        tower = enumerate_tower(pres, n_max, element_budget, gen_words,
                                allow_partial=True)
    rows = []
    for q in tower:
        fx = q.fixed_count_vector(q.level)
        values, counts = np.unique(fx, return_counts=True)
        hist = {int(v): int(c) for v, c in zip(values, counts)}
        fixers = int((fx >= 1).sum())
        rows.append(LevelStats(q.level, q.order, fixers,
                               Fraction(fixers, q.order), hist))
    for prev, cur in zip(rows, rows[1:]):
        if cur.proportion > prev.proportion:
            raise AssertionError(
                "fixer proportion increased with level; enumeration is broken"
            )
    truncated = len(tower) < n_max
    note = (f"levels beyond {len(tower)} exceed the element budget {element_budget}"
            if truncated else "")
    return FixedPointTable(rows, truncated, note)


@dataclass
class MartingaleReport:
    level: int
    max_deviation: Fraction
    passed: bool
    failures: list = field(default_factory=list)

    def to_json(self):
        return {
            "level": self.level,
            "max_deviation": [self.max_deviation.numerator,
                              self.max_deviation.denominator],
            "passed": self.passed,
            "failures": self.failures[:20],
        }


def martingale_fiber_check(pres: WreathPresentation, n: int,
                           element_budget: int = DEFAULT_ELEMENT_BUDGET,
                           gen_words=None, tower=None) -> MartingaleReport:
    """Does averaging X_{n+1} over each projection fiber reproduce X_n?

    Exact rational comparison per element of the level-n quotient.
    """
    if tower is None:
        tower = enumerate_tower(pres, n + 1, element_budget, gen_words)
    qn, qtop = tower[n - 1], tower[n]
    x_next = qtop.fixed_count_vector(n + 1).astype(np.int64)
    x_now = qn.fixed_count_vector(n).astype(np.int64)
    fiber_sum = np.bincount(qtop.projection, weights=x_next, minlength=qn.order)
    fiber_size = np.bincount(qtop.projection, minlength=qn.order)
    max_dev = Fraction(0)
    failures = []
    for a in range(qn.order):
        mean = Fraction(int(fiber_sum[a]), int(fiber_size[a]))
        dev = abs(mean - x_now[a])
        if dev > max_dev:
            max_dev = dev
        if dev != 0:
            failures.append({"element": a, "x_n": int(x_now[a]),
                             "fiber_mean": [mean.numerator, mean.denominator]})
    return MartingaleReport(n, max_dev, max_dev == 0, failures)


def expected_fixed_points(q: FiniteQuotient, k: int) -> Fraction:
    """E[X_k] over the quotient; equals 1 exactly for a transitive action."""
    fx = q.fixed_count_vector(k)
    return Fraction(int(fx.sum()), q.order)


# ---------------------------------------------------------------------------
# closed forms


def derangements(n: int):
    out = [1, 0]
    for j in range(2, n + 1):
        out.append((j - 1) * (out[j - 1] + out[j - 2]))
    return out[: n + 1]


def aut_tree_fpp(d: int, n_max: int):
    """P(X_n >= 1) for Haar measure on the full automorphism group,
    levels 0..n_max, exact.

    q_{n+1} = sum_k C(d,k) D_{d-k} q_n^k / d! where q_n is the no-fixed-
    vertex probability; denominators square each level, so keep n_max
    modest (floats: aut_tree_fpp_float).
    """
    if d < 2:
        raise ValueError("degree must be >= 2")
    der = derangements(d)
    fact = math.factorial(d)
    q = Fraction(0)
    ps = [Fraction(1)]
    for _ in range(n_max):
        q = sum(math.comb(d, k) * der[d - k] * q**k for k in range(d + 1)) / Fraction(fact)
        ps.append(1 - q)
    return ps


def aut_tree_fpp_float(d: int, n_max: int):
    """Float variant of aut_tree_fpp for long horizons."""
    der = derangements(d)
    fact = math.factorial(d)
    q = 0.0
    ps = [1.0]
    for _ in range(n_max):
        q = sum(math.comb(d, k) * der[d - k] * q**k for k in range(d + 1)) / fact
        ps.append(1.0 - q)
    return ps


def dihedral_fpp_closed_form(d: int, n: int) -> Fraction:
    """Fixer proportion of the dihedral group of the d^n-cycle: identity
    plus the point-fixing reflections."""
    if d < 2 or n < 1:
        raise ValueError("need d >= 2 and n >= 1")
    cycle = d**n
    reflections_fixing = cycle if d % 2 == 1 else cycle // 2
    return Fraction(1 + reflections_fixing, 2 * cycle)


# ---------------------------------------------------------------------------
# Monte Carlo


@dataclass
class MonteCarloEstimate:
    level: int
    trials: int
    hits: int
    estimate: float
    ci_low: float
    ci_high: float
    seed: int
    warning: str = ""

    def within_ci(self, p) -> bool:
        return self.ci_low <= float(p) <= self.ci_high

    def to_json(self):
        return {
            "level": self.level,
            "trials": self.trials,
            "hits": self.hits,
            "estimate": self.estimate,
            "ci99": [self.ci_low, self.ci_high],
            "seed": self.seed,
            "warning": self.warning,
        }


class AutSampler:
    """Direct Haar sampling from the full automorphism group."""

    def __init__(self, degree: int):
        self.shape = TreeShape(degree)

    def fixes_vertex(self, n: int, rng: random.Random) -> bool:
        return uniform_aut_sample(self.shape, n, rng).fixed_count(n) >= 1


class QuotientSampler:
    """Uniform draws from a fully enumerated quotient."""

    def __init__(self, quotient: FiniteQuotient):
        self.q = quotient
        self._fx = {}

    def fixes_vertex(self, n: int, rng: random.Random) -> bool:
        if n not in self._fx:
            self._fx[n] = self.q.fixed_count_vector(n)
        return bool(self._fx[n][rng.randrange(self.q.order)] >= 1)


class HeuristicWordSampler:
    """Random words of a fixed length: NOT Haar-uniform, estimates carry a
    warning and are for exploration only."""

    warning = "random-word sampling is not Haar-uniform; estimate is biased"

    def __init__(self, pres: WreathPresentation, word_length: int = 20):
        self.pres = pres
        self.word_length = word_length

    def fixes_vertex(self, n: int, rng: random.Random) -> bool:
        letters = [(g, e) for g in self.pres.gen_names for e in (1, -1)]
        word = tuple(rng.choice(letters) for _ in range(self.word_length))
        return self.pres.word_portrait(word, n).fixed_count(n) >= 1


def monte_carlo_fpp(source, n: int, trials: int, seed: int) -> MonteCarloEstimate:
    """Estimate P(X_n >= 1) with a 99% binomial confidence interval.

    ``source`` must be an AutSampler, QuotientSampler or (explicitly)
    HeuristicWordSampler; presentations must be enumerated first so draws
    are uniform.
    """
    if isinstance(source, WreathPresentation):
        raise SourceNotUniform(
            "enumerate the quotient first (random words are not Haar-uniform); "
            "use HeuristicWordSampler explicitly if a biased estimate is wanted"
        )
    if trials <= 0:
        raise ValueError("trials must be positive")
    rng = random.Random(seed)
    hits = sum(1 for _ in range(trials) if source.fixes_vertex(n, rng))
    phat = hits / trials
    half = Z99 * math.sqrt(max(phat * (1 - phat), 1e-12) / trials)
    warning = getattr(source, "warning", "")
    return MonteCarloEstimate(n, trials, hits, phat,
                              max(0.0, phat - half), min(1.0, phat + half),
                              seed, warning)
