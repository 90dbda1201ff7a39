"""Structural certificates for self-similar groups.

Fractality, super strong fractality, the mixing certificate, the K_G
diagnostic and the commutator-trick witness search.  Everything that only
needs subgroup images runs on stabilizer chains, so it scales past the
element-enumeration budget; the exact-counting identity (pseudomixing)
stays on enumerated quotients.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm

import numpy as np

from .chain import (
    StabilizerChain,
    closure_of_perms,
    domain_offsets,
    level_prefix_size,
    section_images,
    vertex_domain_gens,
)
from .errors import BudgetExceeded, UnknownGenerator
from .presentation import WreathPresentation, invert_word, reduce_word
from .quotient import DEFAULT_ELEMENT_BUDGET, enumerate_tower
from .tree import vertex_rank


def format_vertex(v) -> str:
    if not v:
        return "-"
    if max(v) <= 9:
        return "".join(str(x) for x in v)
    return ".".join(str(x) for x in v)


def _level_vertices(degree, level):
    def words(k):
        if k == 0:
            yield ()
            return
        for w in words(k - 1):
            for x in range(1, degree + 1):
                yield w + (x,)

    return list(words(level))


def _quotient_element_set(pres, m, budget, gen_words=None):
    q = enumerate_tower(pres, m, budget, gen_words)[-1]
    return {tuple(int(x) for x in row) for row in q.images}, q


def _image_of_subgroup(gens, degree, depth, v, m, budget=10**6):
    """The set of depth-m truncated sections at v of <gens> (all fixing v)."""
    rows = [
        section_images(g, degree, depth, len(v), vertex_rank(degree, v), m)
        for g in gens
    ]
    return closure_of_perms(rows, budget=budget)


def _group_level_transitive(chain, degree, depth, level) -> bool:
    offs = domain_offsets(degree, depth)
    first = offs[level - 1]
    orbit = chain.orbit_of(first)
    return sum(1 for p in orbit if offs[level - 1] <= p < offs[level]) == degree**level


# ---------------------------------------------------------------------------
# fractality


@dataclass
class FractalReport:
    level_bound: int
    section_depth: int
    level_transitive: dict
    vertex_ok: dict = field(default_factory=dict)
    failing_vertex: str | None = None
    passed: bool = False

    def to_json(self):
        return {
            "level_bound": self.level_bound,
            "section_depth": self.section_depth,
            "level_transitive": {str(k): v for k, v in self.level_transitive.items()},
            "vertex_ok": self.vertex_ok,
            "failing_vertex": self.failing_vertex,
            "passed": self.passed,
        }


def check_fractal(pres: WreathPresentation, level_bound: int, m: int,
                  element_budget: int = DEFAULT_ELEMENT_BUDGET,
                  gen_words=None) -> FractalReport:
    """Level-transitivity plus surjectivity of every vertex projection:
    the depth-m sections of the stabilizer of each v with |v| <= level_bound
    must exhaust the level-m quotient."""
    if gen_words is None:
        gen_words = [pres.generator_word(g) for g in pres.gen_names]
    d = pres.degree
    target, _ = _quotient_element_set(pres, m, element_budget, gen_words)
    report = FractalReport(level_bound, m, {})

    depth = level_bound + m
    npts, gens = vertex_domain_gens(pres, gen_words, depth)
    whole = StabilizerChain(npts, gens)
    for lvl in range(1, depth + 1):
        report.level_transitive[lvl] = _group_level_transitive(whole, d, depth, lvl)

    offs = domain_offsets(d, depth)
    for k in range(1, level_bound + 1):
        for v in _level_vertices(d, k):
            point = offs[k - 1] + vertex_rank(d, v)
            ch = StabilizerChain(npts, gens, base_order=[point])
            stab = ch.prefix_stabilizer_gens(1)
            image = _image_of_subgroup(stab, d, depth, v, m)
            ok = image == target
            report.vertex_ok[format_vertex(v)] = ok
            if not ok and report.failing_vertex is None:
                report.failing_vertex = format_vertex(v)

    report.passed = all(report.level_transitive.values()) and all(
        report.vertex_ok.values()
    )
    return report


def check_super_strongly_fractal(pres: WreathPresentation, level_bound: int, m: int,
                                 element_budget: int = DEFAULT_ELEMENT_BUDGET,
                                 gen_words=None) -> FractalReport:
    """Sections of the level-n stabilizer at each level-n vertex must give
    the full level-m quotient, for every n <= level_bound."""
    if gen_words is None:
        gen_words = [pres.generator_word(g) for g in pres.gen_names]
    d = pres.degree
    target, _ = _quotient_element_set(pres, m, element_budget, gen_words)
    report = FractalReport(level_bound, m, {})
    for n in range(1, level_bound + 1):
        depth = n + m
        npts, gens = vertex_domain_gens(pres, gen_words, depth)
        ch = StabilizerChain(npts, gens)
        for lvl in range(1, depth + 1):
            report.level_transitive.setdefault(
                lvl, _group_level_transitive(ch, d, depth, lvl)
            )
        stab = ch.prefix_stabilizer_gens(level_prefix_size(d, n))
        for v in _level_vertices(d, n):
            image = _image_of_subgroup(stab, d, depth, v, m)
            ok = image == target
            report.vertex_ok[format_vertex(v)] = ok
            if not ok and report.failing_vertex is None:
                report.failing_vertex = format_vertex(v)
    report.passed = all(report.level_transitive.values()) and all(
        report.vertex_ok.values()
    )
    return report


# ---------------------------------------------------------------------------
# mixing certificate


@dataclass
class MixingCertificate:
    n: int
    m: int
    delay: int
    subtree_transitive: dict = field(default_factory=dict)
    vertex_ok: dict = field(default_factory=dict)
    verified_at: list = field(default_factory=list)
    passed: bool = False
    scope_note: str = (
        "certificate covers |v| = n+N exactly; deeper levels are not checked"
    )

    def to_json(self):
        return {
            "n": self.n,
            "m": self.m,
            "delay": self.delay,
            "subtree_transitive": {str(k): v for k, v in self.subtree_transitive.items()},
            "vertex_ok": self.vertex_ok,
            "verified_at": self.verified_at,
            "passed": self.passed,
            "scope_note": self.scope_note,
        }


def check_mixing_certificate(pres: WreathPresentation, n: int, m: int, delay: int,
                             element_budget: int = DEFAULT_ELEMENT_BUDGET,
                             gen_words=None) -> MixingCertificate:
    """Finite mixing certificate at (n, m, N).

    Condition (i): each level-k stabilizer, k <= n+N, acts transitively on
    every level of every subtree rooted at level k (to the computable
    depth).  Condition (ii): sections at level n+N of the level-n
    stabilizer give the whole level-m quotient.  Verified on stabilizer
    chains; vertices in one group orbit share their verdict by conjugating
    the stabilizer, so only orbit representatives are checked directly.
    """
    if gen_words is None:
        gen_words = [pres.generator_word(g) for g in pres.gen_names]
    d = pres.degree
    L = n + delay
    depth = L + m
    cert = MixingCertificate(n, m, delay)

    target, _ = _quotient_element_set(pres, m, element_budget, gen_words)
    npts, gens = vertex_domain_gens(pres, gen_words, depth)
    whole = StabilizerChain(npts, gens)
    offs = domain_offsets(d, depth)

    # condition (i): St(k) transitive below each level-k vertex
    for k in range(1, L + 1):
        stab = whole.prefix_stabilizer_gens(level_prefix_size(d, k))
        ok = True
        for j in range(1, depth - k + 1):
            block = d**j
            for u_rank in range(d**k):
                start = offs[k + j - 1] + u_rank * block
                orbit = whole.orbit_of(start, gens=stab)
                if sum(1 for p in orbit if start <= p < start + block) != block:
                    ok = False
                    break
            if not ok:
                break
        cert.subtree_transitive[k] = ok

    # condition (ii): sections of St(n) at each level-L vertex
    level_vs = _level_vertices(d, L)
    transitive_L = _group_level_transitive(whole, d, depth, L)
    reps = [level_vs[0]] if transitive_L else level_vs
    rep_verdicts = {}
    for v in reps:
        point = offs[L - 1] + vertex_rank(d, v)
        base = list(dict.fromkeys(list(range(level_prefix_size(d, n))) + [point]))
        ch = StabilizerChain(npts, gens, base_order=base)
        stab = ch.prefix_stabilizer_gens(len(base))
        image = _image_of_subgroup(stab, d, depth, v, m)
        rep_verdicts[v] = image == target
        cert.verified_at.append(format_vertex(v))
    for v in level_vs:
        # in one orbit the stabilizers are conjugate, so verdicts transfer
        verdict = rep_verdicts[reps[0]] if transitive_L else rep_verdicts[v]
        cert.vertex_ok[format_vertex(v)] = verdict

    cert.passed = all(cert.subtree_transitive.values()) and all(
        cert.vertex_ok.values()
    )
    return cert


# ---------------------------------------------------------------------------
# K_G diagnostic


@dataclass
class KgReport:
    path_depth: int
    section_depth: int
    subgroup_ids: list
    quotient_order: int
    index: int
    per_depth_orders: list

    def to_json(self):
        return {
            "path_depth": self.path_depth,
            "section_depth": self.section_depth,
            "subgroup_order": len(self.subgroup_ids),
            "quotient_order": self.quotient_order,
            "index": self.index,
            "per_depth_orders": self.per_depth_orders,
            "subgroup_ids": self.subgroup_ids,
        }


def kg_depth(pres: WreathPresentation, path_depth: int, m: int,
             element_budget: int = DEFAULT_ELEMENT_BUDGET,
             gen_words=None) -> KgReport:
    """Decreasing intersection of St(j) section images along 1, 11, 111...

    Over-approximates the level-m shadow of K_G; always a subgroup of the
    level-m quotient.
    """
    if gen_words is None:
        gen_words = [pres.generator_word(g) for g in pres.gen_names]
    d = pres.degree
    target, q_m = _quotient_element_set(pres, m, element_budget, gen_words)
    current = target
    sizes = []
    for j in range(1, path_depth + 1):
        depth = j + m
        npts, gens = vertex_domain_gens(pres, gen_words, depth)
        ch = StabilizerChain(npts, gens)
        stab = ch.prefix_stabilizer_gens(level_prefix_size(d, j))
        v = (1,) * j
        image = _image_of_subgroup(stab, d, depth, v, m)
        current = current & image
        sizes.append(len(current))
    ids = sorted(q_m.id_of_images(np.asarray(row)) for row in current)
    return KgReport(path_depth, m, ids, q_m.order, q_m.order // max(len(ids), 1), sizes)


# ---------------------------------------------------------------------------
# pseudomixing counting identity


@dataclass
class PseudomixingReport:
    n: int
    m: int
    u: tuple
    w: tuple
    group_order: int
    expected: Fraction
    counts: dict
    max_deviation: Fraction
    level_transitive: bool
    exact: bool

    def to_json(self):
        return {
            "n": self.n,
            "m": self.m,
            "u": format_vertex(self.u),
            "w": format_vertex(self.w),
            "group_order": self.group_order,
            "expected_per_pair": [self.expected.numerator, self.expected.denominator],
            "max_deviation": [self.max_deviation.numerator, self.max_deviation.denominator],
            "level_transitive": self.level_transitive,
            "exact": self.exact,
            "counts": {f"{a},{b}": c for (a, b), c in sorted(self.counts.items())},
        }


def verify_pseudomixing(pres: WreathPresentation, n: int, m: int, u, w,
                        element_budget: int = DEFAULT_ELEMENT_BUDGET,
                        gen_words=None) -> PseudomixingReport:
    """Exact cone-pair counting against the product formula.

    For v = uw, counts elements of the level-(|v|+m) quotient with level-n
    class a, section at u fixing w, and depth-m section at v equal to b;
    a mixing group at certified depth gives every count exactly
    |G| / (|pi_n| |pi_m| d^|w|).
    """
    u = tuple(u)
    w = tuple(w)
    if len(u) != n:
        raise ValueError("need |u| = n")
    v = u + w
    L = len(v)
    d = pres.degree
    tower = enumerate_tower(pres, L + m, element_budget, gen_words)
    q = tower[-1]
    qn, qm = tower[n - 1], tower[m - 1]

    # composite projection from the top level down to level n
    proj = np.arange(q.order, dtype=np.int64)
    for k in range(L + m, n, -1):
        proj = tower[k - 1].projection[proj] if k - 1 >= 1 else proj
    a_ids = proj

    img_L = q.truncated_images(L)
    img_n = q.truncated_images(n)
    ru, rw, rv = vertex_rank(d, u), vertex_rank(d, w), vertex_rank(d, v)
    blk = d ** len(w)
    fixes = img_L[:, rv] == img_n[:, ru] * blk + rw

    # depth-m section at v (defined also when v moves): strip the image block
    sec = q.images[:, rv * d**m : (rv + 1) * d**m].astype(np.int64)
    sec -= (img_L[:, rv].astype(np.int64) * d**m)[:, None]
    b_of = np.fromiter(
        (qm.id_of_images(row) for row in sec), dtype=np.int64, count=q.order
    )

    counts = {}
    for a in range(qn.order):
        for b in range(qm.order):
            counts[(a, b)] = int(((a_ids == a) & fixes & (b_of == b)).sum())
    expected = Fraction(q.order, qn.order * qm.order * blk)
    max_dev = max(abs(Fraction(c) - expected) for c in counts.values())
    return PseudomixingReport(
        n, m, u, w, q.order, expected, counts, max_dev,
        q.is_level_transitive(), max_dev == 0,
    )


# ---------------------------------------------------------------------------
# commutator-trick witness search


@dataclass
class CommutatorWitness:
    word: tuple
    u: tuple
    w: tuple
    validated: bool

    def to_json(self):
        from .presentation import word_to_tokens

        return {
            "word": word_to_tokens(self.word),
            "u": format_vertex(self.u),
            "w": format_vertex(self.w),
            "validated": self.validated,
        }


def _perm_order(perm) -> int:
    seen = [False] * len(perm)
    out = 1
    for x in range(len(perm)):
        if not seen[x]:
            length = 0
            y = x
            while not seen[y]:
                seen[y] = True
                y = perm[y] - 1
                length += 1
            out = lcm(out, length)
    return out


def validate_witness(pres: WreathPresentation, s_word, witness: CommutatorWitness,
                     depth: int = 6, word_budget: int = 10**6) -> bool:
    """Independent re-check: the witness word fixes u and w, its section at
    u is trivial and its section at w is s (to the given depth and exactly
    on words)."""
    g, u, w = witness.word, witness.u, witness.w
    p = pres.word_portrait(g, max(len(u), len(w)) + depth)
    if p.apply(u) != u or p.apply(w) != w:
        return False
    if not p.section(u).is_identity():
        return False
    if p.section(w) != pres.word_portrait(s_word, p.depth - len(w)):
        return False
    return pres.is_trivial(pres.word_section(g, u), budget=word_budget) and pres.is_trivial(
        tuple(pres.word_section(g, w)) + invert_word(s_word), budget=word_budget
    )


def commutator_search(pres: WreathPresentation, s_name: str, N: int,
                      conj_word_len: int = 2, budget: int = 20000,
                      screen_depth: int = 6, word_budget: int = 10**6):
    """Search for g = c' x^k c and vertices |u| <= |w| <= N with g fixing
    both, g|_u trivial and g|_w = s.  Returns a validated CommutatorWitness
    or None (NotFound).  Raises BudgetExceeded if the candidate budget runs
    out before the space is exhausted.
    """
    if s_name not in pres.perms:
        raise UnknownGenerator(s_name)
    s_word = pres.generator_word(s_name)
    d = pres.degree
    power_cap = lcm(*(_perm_order(pres.perms[g]) for g in pres.gen_names))

    letters = []
    for g in pres.gen_names:
        letters.append((g, 1))
        letters.append((g, -1))

    def conjugators(max_len):
        yield ()
        frontier = [()]
        for _ in range(max_len):
            nxt = []
            for c in frontier:
                for letter in letters:
                    cc = reduce_word(c + (letter,))
                    if len(cc) == len(c) + 1:
                        nxt.append(cc)
                        yield cc
            frontier = nxt

    checked = 0
    screen = screen_depth
    s_port = {}
    for c in conjugators(conj_word_len):
        for gname in pres.gen_names:
            for k in range(1, power_cap + 1):
                core = ((gname, 1),) * k
                g_word = reduce_word(invert_word(c) + core + c)
                if not g_word:
                    continue
                checked += 1
                if checked > budget:
                    raise BudgetExceeded(
                        f"commutator search stopped after {budget} candidates"
                    )
                p = pres.word_portrait(g_word, N + screen)
                trivial_at = []
                matches_s = []
                fixed = [()]
                for lvl in range(1, N + 1):
                    nxt = []
                    for fv in fixed:
                        for x in range(1, d + 1):
                            child = fv + (x,)
                            if p.apply(child) == child:
                                nxt.append(child)
                    fixed = nxt
                    for fv in fixed:
                        sec = p.section(fv)
                        if sec.is_identity():
                            trivial_at.append(fv)
                        else:
                            key = sec.depth
                            if key not in s_port:
                                s_port[key] = pres.word_portrait(s_word, key)
                            if sec == s_port[key]:
                                matches_s.append(fv)
                for u in trivial_at:
                    for w in matches_s:
                        if len(u) <= len(w):
                            cand = CommutatorWitness(g_word, u, w, False)
                            if validate_witness(pres, s_word, cand,
                                                depth=screen, word_budget=word_budget):
                                cand.validated = True
                                return cand
    return None
