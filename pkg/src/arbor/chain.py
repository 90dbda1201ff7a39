"""Deterministic stabilizer chains for groups acting on truncated trees.

The enumeration engine stores whole quotients, which caps it near a few
million elements.  Stabilizer certificates (mixing, fractality, K_G) only
need subgroup images, so they run instead on a base-and-strong-generating
set for the action on all vertices of level 1..depth at once.  A quotient
of order 2^45 is routine here.

Permutations are numpy index arrays: p[x] is the image of point x, and
"p then q" composes as q[p].
"""

from __future__ import annotations

import numpy as np

from .errors import BudgetExceeded
from .presentation import WreathPresentation
from .tree import level_offset


def domain_offsets(degree: int, depth: int):
    """Start index of each level's points; level-l rank r sits at
    offsets[l-1] + r.  The root is not part of the domain."""
    return [level_offset(degree, k) - 1 for k in range(1, depth + 2)]


def vertex_domain_gens(pres: WreathPresentation, gen_words, depth: int):
    """Generator actions on the disjoint union of levels 1..depth."""
    offs = domain_offsets(pres.degree, depth)
    npoints = offs[-1]
    gens = []
    for w in gen_words:
        portrait = pres.word_portrait(w, depth)
        perm = np.empty(npoints, dtype=np.int64)
        for lvl in range(1, depth + 1):
            img = np.asarray(portrait.level_images(lvl), dtype=np.int64)
            perm[offs[lvl - 1] : offs[lvl]] = img + offs[lvl - 1]
        gens.append(perm)
    return npoints, gens


class StabilizerChain:
    """Base and strong generating set with a caller-fixed full base.

    The base is every domain point in the given order, so the pointwise
    stabilizer of any base prefix is generated by the strong generators
    attached at later base positions.  Construction is the classic
    deterministic Schreier-Sims closure.
    """

    def __init__(self, npoints: int, gens, base_order=None):
        self.n = npoints
        base = list(base_order) if base_order is not None else []
        in_base = set(base)
        self.base = base + [p for p in range(npoints) if p not in in_base]
        if sorted(self.base) != list(range(npoints)):
            raise ValueError("base_order must be a subset of the domain, no repeats")
        self._identity = np.arange(npoints, dtype=np.int64)
        self.sgens = []   # strong generators
        self.attach = []  # per sgen: first base position it moves
        # per base position: orbit point -> (coset rep, inverse rep)
        self.orbit = [{b: (self._identity, self._identity)} for b in self.base]
        self._done = [set() for _ in range(self.n)]
        deepest = -1
        for g in gens:
            lvl = self._add_sgen(np.asarray(g, dtype=np.int64))
            if lvl is not None:
                deepest = max(deepest, lvl)
        # bottom-up verification: a level is done when all its Schreier
        # generators sift to identity through the (already done) levels below
        i = deepest
        while i >= 0:
            hit = self._process_level(i)
            i = hit if hit is not None else i - 1

    # -- construction -------------------------------------------------------

    def _add_sgen(self, g):
        for i in range(self.n):
            if g[self.base[i]] != self.base[i]:
                self.sgens.append(g)
                self.attach.append(i)
                return i
        return None  # identity

    def _level_gens(self, i):
        """Strong generators lying in the stabilizer of base[:i]."""
        return [k for k, lvl in enumerate(self.attach) if lvl >= i]

    def _process_level(self, i):
        """Extend the orbit at base position i and sift one round of new
        Schreier generators.  Returns the attach level of a new strong
        generator (restart there), or None when the level verifies."""
        orbit = self.orbit[i]
        gen_idx = self._level_gens(i)
        gens = [self.sgens[k] for k in gen_idx]
        queue = list(orbit.keys())
        while queue:
            p = queue.pop(0)
            rep, _ = orbit[p]
            for g in gens:
                q = int(g[p])
                if q not in orbit:
                    rep_q = g[rep]
                    inv_q = np.empty(self.n, dtype=np.int64)
                    inv_q[rep_q] = self._identity
                    orbit[q] = (rep_q, inv_q)
                    queue.append(q)
        done = self._done[i]
        for p in list(orbit.keys()):
            rep_p, _ = orbit[p]
            for k, g in zip(gen_idx, gens):
                if (p, k) in done:
                    continue
                done.add((p, k))
                q = int(g[p])
                _, inv_q = orbit[q]
                schreier = inv_q[g[rep_p]]
                residue = self._sift(schreier, i + 1)
                if residue is not None:
                    lvl = self._add_sgen(residue)
                    if lvl is not None:
                        return lvl
        return None

    def _sift(self, g, start):
        for i in range(start, self.n):
            b = self.base[i]
            p = int(g[b])
            if p == b:
                continue
            hit = self.orbit[i].get(p)
            if hit is None:
                return g
            g = hit[1][g]
        return None

    # -- queries -------------------------------------------------------------

    def order(self) -> int:
        out = 1
        for orb in self.orbit:
            out *= len(orb)
        return out

    def contains(self, g) -> bool:
        return self._sift(np.asarray(g, dtype=np.int64), 0) is None

    def prefix_stabilizer_gens(self, k: int):
        """Strong generators of the pointwise stabilizer of base[:k]."""
        return [self.sgens[j] for j, lvl in enumerate(self.attach) if lvl >= k]

    def orbit_of(self, point: int, gens=None):
        """Orbit of a point under the given permutations (default: all
        strong generators)."""
        if gens is None:
            gens = self.sgens
        seen = {point}
        queue = [point]
        while queue:
            p = queue.pop()
            for g in gens:
                q = int(g[p])
                if q not in seen:
                    seen.add(q)
                    queue.append(q)
        return seen


def level_prefix_size(degree: int, k: int) -> int:
    """Number of domain points on levels 1..k."""
    return level_offset(degree, k + 1) - 1


def section_images(gen, degree: int, depth: int, v_level: int, v_rank: int, m: int):
    """Action of a domain permutation on the level-(v_level+m) descendants
    of a fixed vertex, as a 0-based image list of length degree**m.

    ``gen`` must fix the vertex; the result is the level-m action of its
    section there.
    """
    offs = domain_offsets(degree, depth)
    lvl = v_level + m
    if lvl > depth:
        raise ValueError("section depth exceeds domain depth")
    block = degree**m
    base = offs[lvl - 1] + v_rank * block
    img = gen[base : base + block] - offs[lvl - 1] - v_rank * block
    if img.min() < 0 or img.max() >= block:
        raise ValueError("generator does not fix the vertex")
    return img.astype(np.int64)


def closure_of_perms(rows, budget: int = 1_000_000):
    """All products of the given permutations (small groups only)."""
    if not rows:
        return set()
    npts = len(rows[0])
    identity = tuple(range(npts))
    seen = {identity}
    frontier = [identity]
    rows = [tuple(int(x) for x in r) for r in rows]
    while frontier:
        nxt = []
        for e in frontier:
            for r in rows:
                prod = tuple(r[x] for x in e)
                if prod not in seen:
                    if len(seen) >= budget:
                        raise BudgetExceeded("permutation closure exceeded budget")
                    seen.add(prod)
                    nxt.append(prod)
        frontier = nxt
    return seen
