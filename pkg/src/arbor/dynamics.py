"""Arithmetic dynamics of polynomials over number fields, characteristic 0.

Critical data with a Riemann-Hurwitz completeness certificate, forward
orbits with exact cycle detection, the exceptional-set chain (Makarov-
Smirnov set, critically exceptional set, full-preimage set), Thurston
orbifold signatures, and the resulting fixed-point-proportion verdict.
Preimage membership is decided by exact linear-factor division, never by
numerical root finding.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm

import numpy as np

from .errors import (
    IncompleteCriticalData,
    InternalInconsistency,
    NotCritical,
    NotPCF,
    PreconditionNotChebyshevLike,
    SchemaError,
    ValidationFailure,
)
from .numberfield import QQ, FieldPoly, NFElement, NumberField
from .presentation import WreathPresentation, invert_word, reduce_word


class _Infinity:
    """The point at infinity of the projective line."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"


INF = _Infinity()

NU_CAP = 2**30


def _point_key(z):
    return (1,) if z is INF else (0,) + z.vec


def _fmt_point(z):
    return "inf" if z is INF else z.to_json()


class PolynomialMap:
    """A polynomial of degree >= 2 over a number field."""

    def __init__(self, field: NumberField, coeffs):
        self.field = field
        self.poly = FieldPoly(field, coeffs)
        if self.poly.degree < 2:
            raise SchemaError("polynomial degree must be >= 2")
        self.degree = self.poly.degree
        self._derivs = [self.poly]

    def __call__(self, z):
        if z is INF:
            return INF
        return self.poly(z)

    def derivative_at(self, z: NFElement, order: int) -> NFElement:
        while len(self._derivs) <= order:
            self._derivs.append(self._derivs[-1].derivative())
        return self._derivs[order](z)

    def iterate(self, z, n: int):
        for _ in range(n):
            z = self(z)
        return z

    def compose_self(self) -> "PolynomialMap":
        return PolynomialMap(self.field,
                             [c.vec for c in self.poly.compose(self.poly).coeffs])

    def to_json(self):
        doc = {"coeffs": self.poly.to_json()}
        if not self.field.is_rational:
            doc["field"] = {"min_poly": [str(c) for c in self.field.min_poly]}
        return doc

    @classmethod
    def from_json(cls, doc) -> tuple:
        """Returns (map, claimed critical list or None)."""
        if not isinstance(doc, dict) or "coeffs" not in doc:
            raise SchemaError("polynomial document needs a 'coeffs' list")
        fdoc = doc.get("field")
        nf = NumberField(fdoc["min_poly"]) if fdoc else QQ
        f = cls(nf, [_parse_elt(nf, c) for c in doc["coeffs"]])
        claimed = None
        if "critical_points" in doc:
            claimed = [
                (nf.element(_parse_elt(nf, entry["point"])), int(entry["local_degree"]))
                for entry in doc["critical_points"]
            ]
        return f, claimed

    def __repr__(self):
        return f"PolynomialMap(degree={self.degree}, coeffs={self.poly!r})"


def _parse_elt(nf, value):
    if isinstance(value, list):
        return nf.element(value)
    return nf.element(value)


def local_degree(f: PolynomialMap, z) -> int:
    """Multiplicity of z as a root of f(x) - f(z); d at infinity.

    Char 0 lets successive exact derivatives decide: e = least j >= 1 with
    nonzero j-th derivative at z.
    """
    if z is INF:
        return f.degree
    for j in range(1, f.degree + 1):
        if not f.derivative_at(z, j).is_zero():
            return j
    raise InternalInconsistency("no nonzero derivative up to the degree")


@dataclass
class CriticalData:
    points: list  # (point, local degree >= 2), affine, sorted
    degree: int

    @property
    def affine_points(self):
        return [c for c, _ in self.points]

    def to_json(self):
        return [
            {"point": _fmt_point(c), "local_degree": e} for c, e in self.points
        ] + [{"point": "inf", "local_degree": self.degree}]


def _rational_roots(poly: FieldPoly):
    """Roots in Q of a polynomial over Q, with multiplicity, by the
    rational root theorem plus deflation."""
    nf = poly.field
    roots = []
    work = poly
    while work.degree >= 1:
        rats = [c.as_rational() for c in work.coeffs]
        scale = 1
        for c in rats:
            scale = lcm(scale, c.denominator)
        ints = [int(c * scale) for c in rats]
        k = 0
        while ints[k] == 0:
            k += 1
        if k:
            roots.extend([nf.zero] * k)
            work = FieldPoly(nf, list(work.coeffs)[k:])
            continue
        found = None
        for p in _divisors(abs(ints[0])):
            for q in _divisors(abs(ints[-1])):
                for sign in (1, -1):
                    cand = nf.element(Fraction(sign * p, q))
                    if work(cand).is_zero():
                        found = cand
                        break
                if found is not None:
                    break
            if found is not None:
                break
        if found is None:
            break
        roots.append(found)
        work, _ = work.divide_linear(found)
    return roots


def _divisors(n):
    if n == 0:
        return [1]
    out = [d for d in range(1, int(n**0.5) + 1) if n % d == 0]
    out += [n // d for d in reversed(out) if d * d != n]
    return out


def critical_data(f: PolynomialMap, claimed=None) -> CriticalData:
    """Verified affine critical points with the Riemann-Hurwitz certificate
    sum(e - 1) = d - 1; incomplete data is an error, not a warning."""
    if claimed is None:
        if not f.field.is_rational:
            raise IncompleteCriticalData(
                "critical points over an extension field must be supplied",
                deficit=f.degree - 1,
            )
        roots = _rational_roots(f.poly.derivative())
        claimed = [(c, None) for c in sorted(set(roots), key=_point_key)]
    points = []
    for item in claimed:
        c, e_claim = item if isinstance(item, tuple) else (item, None)
        c = f.field.element(c)
        if not f.derivative_at(c, 1).is_zero():
            raise NotCritical(f"f'({c!r}) is nonzero")
        e = local_degree(f, c)
        if e_claim is not None and e_claim != e:
            raise NotCritical(
                f"claimed local degree {e_claim} at {c!r}, recomputed {e}"
            )
        points.append((c, e))
    points.sort(key=lambda ce: _point_key(ce[0]))
    total = sum(e - 1 for _, e in points)
    if total != f.degree - 1:
        raise IncompleteCriticalData(
            f"ramification sum over the affine line is {total}, "
            f"need {f.degree - 1}: critical points are missing (possibly "
            "outside the supplied field)",
            deficit=f.degree - 1 - total,
        )
    return CriticalData(points, f.degree)


@dataclass
class PostCriticalOrbit:
    pcf: bool
    points: list                # sorted affine post-critical points
    forward: dict               # point -> f(point), on C u P
    preperiod_period: dict      # point -> (preperiod, period) when pcf
    escaping_prefix: list = field(default_factory=list)

    def to_json(self):
        doc = {
            "pcf": self.pcf,
            "points": [_fmt_point(p) for p in self.points],
            "includes_infinity": True,
        }
        if self.pcf:
            doc["preperiod_period"] = {
                str(_fmt_point(p)): list(v) for p, v in sorted(
                    self.preperiod_period.items(), key=lambda kv: _point_key(kv[0]))
            }
        else:
            doc["escaping_prefix"] = [_fmt_point(p) for p in self.escaping_prefix]
        return doc


def post_critical_orbit(f: PolynomialMap, crit: CriticalData,
                        bound: int = 64) -> PostCriticalOrbit:
    """Forward orbits of the critical values with exact cycle detection.

    Escape within the bound is a result (pcf=False), not an error.
    """
    pts: set = set()
    for c in crit.affine_points:
        z = f(c)
        trail = []
        steps = 0
        while z not in pts:
            trail.append(z)
            pts.add(z)
            z = f(z)
            steps += 1
            if steps > bound:
                return PostCriticalOrbit(False, sorted(pts, key=_point_key), {}, {},
                                         escaping_prefix=trail[:8])
    forward = {p: f(p) for p in pts}
    for c in crit.affine_points:
        forward.setdefault(c, f(c))
    pp = {}
    for p in pts:
        seen = {}
        z, i = p, 0
        while z not in seen:
            seen[z] = i
            z = forward[z] if z in forward else f(z)
            i += 1
        period = i - seen[z]
        pp[p] = (seen[z], period)
    return PostCriticalOrbit(True, sorted(pts, key=_point_key), forward, pp)


def preimages_in_listed(f: PolynomialMap, p: NFElement, listed):
    """Linear-factor division of f(x) - p over the listed points.

    Returns (pairs, exhausted, leftover_degree) where pairs are (point,
    multiplicity); multiplicity at a preimage equals its local degree.
    """
    g = f.poly.shift(p)
    pairs = []
    for s in sorted(set(listed), key=_point_key):
        mult = 0
        while g.degree >= 1 and g(s).is_zero():
            g, rem = g.divide_linear(s)
            if not rem.is_zero():
                raise InternalInconsistency("division by a vanishing factor failed")
            mult += 1
        if mult:
            pairs.append((s, mult))
    return pairs, g.degree == 0, g.degree


def delta_set(f: PolynomialMap, crit: CriticalData, orbit: PostCriticalOrbit):
    """Post-critical points whose full preimage lies in the listed
    critical-or-post-critical points; at most 2 for a polynomial."""
    listed = set(crit.affine_points) | set(orbit.points)
    out = []
    for p in orbit.points:
        _, exhausted, _ = preimages_in_listed(f, p, listed)
        if exhausted:
            out.append(p)
    if len(out) > 2:
        raise InternalInconsistency(
            f"full-preimage set has {len(out)} affine points; the bound is 2"
        )
    return sorted(out, key=_point_key)


def _is_exceptional(f, crit, orbit, subset) -> bool:
    """Verbatim check of S = f^{-1}(S) minus the critical points."""
    cset = set(crit.affine_points)
    sset = set(subset)
    listed = cset | set(orbit.points) | sset
    for q in sset:
        if q in cset or f(q) not in sset:
            return False
    for p in sset:
        pairs, exhausted, _ = preimages_in_listed(f, p, listed)
        if not exhausted:
            return False
        for s, _ in pairs:
            if s not in cset and s not in sset:
                return False
    return True


def sigma_set(f: PolynomialMap, crit: CriticalData, orbit: PostCriticalOrbit):
    """Maximal Makarov-Smirnov exceptional subset of the post-critical
    points, by subset iteration plus the verbatim defining equation."""
    pts = orbit.points
    if len(pts) > 16:
        raise InternalInconsistency("post-critical set too large for subset scan")
    valid = []
    for r in range(len(pts) + 1):
        for subset in itertools.combinations(pts, r):
            if _is_exceptional(f, crit, orbit, subset):
                valid.append(set(subset))
    union = set().union(*valid) if valid else set()
    if not _is_exceptional(f, crit, orbit, union):
        raise InternalInconsistency("union of exceptional sets is not exceptional")
    return sorted(union, key=_point_key)


def verify_critically_exceptional(f: PolynomialMap, crit: CriticalData,
                                  orbit: PostCriticalOrbit, subset) -> bool:
    """Verbatim check of S = f^{-1}(S) minus ((C u P) minus S)."""
    sset = set(subset)
    listed = set(crit.affine_points) | set(orbit.points)
    for q in sset:
        if f(q) not in sset:
            return False
    for p in sset:
        _, exhausted, _ = preimages_in_listed(f, p, listed | sset)
        if not exhausted:
            # a preimage outside K and the listed points would have to lie
            # in S subset of P: impossible
            return False
    return True


def upsilon_set(f: PolynomialMap, crit: CriticalData, orbit: PostCriticalOrbit,
                delta=None):
    """Maximal critically exceptional subset (affine part): the largest
    forward-invariant subset of the full-preimage set, re-verified against
    the defining equation."""
    if delta is None:
        delta = delta_set(f, crit, orbit)
    current = set(delta)
    while True:
        nxt = {p for p in current if f(p) in current}
        if nxt == current:
            break
        current = nxt
    out = sorted(current, key=_point_key)
    if not verify_critically_exceptional(f, crit, orbit, out):
        raise InternalInconsistency(
            "greatest-fixed-point result fails the defining equation"
        )
    sig = sigma_set(f, crit, orbit)
    if not set(sig) <= set(out) <= set(delta):
        raise InternalInconsistency("inclusion chain sigma <= upsilon <= delta broken")
    return out


# ---------------------------------------------------------------------------
# orbifold


@dataclass
class Orbifold:
    nu: dict                    # point (or INF) -> int or None (= infinity)
    chi: Fraction
    type_tuple: tuple           # nu restricted to post-critical points + inf
    kind: str                   # euclidean | hyperbolic | spherical

    def to_json(self):
        return {
            "nu": [
                {"point": _fmt_point(z), "nu": ("inf" if v is None else v)}
                for z, v in sorted(self.nu.items(), key=lambda kv: _point_key(kv[0]))
            ],
            "chi": [self.chi.numerator, self.chi.denominator],
            "type": ["inf" if v is None else v for v in self.type_tuple],
            "kind": self.kind,
        }


def orbifold_signature(f: PolynomialMap, crit: CriticalData,
                       orbit: PostCriticalOrbit) -> Orbifold:
    """Least ramification function: nu(f(w)) divisible by nu(w)e(w) on the
    listed points, infinity on super-attracting cycles and at the fixed
    point at infinity; Euler characteristic decides the class."""
    if not orbit.pcf:
        raise NotPCF("orbifold signature needs a finite post-critical set")
    e_of = dict(crit.points)
    listed = sorted(set(crit.affine_points) | set(orbit.points), key=_point_key)
    forward = {z: f(z) for z in listed}

    periodic = set()
    for z in listed:
        trail = [z]
        seen = {z}
        w = forward[z]
        while w in forward and w not in seen:
            seen.add(w)
            trail.append(w)
            w = forward[w]
        if w in forward:
            cycle = trail[trail.index(w):]
            if any(c in e_of for c in cycle):
                periodic.update(cycle)

    nu = {z: (None if z in periodic else 1) for z in listed}
    nu[INF] = None
    changed = True
    while changed:
        changed = False
        for w in listed:
            target = forward[w]
            if target is INF or nu.get(target) is None:
                continue
            need = None if nu[w] is None else nu[w] * e_of.get(w, 1)
            new = None if need is None else lcm(nu[target], need)
            if new is not None and new > NU_CAP:
                raise InternalInconsistency("nu fixpoint exceeded the cap")
            if new != nu[target]:
                nu[target] = new
                changed = True

    marked = [p for p in orbit.points] + [INF]
    chi = Fraction(2)
    tup = []
    for z in marked:
        v = nu.get(z, 1)
        chi -= 1 if v is None else Fraction(v - 1, v)
        tup.append(v)
    tup.sort(key=lambda v: (v is None, v))
    kind = "euclidean" if chi == 0 else ("hyperbolic" if chi < 0 else "spherical")
    return Orbifold(nu, chi, tuple(tup), kind)


# ---------------------------------------------------------------------------
# classification


@dataclass
class DynOrbifoldReport:
    degree: int
    pcf: bool
    post_critical: list
    sigma: list
    upsilon: list
    delta: list
    orbifold: Orbifold | None
    verdict: str                 # "chebyshev_like" | "zero_fpp"
    predicted_fpp: Fraction
    delay_note: str
    scope_note: str = ("upsilon is computed inside the supplied field; points "
                       "outside it are invisible")

    def to_json(self):
        return {
            "degree": self.degree,
            "pcf": self.pcf,
            "post_critical_affine": [_fmt_point(p) for p in self.post_critical],
            "sigma": [_fmt_point(p) for p in self.sigma],
            "upsilon_affine": [_fmt_point(p) for p in self.upsilon],
            "delta_affine": [_fmt_point(p) for p in self.delta],
            "orbifold": self.orbifold.to_json() if self.orbifold else None,
            "verdict": self.verdict,
            "predicted_fpp": [self.predicted_fpp.numerator,
                              self.predicted_fpp.denominator],
            "predicted_fpp_float": float(self.predicted_fpp),
            "delay_note": self.delay_note,
            "scope_note": self.scope_note,
        }


def classify_polynomial(f: PolynomialMap, crit: CriticalData | None = None,
                        orbit_bound: int = 64) -> DynOrbifoldReport:
    """The dichotomy: at most one affine critically exceptional point gives
    fixed-point proportion zero (mixing route, delay at most 4); exactly two
    force a euclidean (2,2,infinity) orbifold with proportion 1/2 for odd
    degree and 1/4 for even."""
    if crit is None:
        crit = critical_data(f)
    orbit = post_critical_orbit(f, crit, orbit_bound)
    if not orbit.pcf:
        raise NotPCF(
            f"post-critical orbit escaped within {orbit_bound} iterations: "
            f"{[_fmt_point(p) for p in orbit.escaping_prefix]}"
        )
    delta = delta_set(f, crit, orbit)
    upsilon = upsilon_set(f, crit, orbit, delta)
    sigma = sigma_set(f, crit, orbit)
    orb = orbifold_signature(f, crit, orbit)

    if len(upsilon) <= 1:
        return DynOrbifoldReport(
            f.degree, True, orbit.points, sigma, upsilon, delta, orb,
            "zero_fpp", Fraction(0),
            "mixing route: stabilizer sections recover the group with delay <= 4",
        )
    if len(upsilon) == 2:
        if orb.kind != "euclidean" or orb.type_tuple != (2, 2, None):
            raise InternalInconsistency(
                "two critically exceptional points must force a euclidean "
                f"(2,2,inf) orbifold; got {orb.kind} {orb.type_tuple}"
            )
        if sigma != upsilon:
            raise InternalInconsistency(
                "with two critically exceptional points the Makarov-Smirnov "
                "set must coincide with them"
            )
        fpp = Fraction(1, 2) if f.degree % 2 == 1 else Fraction(1, 4)
        return DynOrbifoldReport(
            f.degree, True, orbit.points, sigma, upsilon, delta, orb,
            "chebyshev_like", fpp, "dihedral closure; proportion is the limit",
        )
    raise InternalInconsistency("more than two affine critically exceptional points")


# ---------------------------------------------------------------------------
# twisted Chebyshev detection


@dataclass
class TwistedChebyshevMatch:
    alpha: NFElement
    beta: NFElement
    zeta: NFElement
    matched: bool
    residual: dict | None = None

    def to_json(self):
        return {
            "matched": self.matched,
            "lambda": {"alpha": _fmt_point(self.alpha), "beta": _fmt_point(self.beta)},
            "zeta": _fmt_point(self.zeta) if self.zeta is not None else None,
            "residual": self.residual,
        }


def _laurent_eval_at_x_plus_invx(g: FieldPoly):
    """Laurent coefficients of g(x + 1/x) as a dict exponent -> element."""
    nf = g.field
    out = {}
    for c in reversed(g.coeffs):
        nxt = {}
        for k, v in out.items():
            nxt[k + 1] = nxt.get(k + 1, nf.zero) + v
            nxt[k - 1] = nxt.get(k - 1, nf.zero) + v
        if not c.is_zero():
            nxt[0] = nxt.get(0, nf.zero) + c
        out = {k: v for k, v in nxt.items() if not v.is_zero()}
    return out


def detect_twisted_chebyshev(f: PolynomialMap, report: DynOrbifoldReport
                             ) -> TwistedChebyshevMatch | None:
    """Find an affine conjugation onto a standard twisted Chebyshev map:
    g(x + 1/x) = x^d + zeta/x^d with zeta^(d-1) = 1, where g moves the two
    post-critical points to -2 and 2."""
    if report.verdict != "chebyshev_like" or len(report.post_critical) != 2:
        raise PreconditionNotChebyshevLike(
            "need a chebyshev_like verdict with two affine post-critical points"
        )
    nf = f.field
    p1, p2 = report.post_critical
    d = f.degree
    last_residual = None
    for a_pt, b_pt in ((p1, p2), (p2, p1)):
        # affine map alpha x + beta with a_pt -> -2, b_pt -> 2
        alpha = (nf.element(2) - nf.element(-2)) / (b_pt - a_pt)
        beta = nf.element(-2) - alpha * a_pt
        inv = FieldPoly(nf, [(nf.zero - beta) / alpha, nf.one / alpha])
        g = f.poly.compose(inv) * alpha
        g = FieldPoly(nf, [g.coeffs[0] + beta] + list(g.coeffs[1:]))
        coeffs = _laurent_eval_at_x_plus_invx(g)
        zeta = coeffs.get(-d, nf.zero)
        ok = coeffs.get(d, nf.zero) == nf.one
        for k, v in coeffs.items():
            if k not in (d, -d) and not v.is_zero():
                ok = False
        if ok and (zeta ** (d - 1)) == nf.one:
            return TwistedChebyshevMatch(alpha, beta, zeta, True)
        last_residual = {str(k): _fmt_point(v) for k, v in sorted(coeffs.items())}
    return TwistedChebyshevMatch(nf.one, nf.zero, None, False, last_residual)


# ---------------------------------------------------------------------------
# wreath recursion vs polynomial


@dataclass
class ValidationReport:
    passed: bool
    clauses: dict
    first_failure: str | None = None

    def to_json(self):
        return {"passed": self.passed, "clauses": self.clauses,
                "first_failure": self.first_failure}


class _ConjContext:
    """Conjugacy tests inside an enumerated quotient at fixed depth."""

    def __init__(self, pres, depth, element_budget):
        from .quotient import enumerate_tower

        self.pres = pres
        self.depth = depth
        self.q = enumerate_tower(pres, depth, element_budget)[-1]
        self._classes = {}

    def conjugate_to_word(self, word, target_word) -> bool:
        key = tuple(target_word)
        if key not in self._classes:
            t = np.asarray(
                self.pres.word_portrait(target_word, self.depth).level_images(self.depth),
                dtype=np.int64,
            )
            cls = set()
            for h in self.q.images:
                h = h.astype(np.int64)
                hinv = np.empty_like(h)
                hinv[h] = np.arange(len(h))
                cls.add(tuple(int(x) for x in h[t[hinv]]))
            self._classes[key] = cls
        img = self.pres.word_portrait(word, self.depth).level_images(self.depth)
        return tuple(int(x) for x in img) in self._classes[key]


def _root_cycles(perm):
    """Cycles of a 1-based image tuple, as lists of 1-based points."""
    seen = set()
    cycles = []
    for x in range(1, len(perm) + 1):
        if x in seen:
            continue
        cyc = [x]
        seen.add(x)
        y = perm[x - 1]
        while y != x:
            cyc.append(y)
            seen.add(y)
            y = perm[y - 1]
        cycles.append(cyc)
    return cycles


def validate_recursion_against_polynomial(
        pres: WreathPresentation, f: PolynomialMap, crit: CriticalData,
        orbit: PostCriticalOrbit, depth: int, inertia, g_inf_word,
        element_budget: int = 2_000_000, word_budget: int = 10**6
) -> ValidationReport:
    """Consistency of a wreath recursion with the combinatorics the
    polynomial forces on its inertia generators.

    inertia maps each affine post-critical point to a word; g_inf_word is
    the designated word over infinity.  Clauses:
      (a) some cyclic ordering of all inertia words multiplies to 1;
      (b) each generator's level-1 cycle type is the preimage local-degree
          multiset of its point;
      (c) g_inf powers d^n fix level n with d-cycle labels there;
      (d) recursively, sections of g_p^(e) at marked vertices are conjugate
          to the generator of the image point, or trivial off the
          post-critical set, under a parent-consistent marking.
    """
    clauses = {}
    d = pres.degree
    listed = sorted(set(crit.affine_points) | set(orbit.points), key=_point_key)
    pset = set(orbit.points)
    inertia = {k: pres.check_word(w) for k, w in inertia.items()}
    g_inf_word = pres.check_word(g_inf_word)

    def fail(clause, msg):
        clauses[clause] = {"ok": False, "detail": msg}
        report = ValidationReport(False, clauses, clause)
        return report

    # (a) product relation, orderings up to rotation
    words = [inertia[p] for p in orbit.points] + [g_inf_word]
    ok_order = None
    first = words[0]
    for rest in itertools.permutations(words[1:]):
        prod = reduce_word(first + tuple(x for w in rest for x in w))
        if pres.is_trivial(prod, budget=word_budget):
            ok_order = [first] + list(rest)
            break
    if ok_order is None:
        return fail("a", "no cyclic ordering of the inertia words is trivial")
    clauses["a"] = {"ok": True}

    # (b) level-1 cycle types
    for p in orbit.points:
        pairs, _, leftover = preimages_in_listed(f, p, listed)
        expected = sorted([e for _, e in pairs] + [1] * leftover)
        got = sorted(len(c) for c in _root_cycles(pres.word_root_perm(inertia[p])))
        if expected != got:
            return fail("b", f"cycle type at {_fmt_point(p)}: "
                             f"expected {expected}, got {got}")
    clauses["b"] = {"ok": True}

    # (c) the generator over infinity: d-cycle at every level
    root = pres.word_root_perm(g_inf_word)
    if sorted(len(c) for c in _root_cycles(root)) != [d]:
        return fail("c", "g_inf is not a d-cycle on level 1")
    for n in range(1, depth):
        w = g_inf_word * (d**n)
        port = pres.word_portrait(w, n + 1)
        if port.level_images(n) != list(range(d**n)):
            return fail("c", f"g_inf^(d^{n}) does not stabilize level {n}")
        for rank in range(d**n):
            lbl = port.labels[
                (d**n - 1) // (d - 1) + rank
            ]
            if sorted(len(c) for c in _root_cycles(lbl)) != [d]:
                return fail("c", f"label of g_inf^(d^{n}) at level {n} "
                                 f"rank {rank} is not a d-cycle")
    clauses["c"] = {"ok": True}

    # (d) recursive marking
    ctx = _ConjContext(pres, min(depth, 3), element_budget)

    def claim(word, q, depth_left) -> bool:
        if depth_left == 0:
            return True
        pairs, _, leftover = preimages_in_listed(f, q, listed)
        root = pres.word_root_perm(word)
        cycles = _root_cycles(root)
        slots = [(s, e) for s, e in pairs] + [(None, 1)] * leftover
        return _assign(word, cycles, slots, depth_left)

    def _assign(word, cycles, slots, depth_left) -> bool:
        if not cycles:
            return True
        cyc = cycles[0]
        for i, (s, e) in enumerate(slots):
            if e != len(cyc):
                continue
            v = (min(cyc),)
            power = tuple(word) * len(cyc)
            sec = pres.word_section(power, v)
            if s is None or s not in pset:
                good = pres.is_trivial(sec, budget=word_budget)
            else:
                good = ctx.conjugate_to_word(sec, inertia[s]) and claim(
                    sec, s, depth_left - 1
                )
            if good and _assign(word, cycles[1:], slots[:i] + slots[i + 1:],
                                depth_left):
                return True
        return False

    for p in orbit.points:
        if not claim(inertia[p], p, depth):
            return fail("d", f"no consistent marking for the generator at "
                             f"{_fmt_point(p)} to depth {depth}")
    clauses["d"] = {"ok": True}
    return ValidationReport(True, clauses, None)
