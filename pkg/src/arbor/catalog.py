"""Vetted fixtures: wreath presentations, paired polynomials, and the
structural facts the engines are expected to reproduce.

Catalog data is assertion material, not trusted input: the test suite
re-derives every expected fact, and every polynomial pairing must pass the
recursion validator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .dynamics import PolynomialMap
from .errors import UnknownEntry
from .numberfield import QQ
from .presentation import WreathPresentation, parse_word_text
from .quotient import DEFAULT_ELEMENT_BUDGET, enumerate_tower, exhaustive_tower

_W = parse_word_text


@dataclass
class ExpectedFacts:
    level_transitive: bool
    fractal: tuple | None = None                # (bound, m, expected)
    super_strongly_fractal: tuple | None = None  # (bound, m, expected)
    mixing: tuple | None = None                  # (n, m, N, expected)
    fixer_proportions: dict = field(default_factory=dict)  # level -> Fraction
    verdict: str | None = None                   # classification verdict


@dataclass
class CatalogEntry:
    name: str
    description: str
    presentation: WreathPresentation | None
    expected: ExpectedFacts
    gen_words: tuple | None = None        # subgroup generators, as words
    polynomial: PolynomialMap | None = None
    inertia: dict | None = None           # post-critical point -> word
    g_inf: tuple | None = None
    virtual_full_aut: bool = False

    def tower(self, n: int, element_budget: int = DEFAULT_ELEMENT_BUDGET,
              allow_partial: bool = False):
        """Quotients at levels 1..n for this entry."""
        if self.virtual_full_aut:
            return exhaustive_tower(self.presentation.degree if self.presentation
                                    else 2, n, element_budget)
        return enumerate_tower(self.presentation, n, element_budget,
                               gen_words=self.gen_words,
                               allow_partial=allow_partial)

    def to_json(self):
        doc = {"name": self.name, "description": self.description}
        if self.presentation is not None and not self.virtual_full_aut:
            doc["presentation"] = self.presentation.to_json()
        if self.virtual_full_aut:
            doc["virtual"] = "full automorphism group (sampler-backed)"
        if self.gen_words is not None:
            doc["subgroup_generators"] = [
                " ".join(n if e == 1 else n + "'" for n, e in w)
                for w in self.gen_words
            ]
        if self.polynomial is not None:
            doc["polynomial"] = self.polynomial.to_json()
        if self.expected.verdict:
            doc["expected_verdict"] = self.expected.verdict
        return doc


def _chebyshev_d2_presentation():
    return WreathPresentation(2, [
        ("a", (2, 1), [(), ()]),
        ("b", (1, 2), [_W("a"), _W("b")]),
    ])


def _build():
    entries = {}

    entries["trivial"] = CatalogEntry(
        "trivial",
        "the trivial group on the binary tree",
        WreathPresentation(2, []),
        ExpectedFacts(level_transitive=False,
                      fractal=(1, 1, False),
                      fixer_proportions={1: Fraction(1), 2: Fraction(1)}),
    )

    entries["full_aut_d2"] = CatalogEntry(
        "full_aut_d2",
        "full automorphism group of the binary tree (virtual entry: Haar "
        "sampler plus exhaustive small quotients)",
        WreathPresentation(2, []),
        ExpectedFacts(level_transitive=True,
                      fixer_proportions={1: Fraction(1, 2), 2: Fraction(3, 8),
                                         3: Fraction(39, 128)}),
        virtual_full_aut=True,
    )

    entries["odometer_d2"] = CatalogEntry(
        "odometer_d2",
        "binary odometer (adding machine); procyclic closure",
        WreathPresentation(2, [("a", (2, 1), [_W("a"), ()])]),
        ExpectedFacts(level_transitive=True,
                      super_strongly_fractal=(1, 1, True),
                      fixer_proportions={1: Fraction(1, 2), 2: Fraction(1, 4),
                                         3: Fraction(1, 8)}),
    )

    cheb2 = _chebyshev_d2_presentation()
    entries["chebyshev_d2"] = CatalogEntry(
        "chebyshev_d2",
        "degree-2 Chebyshev recursion (two involutions, dihedral closure) "
        "paired with x^2 - 2",
        cheb2,
        ExpectedFacts(level_transitive=True,
                      fractal=(2, 2, True),
                      super_strongly_fractal=(2, 2, False),
                      mixing=(2, 2, 0, False),
                      fixer_proportions={n: Fraction(1 + 2 ** (n - 1), 2 ** (n + 1))
                                         for n in range(1, 11)},
                      verdict="chebyshev_like"),
        polynomial=PolynomialMap(QQ, [-2, 0, 1]),
        inertia={QQ.element(-2): _W("a"), QQ.element(2): _W("b")},
        g_inf=_W("b' a'"),
    )

    entries["chebyshev_d3"] = CatalogEntry(
        "chebyshev_d3",
        "degree-3 Chebyshev recursion (dihedral closure on the ternary "
        "tree) paired with x^3 - 3x",
        WreathPresentation(3, [
            ("a", (1, 3, 2), [_W("a"), (), ()]),
            ("b", (2, 1, 3), [(), (), _W("b")]),
        ]),
        ExpectedFacts(level_transitive=True,
                      mixing=(2, 2, 0, False),
                      fixer_proportions={n: Fraction(1 + 3**n, 2 * 3**n)
                                         for n in range(1, 8)},
                      verdict="chebyshev_like"),
        polynomial=PolynomialMap(QQ, [0, -3, 0, 1]),
        inertia={QQ.element(-2): _W("a"), QQ.element(2): _W("b")},
        g_inf=_W("b' a'"),
    )

    entries["basilica"] = CatalogEntry(
        "basilica",
        "basilica recursion paired with x^2 - 1",
        WreathPresentation(2, [
            ("a", (2, 1), [_W("b"), ()]),
            ("b", (1, 2), [_W("a"), ()]),
        ]),
        ExpectedFacts(level_transitive=True,
                      fractal=(2, 2, True),
                      mixing=(1, 1, 4, True),
                      verdict="zero_fpp"),
        polynomial=PolynomialMap(QQ, [-1, 0, 1]),
        inertia={QQ.element(-1): _W("a"), QQ.element(0): _W("b")},
        g_inf=_W("b' a'"),
    )

    entries["power_map_d2"] = CatalogEntry(
        "power_map_d2",
        "squaring map x^2: odometer recursion, procyclic closure",
        WreathPresentation(2, [("a", (2, 1), [_W("a"), ()])]),
        ExpectedFacts(level_transitive=True,
                      mixing=(1, 1, 0, True),
                      fixer_proportions={n: Fraction(1, 2**n) for n in range(1, 6)},
                      verdict="zero_fpp"),
        polynomial=PolynomialMap(QQ, [0, 0, 1]),
        inertia={QQ.element(0): _W("a")},
        g_inf=_W("a'"),
    )

    entries["grigorchuk"] = CatalogEntry(
        "grigorchuk",
        "first Grigorchuk group; structural fixture, no polynomial pairing",
        WreathPresentation(2, [
            ("a", (2, 1), [(), ()]),
            ("b", (1, 2), [_W("a"), _W("c")]),
            ("c", (1, 2), [_W("a"), _W("d")]),
            ("d", (1, 2), [(), _W("b")]),
        ]),
        ExpectedFacts(level_transitive=True,
                      fractal=(2, 2, True),
                      super_strongly_fractal=(2, 2, True),
                      mixing=(1, 1, 0, True)),
    )

    entries["projection_invariant_example"] = CatalogEntry(
        "projection_invariant_example",
        "cyclic subgroup generated by ba inside the degree-2 Chebyshev "
        "closure: projection-invariant but not self-similar",
        _chebyshev_d2_presentation(),
        ExpectedFacts(level_transitive=True,
                      fractal=(1, 1, True),
                      fixer_proportions={1: Fraction(1, 2), 2: Fraction(1, 4)}),
        gen_words=(_W("b a"),),
    )

    return entries


_ENTRIES = _build()


def catalog_names():
    return sorted(_ENTRIES)


def catalog_get(name: str) -> CatalogEntry:
    try:
        return _ENTRIES[name]
    except KeyError:
        raise UnknownEntry(
            f"no catalog entry {name!r}; available: {', '.join(catalog_names())}"
        ) from None
