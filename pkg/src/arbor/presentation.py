"""Wreath presentations: finitely generated self-similar groups.

A generator is a root permutation of {1..d} together with d section words;
a word is a tuple of (name, +-1) letters.  Portraits of words are unfolded
from the recursion; the word problem is decided by section closure.
"""

from __future__ import annotations

import json

from .errors import (
    BadPermutation,
    BudgetExceeded,
    SchemaError,
    UnknownGenerator,
)
from .tree import Portrait, compose_perms, internal_count, invert_perm, level_offset

Letter = tuple  # (generator name, +1 or -1)


def reduce_word(word) -> tuple:
    """Freely reduce: cancel adjacent mutually inverse letters."""
    out = []
    for name, exp in word:
        if out and out[-1][0] == name and out[-1][1] == -exp:
            out.pop()
        else:
            out.append((name, exp))
    return tuple(out)


def invert_word(word) -> tuple:
    return tuple((name, -exp) for name, exp in reversed(word))


def word_from_tokens(tokens) -> tuple:
    """Tokens are generator names, with a trailing apostrophe for inverses."""
    word = []
    for tok in tokens:
        if not isinstance(tok, str) or not tok:
            raise SchemaError(f"bad word token {tok!r}")
        if tok.endswith("'"):
            word.append((tok[:-1], -1))
        else:
            word.append((tok, 1))
    return tuple(word)


def word_to_tokens(word):
    return [name if exp == 1 else name + "'" for name, exp in word]


def parse_word_text(text: str) -> tuple:
    """Parse a whitespace-separated word, e.g. "b a' a"."""
    return word_from_tokens(text.split())


class WreathPresentation:
    """A self-similar group given by finitely many wreath recursions.

    ``perms[g]`` is the root permutation of generator g (1-based images),
    ``sections[g][i]`` the word for g|_{i+1}.  Immutable after construction.
    """

    def __init__(self, degree: int, generators):
        # generators: iterable of (name, perm, sections) with sections a
        # sequence of d words (each a sequence of (name, exp) letters).
        if degree < 2:
            raise SchemaError(f"degree must be >= 2, got {degree}")
        self.degree = degree
        names = []
        perms = {}
        sections = {}
        for name, perm, secs in generators:
            if not name or not isinstance(name, str):
                raise SchemaError(f"bad generator name {name!r}")
            if name in perms:
                raise SchemaError(f"duplicate generator name {name!r}")
            perm = tuple(perm)
            if sorted(perm) != list(range(1, degree + 1)):
                raise BadPermutation(f"generator {name}: {perm!r}")
            secs = tuple(reduce_word(s) for s in secs)
            if len(secs) != degree:
                raise SchemaError(f"generator {name}: expected {degree} sections")
            names.append(name)
            perms[name] = perm
            sections[name] = secs
        self.gen_names = tuple(names)
        self.perms = perms
        self.sections = sections
        self._inv_perms = {g: invert_perm(p) for g, p in perms.items()}
        for g in names:
            for sec in sections[g]:
                for name, exp in sec:
                    if name not in perms:
                        raise UnknownGenerator(
                            f"section of {g!r} references undeclared {name!r}"
                        )
                    if exp not in (1, -1):
                        raise SchemaError(f"bad exponent {exp!r} in section of {g!r}")
        self._portrait_cache = {}

    # -- basic word calculus ---------------------------------------------

    def check_word(self, word) -> tuple:
        word = reduce_word(word)
        for name, exp in word:
            if name not in self.perms:
                raise UnknownGenerator(f"unknown generator {name!r}")
            if exp not in (1, -1):
                raise SchemaError(f"bad exponent {exp!r}")
        return word

    def generator_word(self, name: str, exp: int = 1) -> tuple:
        if name not in self.perms:
            raise UnknownGenerator(f"unknown generator {name!r}")
        return ((name, exp),)

    def word_root_perm(self, word) -> tuple:
        """Permutation induced on level 1 (letters applied left to right)."""
        perm = tuple(range(1, self.degree + 1))
        for name, exp in word:
            nxt = self.perms[name] if exp == 1 else self._inv_perms[name]
            perm = compose_perms(perm, nxt)
        return perm

    def letter_section(self, letter, x: int):
        """Section of a single letter at level-1 vertex x, and the image x^letter."""
        name, exp = letter
        if exp == 1:
            return self.sections[name][x - 1], self.perms[name][x - 1]
        # (g^-1)|_x = (g|_{x^{g^-1}})^-1
        pre = self._inv_perms[name][x - 1]
        return invert_word(self.sections[name][pre - 1]), pre

    def word_first_section(self, word, x: int) -> tuple:
        """The word representing word|_x for a level-1 vertex x."""
        out = []
        cur = x
        for letter in word:
            sec, cur = self.letter_section(letter, cur)
            out.extend(sec)
        return reduce_word(out)

    def word_section(self, word, v) -> tuple:
        """Word representing the section at an arbitrary vertex v."""
        word = self.check_word(word)
        for x in v:
            word = self.word_first_section(word, x)
        return word

    def word_apply(self, word, v) -> tuple:
        """Image of vertex v under the word's automorphism."""
        word = self.check_word(word)
        out = []
        for x in v:
            out.append(self.word_root_perm(word)[x - 1])
            word = self.word_first_section(word, x)
        return tuple(out)

    # -- portraits ---------------------------------------------------------

    def word_portrait(self, word, depth: int) -> Portrait:
        """Depth-``depth`` truncation of the automorphism the word represents."""
        word = self.check_word(word)
        d = self.degree
        memo = self._portrait_cache

        def build(w, m):
            key = (w, m)
            cached = memo.get(key)
            if cached is not None:
                return cached
            if m == 0:
                p = Portrait.identity(d, 0)
            else:
                subs = [build(self.word_first_section(w, x), m - 1) for x in range(1, d + 1)]
                labels = [self.word_root_perm(w)]
                for k in range(m - 1):
                    off = level_offset(d, k)
                    cnt = d**k
                    for s in subs:
                        labels.extend(s.labels[off : off + cnt])
                p = Portrait(d, m, labels)
            memo[key] = p
            return p

        out = build(word, depth)
        if len(memo) > 200_000:
            self._portrait_cache = {}
        return out

    def generator_portrait(self, name: str, depth: int) -> Portrait:
        return self.word_portrait(self.generator_word(name), depth)

    # -- word problem --------------------------------------------------------

    def is_trivial(self, word, budget: int = 10**6) -> bool:
        """Exact triviality via breadth-first section closure.

        True iff every word in the closure of {word} under first-level
        sections has trivial root permutation.  Raises BudgetExceeded when
        more than ``budget`` distinct section words appear (undecided).
        """
        word = self.check_word(word)
        identity = tuple(range(1, self.degree + 1))
        seen = {word}
        queue = [word]
        while queue:
            w = queue.pop()
            if self.word_root_perm(w) != identity:
                return False
            for x in range(1, self.degree + 1):
                sec = self.word_first_section(w, x)
                if sec not in seen:
                    seen.add(sec)
                    queue.append(sec)
                    if len(seen) > budget:
                        raise BudgetExceeded(
                            f"word problem undecided within {budget} section words",
                            partial=len(seen),
                        )
        return True

    def words_equal(self, w1, w2, budget: int = 10**6) -> bool:
        return self.is_trivial(tuple(w1) + invert_word(w2), budget=budget)

    # -- serialization --------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "generators": [
                {
                    "name": g,
                    "perm": list(self.perms[g]),
                    "sections": [word_to_tokens(s) for s in self.sections[g]],
                }
                for g in self.gen_names
            ],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "WreathPresentation":
        if not isinstance(doc, dict):
            raise SchemaError("presentation document must be a JSON object")
        try:
            degree = int(doc["degree"])
            gens_doc = doc["generators"]
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad presentation document: {exc}") from None
        if not isinstance(gens_doc, list):
            raise SchemaError("'generators' must be a list")
        gens = []
        for entry in gens_doc:
            try:
                name = entry["name"]
                perm = entry["perm"]
                secs = [word_from_tokens(tokens) for tokens in entry["sections"]]
            except (KeyError, TypeError) as exc:
                raise SchemaError(f"bad generator entry: {exc}") from None
            gens.append((name, perm, secs))
        return cls(degree, gens)

    @classmethod
    def from_path(cls, path) -> "WreathPresentation":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))

    def __repr__(self):
        return f"WreathPresentation(d={self.degree}, generators={list(self.gen_names)})"
