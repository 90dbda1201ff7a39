"""Truncated automorphisms of the d-regular rooted tree.

Vertices are words over {1..d}, stored as tuples of ints; the empty tuple
is the root.  A depth-m automorphism is a Portrait: one permutation of
{1..d} per vertex of level < m, stored dense in level-major lex order.

All group operations use the right-action convention: ``apply`` evaluates
v^g level by level, and ``p.compose(q)`` is "p first, then q".
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .errors import DegreeMismatch, DepthExceeded, SchemaError, SymbolOutOfRange


@dataclass(frozen=True)
class TreeShape:
    """The d-regular rooted tree, d >= 2."""

    degree: int

    def __post_init__(self):
        if not isinstance(self.degree, int) or self.degree < 2:
            raise ValueError(f"degree must be an integer >= 2, got {self.degree!r}")


def check_vertex(degree: int, v) -> tuple:
    """Validate a vertex word and return it as a tuple of ints in 1..d."""
    v = tuple(v)
    for x in v:
        if not isinstance(x, int) or not 1 <= x <= degree:
            raise SymbolOutOfRange(f"symbol {x!r} outside 1..{degree}")
    return v


def parse_vertex(degree: int, text: str) -> tuple:
    """Parse a vertex from a string like '12' (d <= 9) or '1.2.11'."""
    text = text.strip()
    if text in ("", "-"):
        return ()
    parts = text.split(".") if "." in text else list(text)
    try:
        word = tuple(int(p) for p in parts)
    except ValueError:
        raise SchemaError(f"cannot parse vertex {text!r}") from None
    return check_vertex(degree, word)


def level_offset(degree: int, k: int) -> int:
    """Index of the first level-k vertex in level-major order."""
    return (degree**k - 1) // (degree - 1)


def internal_count(degree: int, depth: int) -> int:
    return level_offset(degree, depth)


def vertex_rank(degree: int, v) -> int:
    """Lex rank of a vertex within its own level."""
    r = 0
    for x in v:
        r = r * degree + (x - 1)
    return r


def compose_perms(p, q):
    """Permutation 'p then q' as 1-based image tuples: x -> q[p[x]]."""
    return tuple(q[p[x] - 1] for x in range(len(p)))


def invert_perm(p):
    inv = [0] * len(p)
    for x, y in enumerate(p):
        inv[y - 1] = x + 1
    return tuple(inv)


def _check_perm(degree, perm):
    perm = tuple(perm)
    if sorted(perm) != list(range(1, degree + 1)):
        raise SchemaError(f"not a permutation of 1..{degree}: {perm!r}")
    return perm


class Portrait:
    """Immutable depth-m tree automorphism given by its permutation labels.

    ``labels[i]`` is the permutation (1-based image tuple) at the i-th
    internal vertex in level-major lex order.  Depth 0 is the identity
    object with no labels.
    """

    __slots__ = ("degree", "depth", "labels", "_key")

    def __init__(self, degree: int, depth: int, labels):
        if degree < 2:
            raise ValueError("degree must be >= 2")
        if depth < 0:
            raise ValueError("depth must be >= 0")
        labels = tuple(tuple(p) for p in labels)
        if len(labels) != internal_count(degree, depth):
            raise SchemaError(
                f"expected {internal_count(degree, depth)} labels for depth {depth}, "
                f"got {len(labels)}"
            )
        for p in labels:
            _check_perm(degree, p)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "depth", depth)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "_key", None)

    def __setattr__(self, name, value):
        raise AttributeError("Portrait is immutable")

    @classmethod
    def identity(cls, degree: int, depth: int) -> "Portrait":
        idp = tuple(range(1, degree + 1))
        return cls(degree, depth, [idp] * internal_count(degree, depth))

    @classmethod
    def from_root_perm(cls, degree: int, depth: int, perm) -> "Portrait":
        """Portrait acting by ``perm`` at the root and trivially below."""
        p = cls.identity(degree, depth)
        if depth == 0:
            return p
        labels = (tuple(perm),) + p.labels[1:]
        return cls(degree, depth, labels)

    # -- indexing ------------------------------------------------------

    def label_at(self, v) -> tuple:
        v = check_vertex(self.degree, v)
        if len(v) >= self.depth:
            raise DepthExceeded(f"vertex level {len(v)} has no label at depth {self.depth}")
        return self.labels[level_offset(self.degree, len(v)) + vertex_rank(self.degree, v)]

    def key(self) -> bytes:
        """Canonical byte encoding of the label array (equality key)."""
        if self._key is None:
            if self.degree > 255:
                raise ValueError("canonical byte keys support degree <= 255")
            object.__setattr__(
                self, "_key", bytes(x - 1 for p in self.labels for x in p)
            )
        return self._key

    # -- group operations ----------------------------------------------

    def apply(self, v) -> tuple:
        """Image v^g of a vertex, |v| <= depth."""
        v = check_vertex(self.degree, v)
        if len(v) > self.depth:
            raise DepthExceeded(f"|v| = {len(v)} exceeds depth {self.depth}")
        d = self.degree
        out = []
        idx = 0  # rank of the current prefix within its level
        for k, x in enumerate(v):
            label = self.labels[level_offset(d, k) + idx]
            out.append(label[x - 1])
            idx = idx * d + (x - 1)
        return tuple(out)

    def _level_ranks(self, n: int):
        """Image ranks of all level-k vertices for k = 0..n, lex order."""
        d = self.degree
        ranks = [[0]]
        for k in range(n):
            off = level_offset(d, k)
            cur = ranks[-1]
            nxt = [0] * (len(cur) * d)
            for r, img in enumerate(cur):
                label = self.labels[off + r]
                base = r * d
                for x in range(d):
                    nxt[base + x] = img * d + (label[x] - 1)
            ranks.append(nxt)
        return ranks

    def compose(self, other: "Portrait") -> "Portrait":
        """self followed by other; result depth = min of the two depths."""
        if self.degree != other.degree:
            raise DegreeMismatch(f"degree {self.degree} vs {other.degree}")
        d = self.degree
        m = min(self.depth, other.depth)
        ranks = self._level_ranks(m - 1) if m > 0 else [[0]]
        labels = []
        for k in range(m):
            off = level_offset(d, k)
            imgs = ranks[k]
            for r in range(d**k):
                labels.append(
                    compose_perms(self.labels[off + r], other.labels[off + imgs[r]])
                )
        return Portrait(d, m, labels)

    def inverse(self) -> "Portrait":
        d = self.degree
        labels = []
        inv_ranks = [0]
        for k in range(self.depth):
            off = level_offset(d, k)
            level = [None] * (d**k)
            for r in range(d**k):
                level[r] = invert_perm(self.labels[off + inv_ranks[r]])
            labels.extend(level)
            if k + 1 < self.depth:
                nxt = [0] * (d ** (k + 1))
                for r in range(d**k):
                    label = level[r]  # label of the inverse at rank r
                    for x in range(d):
                        # (r, x) maps under g^-1 to (inv_ranks[r], label[x]-1)
                        nxt[r * d + x] = inv_ranks[r] * d + (label[x] - 1)
                inv_ranks = nxt
        return Portrait(d, self.depth, labels)

    def section(self, v) -> "Portrait":
        """The automorphism induced on the subtree at v, depth - |v| deep."""
        v = check_vertex(self.degree, v)
        if len(v) > self.depth:
            raise DepthExceeded(f"|v| = {len(v)} exceeds depth {self.depth}")
        d = self.degree
        rv = vertex_rank(d, v)
        m = self.depth - len(v)
        labels = []
        for k in range(m):
            off = level_offset(d, len(v) + k)
            base = rv * d**k
            labels.extend(self.labels[off + base : off + base + d**k])
        return Portrait(d, m, labels)

    def truncate(self, k: int) -> "Portrait":
        if k > self.depth:
            raise DepthExceeded(f"cannot truncate depth {self.depth} to {k}")
        return Portrait(self.degree, k, self.labels[: internal_count(self.degree, k)])

    # -- fixed vertices --------------------------------------------------

    def fixed_count(self, n: int) -> int:
        """Number of level-n vertices fixed by this automorphism."""
        return self.fixed_counts(n)[n]

    def fixed_counts(self, n: int):
        """Fixed-vertex counts per level 0..n (fixed vertices form a subtree)."""
        if n > self.depth:
            raise DepthExceeded(f"level {n} exceeds depth {self.depth}")
        d = self.degree
        fixed = [0]  # ranks of fixed vertices at the current level
        counts = [1]
        for k in range(n):
            off = level_offset(d, k)
            nxt = []
            for r in fixed:
                label = self.labels[off + r]
                for x in range(d):
                    if label[x] == x + 1:
                        nxt.append(r * d + x)
            fixed = nxt
            counts.append(len(fixed))
        return counts

    # -- conversions -----------------------------------------------------

    def level_images(self, n: int):
        """0-based image ranks of the level-n vertices (determines the
        portrait down to level n)."""
        if n > self.depth:
            raise DepthExceeded(f"level {n} exceeds depth {self.depth}")
        return self._level_ranks(n)[n]

    @classmethod
    def from_level_images(cls, degree: int, n: int, images) -> "Portrait":
        """Rebuild the depth-n portrait from its level-n action.

        The label of the parent of vertex j is read off as images[j] mod d;
        tree consistency of ``images`` is validated via the permutation check.
        """
        d = degree
        labels = []
        img = list(images)
        if len(img) != d**n:
            raise SchemaError(f"expected {d ** n} images, got {len(img)}")
        per_level = []
        for k in range(n, 0, -1):
            per_level.append(img)
            img = [img[r * d] // d for r in range(len(img) // d)]
        for img in reversed(per_level):
            for r in range(0, len(img), d):
                labels.append(tuple(img[r + x] % d + 1 for x in range(d)))
        # reorder: per_level reversed gives level 1..n; labels of level k-1
        # vertices come from level-k images, already in parent-lex order.
        return cls(degree, n, labels)

    # -- serialization ---------------------------------------------------

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "depth": self.depth,
            "labels": [list(p) for p in self.labels],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "Portrait":
        try:
            return cls(int(doc["degree"]), int(doc["depth"]), doc["labels"])
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"bad portrait document: {exc}") from None

    # -- dunder ----------------------------------------------------------

    def __mul__(self, other):
        return self.compose(other)

    def __eq__(self, other):
        return (
            isinstance(other, Portrait)
            and self.degree == other.degree
            and self.depth == other.depth
            and self.labels == other.labels
        )

    def __hash__(self):
        return hash((self.degree, self.depth, self.labels))

    def __repr__(self):
        return f"Portrait(d={self.degree}, depth={self.depth}, key={self.key().hex()})"

    def is_identity(self) -> bool:
        idp = tuple(range(1, self.degree + 1))
        return all(p == idp for p in self.labels)


def uniform_aut_sample(shape: TreeShape, depth: int, rng: random.Random) -> Portrait:
    """Haar-uniform element of Aut(T^depth): independent uniform labels."""
    d = shape.degree
    labels = []
    for _ in range(internal_count(d, depth)):
        p = list(range(1, d + 1))
        rng.shuffle(p)
        labels.append(tuple(p))
    return Portrait(d, depth, labels)


def all_portraits(degree: int, depth: int):
    """All of Aut(T^depth), lexicographically by label choice.

    There are d!^((d^depth-1)/(d-1)) of them; keep depth small.
    """
    perms = [tuple(p) for p in itertools.permutations(range(1, degree + 1))]
    for choice in itertools.product(perms, repeat=internal_count(degree, depth)):
        yield Portrait(degree, depth, choice)
