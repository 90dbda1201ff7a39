"""Finite quotients of a self-similar group, enumerated exactly.

An element of the level-n quotient is stored as its permutation of the
d^n level-n words (lex order, 0-based); that array determines the whole
depth-n portrait.  Composition "e then g" is the gather g_img[e], which
lets breadth-first closure run over numpy batches.

Element ids are assigned in canonical order: sorted by the byte encoding
of the depth-n label array.  One representative word per element is kept
from the BFS tree (shortest found, generators in declared order).
"""

from __future__ import annotations

import numpy as np

from .errors import BudgetExceeded
from .presentation import WreathPresentation, reduce_word
from .tree import Portrait

DEFAULT_ELEMENT_BUDGET = 2_000_000


def _dtype_for(npoints: int):
    if npoints <= 2**8:
        return np.uint8
    if npoints <= 2**16:
        return np.uint16
    return np.uint32


def _canonical_keys(images: np.ndarray, degree: int) -> np.ndarray:
    """Depth-n label arrays as byte rows, level-major (the canonical key)."""
    parts = []
    img = images
    while img.shape[1] > 1:
        parts.append((img % degree).astype(np.uint8))
        img = img[:, ::degree] // degree
    parts.append((img % degree).astype(np.uint8))
    parts.reverse()
    return np.ascontiguousarray(np.concatenate(parts, axis=1))


def _lex_order(rows: np.ndarray) -> np.ndarray:
    void = rows.view(np.dtype((np.void, rows.dtype.itemsize * rows.shape[1])))
    return np.argsort(void.ravel(), kind="stable")


class FiniteQuotient:
    """The image of the group at one level, with its generator action."""

    def __init__(self, degree, level, gen_words, images, gen_action,
                 projection, rep_parent, rep_via, identity_id):
        self.degree = degree
        self.level = level
        self.gen_words = gen_words
        self.images = images            # (order, d^level) element actions
        self.gen_action = gen_action    # (num gens, order) -> element ids
        self.projection = projection    # (order,) ids in the level-1 quotient
        self.rep_parent = rep_parent
        self.rep_via = rep_via
        self.identity_id = identity_id
        self._ids = None
        self._trunc = {level: images}

    @property
    def order(self) -> int:
        return self.images.shape[0]

    @property
    def n_points(self) -> int:
        return self.images.shape[1]

    def _id_map(self):
        if self._ids is None:
            self._ids = {row.tobytes(): i for i, row in enumerate(self.images)}
        return self._ids

    def id_of_images(self, row) -> int:
        row = np.asarray(row, dtype=self.images.dtype)
        got = self._id_map().get(row.tobytes())
        if got is None:
            raise KeyError("not an element of this quotient")
        return got

    def id_of_portrait(self, p: Portrait) -> int:
        img = np.asarray(p.truncate(self.level).level_images(self.level),
                         dtype=self.images.dtype)
        return self.id_of_images(img)

    def truncated_images(self, k: int) -> np.ndarray:
        """Element actions on level k <= level (cached)."""
        if k not in self._trunc:
            img = self.truncated_images(k + 1)
            self._trunc[k] = img[:, :: self.degree] // self.degree
        return self._trunc[k]

    def element_portrait(self, i: int) -> Portrait:
        return Portrait.from_level_images(self.degree, self.level,
                                          self.images[i].tolist())

    def rep_word(self, i: int) -> tuple:
        if not self.gen_words:
            raise ValueError("quotient was built without generators")
        letters = []
        while i != self.identity_id:
            letters.append(self.gen_words[self.rep_via[i]])
            i = self.rep_parent[i]
        out = []
        for w in reversed(letters):
            out.extend(w)
        return reduce_word(out)

    def compose_ids(self, i: int, j: int) -> int:
        """Id of element_i followed by element_j."""
        return self.id_of_images(self.images[j][self.images[i]])

    def inverse_id(self, i: int) -> int:
        inv = np.empty(self.n_points, dtype=self.images.dtype)
        inv[self.images[i]] = np.arange(self.n_points, dtype=self.images.dtype)
        return self.id_of_images(inv)

    def fixed_count_vector(self, k: int) -> np.ndarray:
        """Number of fixed level-k vertices for every element."""
        img = self.truncated_images(k)
        pts = np.arange(img.shape[1], dtype=img.dtype)
        return (img == pts).sum(axis=1)

    def stabilizer_mask(self, k: int) -> np.ndarray:
        """Boolean mask of the pointwise level-k stabilizer."""
        img = self.truncated_images(k)
        pts = np.arange(img.shape[1], dtype=img.dtype)
        return (img == pts).all(axis=1)

    def is_level_transitive(self) -> bool:
        """Single orbit on level-n words (group closure: one gather column)."""
        return len(np.unique(self.images[:, 0])) == self.n_points

    def to_json(self, include_portraits: bool = False) -> dict:
        doc = {
            "degree": self.degree,
            "level": self.level,
            "order": int(self.order),
            "generators": [" ".join(
                n if e == 1 else n + "'" for n, e in w) for w in self.gen_words],
            "generator_action": self.gen_action.tolist(),
            "projection_to_previous_level": self.projection.tolist(),
            "identity_id": int(self.identity_id),
        }
        if include_portraits:
            doc["portraits"] = [self.element_portrait(i).to_json()["labels"]
                                for i in range(self.order)]
        return doc


def _bfs_level(pres: WreathPresentation, gen_words, level: int, budget: int):
    """Closure of the generator actions at one level; returns discovery-order
    data (rows, action table, BFS parents)."""
    d = pres.degree
    npoints = d**level
    dtype = _dtype_for(npoints)
    gens = [np.asarray(pres.word_portrait(w, level).level_images(level), dtype=dtype)
            for w in gen_words]

    identity = np.arange(npoints, dtype=dtype)
    rows = [identity]
    ids = {identity.tobytes(): 0}
    parent = [0]
    via = [0]
    action = [[] for _ in gens]
    frontier = [0]
    while frontier:
        batch = np.stack([rows[i] for i in frontier])
        next_frontier = []
        for gi, g in enumerate(gens):
            products = g[batch]
            for bi, src in enumerate(frontier):
                key = products[bi].tobytes()
                tid = ids.get(key)
                if tid is None:
                    tid = len(rows)
                    if tid >= budget:
                        raise BudgetExceeded(
                            f"level-{level} quotient exceeds element budget {budget}",
                            partial=tid,
                        )
                    ids[key] = tid
                    rows.append(products[bi])
                    parent.append(src)
                    via.append(gi)
                    next_frontier.append(tid)
                while len(action[gi]) <= src:
                    action[gi].append(-1)
                action[gi][src] = tid
        frontier = next_frontier
    n = len(rows)
    images = np.stack(rows) if n > 1 else identity.reshape(1, -1)
    act = np.full((len(gens), n), -1, dtype=np.int64)
    for gi in range(len(gens)):
        act[gi, : len(action[gi])] = action[gi]
    return images, act, np.asarray(parent), np.asarray(via), ids


def enumerate_tower(pres: WreathPresentation, n: int,
                    element_budget: int = DEFAULT_ELEMENT_BUDGET,
                    gen_words=None, allow_partial: bool = False):
    """Quotients at levels 1..n with canonical ids and projections.

    With ``allow_partial`` the tower stops quietly at the last level that
    fits the element budget instead of raising.
    """
    if n < 1:
        raise ValueError("level must be >= 1")
    if gen_words is None:
        gen_words = [pres.generator_word(g) for g in pres.gen_names]
    gen_words = tuple(pres.check_word(w) for w in gen_words)

    tower = []
    for level in range(1, n + 1):
        try:
            images, act, parent, via, _ = _bfs_level(pres, gen_words, level, element_budget)
        except BudgetExceeded:
            if allow_partial and tower:
                return tower
            raise
        order = _lex_order(_canonical_keys(images, pres.degree))
        new_of_old = np.empty(len(order), dtype=np.int64)
        new_of_old[order] = np.arange(len(order))
        images = np.ascontiguousarray(images[order])
        act = new_of_old[act[:, order]] if act.size else act
        parent = new_of_old[parent[order]]
        via = via[order]
        identity_id = int(new_of_old[0])

        if level == 1:
            projection = np.zeros(len(order), dtype=np.int64)
        else:
            prev = tower[-1]
            down = images[:, :: pres.degree] // pres.degree
            prev_map = prev._id_map()
            projection = np.fromiter(
                (prev_map[row.tobytes()] for row in down.astype(prev.images.dtype)),
                dtype=np.int64, count=len(order),
            )
            counts = np.bincount(projection, minlength=prev.order)
            if len(set(counts.tolist())) != 1:
                raise AssertionError("projection fibers are not equal-sized")

        tower.append(FiniteQuotient(pres.degree, level, gen_words, images, act,
                                    projection, parent, via, identity_id))
    return tower


def enumerate_quotient(pres: WreathPresentation, n: int,
                       element_budget: int = DEFAULT_ELEMENT_BUDGET,
                       gen_words=None) -> FiniteQuotient:
    """The level-n quotient (see enumerate_tower)."""
    return enumerate_tower(pres, n, element_budget, gen_words)[-1]


def exhaustive_tower(degree: int, n: int,
                     element_budget: int = DEFAULT_ELEMENT_BUDGET):
    """The full finite automorphism groups at levels 1..n by listing every
    label assignment (the only route for a group with no finite generating
    set).  Order grows as d!^((d^n-1)/(d-1)): refuse rather than truncate."""
    import math

    from .tree import all_portraits, internal_count

    order_n = math.factorial(degree) ** internal_count(degree, n)
    if order_n > element_budget:
        raise BudgetExceeded(
            f"full automorphism group at level {n} has {order_n} elements",
            partial=0,
        )
    tower = []
    for level in range(1, n + 1):
        dtype = _dtype_for(degree**level)
        images = np.stack([
            np.asarray(p.level_images(level), dtype=dtype)
            for p in all_portraits(degree, level)
        ])
        order = _lex_order(_canonical_keys(images, degree))
        images = np.ascontiguousarray(images[order])
        identity_row = np.arange(degree**level, dtype=dtype)
        identity_id = None
        for i, row in enumerate(images):
            if np.array_equal(row, identity_row):
                identity_id = i
                break
        if level == 1:
            projection = np.zeros(len(images), dtype=np.int64)
        else:
            prev = tower[-1]
            down = images[:, ::degree] // degree
            prev_map = prev._id_map()
            projection = np.fromiter(
                (prev_map[row.tobytes()] for row in down.astype(prev.images.dtype)),
                dtype=np.int64, count=len(images),
            )
        n_el = len(images)
        tower.append(FiniteQuotient(
            degree, level, (), images, np.zeros((0, n_el), dtype=np.int64),
            projection, np.arange(n_el), np.zeros(n_el, dtype=np.int64),
            identity_id,
        ))
    return tower


def check_level_transitive(q: FiniteQuotient) -> bool:
    return q.is_level_transitive()


def subtree_transitivity(pres: WreathPresentation, n: int, depth: int,
                         element_budget: int = DEFAULT_ELEMENT_BUDGET,
                         gen_words=None, tower=None) -> bool:
    """Does the level-n stabilizer act transitively on every level of every
    subtree rooted at level n?  Checked inside the level-(n+depth) quotient."""
    if tower is None:
        tower = enumerate_tower(pres, n + depth, element_budget, gen_words)
    q = tower[n + depth - 1]
    kernel = q.stabilizer_mask(n)
    d = pres.degree
    for j in range(1, depth + 1):
        img = q.truncated_images(n + j)[kernel]
        block = d**j
        for u in range(d**n):
            orbit = np.unique(img[:, u * block])
            if orbit.size != block:
                return False
    return True
