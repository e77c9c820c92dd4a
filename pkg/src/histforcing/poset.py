"""Conditions of the historic forcing at finite width and height.

A condition is either atomic (a single generator) or an amalgam of ``t``
pairwise isomorphic conditions of equal height whose supports form an
ordered Delta-system.  Every condition carries its derived data:

``u``      sorted support (tuple of generator indices)
``table``  the valuation table ``F`` over ``u``
``ht``     construction height
``h``      int array ``(len(u), ht)`` of history values
``g_bits`` 0/1 array ``(len(u), ht)``; together with ``g_terms[beta]`` it
           gives the tag ``g(j, beta) = (g_bits[j, beta], g_terms[beta])``

History values are encoded as integers: ``0..t-1`` for an index, ``t`` for
the theta token and ``t+1`` for the theta+1 token.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from .algebra import BoolTerm, ValuationTable, _canonical_rows, eval_columns, row_keys
from .errors import ClauseViolation, ConsistencyError, InvalidInput, ResourceLimit

__all__ = [
    "Condition", "Atomic", "Amalgam", "atomic", "amalgamate",
    "leq", "leq_pr", "iso_map", "relabel", "transport", "transform",
    "fingerprint", "with_zetas", "theta", "theta_plus_one", "is_index",
    "MAX_HEIGHT", "MAX_ROWS",
]

MAX_HEIGHT = 4
MAX_ROWS = 2 ** 20


def theta(t: int) -> int:
    return t


def theta_plus_one(t: int) -> int:
    return t + 1


def is_index(value, t: int):
    """True where a history value is an index below ``t`` (not a token)."""
    return np.asarray(value) < t


class Condition:
    __slots__ = ("width", "u", "table", "ht", "h", "g_bits", "g_terms", "_pos", "_key", "_hash")

    def _set_derived(self, width, u, table, ht, h, g_bits, g_terms):
        self.width = width
        self.u = tuple(u)
        self.table = table
        self.ht = ht
        self.h = h
        self.g_bits = g_bits
        self.g_terms = tuple(g_terms)
        h.setflags(write=False)
        g_bits.setflags(write=False)
        self._pos = {j: n for n, j in enumerate(self.u)}
        self._key = None
        self._hash = None

    @property
    def is_atomic(self) -> bool:
        return isinstance(self, Atomic)

    @property
    def key(self):
        if self._key is None:
            self._key = self._make_key()
        return self._key

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Condition):
            return NotImplemented
        return self.key == other.key

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.key)
        return self._hash

    def position(self, j: int) -> int:
        try:
            return self._pos[j]
        except KeyError:
            raise InvalidInput(f"generator {j} is not in the support {self.u}") from None

    def history(self, j: int, beta: int) -> int:
        return int(self.h[self.position(j), beta])

    def tag(self, j: int, beta: int):
        return int(self.g_bits[self.position(j), beta]), self.g_terms[beta]

    def history_width(self) -> int:
        """The ``t`` used to encode history tokens (meaningless at height 0)."""
        return self.width if self.width is not None else 2


class Atomic(Condition):
    __slots__ = ("index",)

    def __init__(self, index: int, width=None):
        self.index = int(index)
        if self.index < 0:
            raise InvalidInput(f"generator index must be a natural number, got {index}")
        table = ValuationTable((self.index,), [[0], [1]])
        empty = np.zeros((1, 0), dtype=np.int16)
        self._set_derived(width, (self.index,), table, 0, empty, empty.astype(np.uint8), ())

    def _make_key(self):
        return ("atomic", self.index)

    def __repr__(self):
        return f"atomic({self.index})"


class Amalgam(Condition):
    __slots__ = ("zeta_star", "tau_star", "heart", "parts", "vs")

    @property
    def n_star(self) -> int:
        return self.tau_star.arity

    @property
    def blocks(self):
        k = len(self.heart)
        return [c.u[k:] for c in self.parts]

    def _make_key(self):
        return ("amalgam", self.zeta_star, self.tau_star, self.heart,
                tuple((c.key, v) for c, v in zip(self.parts, self.vs)))

    def __repr__(self):
        return (f"Amalgam(ht={self.ht}, t={self.width}, zeta*={self.zeta_star}, "
                f"tau*={self.tau_star}, u={self.u})")


def atomic(i: int, width=None) -> Atomic:
    return Atomic(i, width)


def _check_width(p: Condition, q: Condition):
    if p.width is not None and q.width is not None and p.width != q.width:
        raise InvalidInput(f"width mismatch: {p.width} vs {q.width}")


# --------------------------------------------------------------------------
# amalgamation


def amalgamate(zeta_star: int, tau_star: BoolTerm, heart: Iterable[int],
               parts: Sequence) -> Amalgam:
    """Build the successor-stage condition from ``t`` pairs ``(child, v)``.

    Validates the four construction clauses in order and raises
    :class:`ClauseViolation` naming the first that fails.
    """
    parts = [(c, tuple(int(i) for i in v)) for c, v in parts]
    t = len(parts)
    heart = tuple(int(i) for i in heart)

    # (alpha)
    if t < 2:
        raise ClauseViolation("alpha", f"width must be at least 2, got {t}")
    if not isinstance(tau_star, BoolTerm):
        raise ClauseViolation("alpha", f"tau* must be a Boolean term, got {tau_star!r}")
    if not isinstance(zeta_star, (int, np.integer)) or not 0 <= zeta_star < t:
        raise ClauseViolation("alpha", f"zeta* must lie in [0, {t}), got {zeta_star}")
    if list(heart) != sorted(set(heart)):
        raise ClauseViolation("alpha", f"heart must be strictly increasing: {heart}")
    n_star = tau_star.arity

    # (beta)
    children = [c for c, _ in parts]
    if not all(isinstance(c, Condition) for c in children):
        raise ClauseViolation("beta", "every part must be a condition")
    alpha = children[0].ht
    for xi, (c, v) in enumerate(parts):
        if c.ht != alpha:
            raise ClauseViolation("beta", f"part {xi} has height {c.ht}, part 0 has {alpha}")
        if c.width is not None and c.width != t:
            raise ClauseViolation("beta", f"part {xi} has width {c.width}, amalgam has {t}")
        if list(v) != sorted(set(v)):
            raise ClauseViolation("beta", f"v_{xi} must be strictly increasing: {v}")
        if len(v) != n_star:
            raise ClauseViolation("beta", f"|v_{xi}| = {len(v)} but tau* has arity {n_star}")
        if not set(v) <= set(c.u):
            raise ClauseViolation("beta", f"v_{xi} = {v} is not inside the support {c.u}")
    if alpha + 1 > MAX_HEIGHT:
        raise ResourceLimit(f"height {alpha + 1} exceeds the limit {MAX_HEIGHT}")

    # (gamma)
    hs = set(heart)
    k = len(heart)
    prev_max = heart[-1] if heart else None
    for xi, c in enumerate(children):
        if tuple(c.u[:k]) != heart or (set(c.u) & hs) != hs:
            raise ClauseViolation(
                "gamma", f"heart {heart} is not an initial segment of the support of part {xi}")
        block = c.u[k:]
        if not block:
            raise ClauseViolation("gamma", f"part {xi} adds no generator outside the heart")
        if prev_max is not None and block[0] <= prev_max:
            raise ClauseViolation(
                "gamma", f"block of part {xi} starts at {block[0]}, not above {prev_max}")
        prev_max = block[-1]
    # ordering makes blocks disjoint, so pairwise intersections are the heart

    # (delta)
    c0, v0 = parts[0]
    v0_pos = [c0.position(i) for i in v0]
    for xi in range(1, t):
        c, v = parts[xi]
        if len(c.u) != len(c0.u):
            raise ClauseViolation("delta", f"part {xi} has a support of different size")
        if not np.array_equal(c.table.rows, c0.table.rows):
            raise ClauseViolation("delta", f"table of part {xi} is not the transported table of part 0")
        if [c.position(i) for i in v] != v0_pos:
            raise ClauseViolation("delta", f"v_{xi} is not the image of v_0")
        if (not np.array_equal(c.h, c0.h) or not np.array_equal(c.g_bits, c0.g_bits)
                or c.g_terms != c0.g_terms):
            raise ClauseViolation("delta", f"histories of part {xi} differ from part 0")

    u = heart + tuple(i for c in children for i in c.u[k:])
    table = ValuationTable._trusted(u, _amalgam_table(c0.table.rows, k, t, tau_star, v0_pos))

    ht = alpha + 1
    h = np.empty((len(u), ht), dtype=np.int16)
    g_bits = np.empty((len(u), ht), dtype=np.uint8)
    m = len(c0.u)
    b = m - k
    v0_mask = np.zeros(m, dtype=np.uint8)
    v0_mask[v0_pos] = 1
    for xi, c in enumerate(children):
        rows = np.r_[np.arange(k), k + xi * b + np.arange(b)]
        h[rows, :alpha] = c.h
        g_bits[rows, :alpha] = c.g_bits
        h[k + xi * b: k + (xi + 1) * b, alpha] = t + 1 if xi == zeta_star else xi
        g_bits[rows, alpha] = v0_mask
    h[:k, alpha] = t

    p = Amalgam.__new__(Amalgam)
    p.zeta_star = int(zeta_star)
    p.tau_star = tau_star
    p.heart = heart
    p.parts = tuple(children)
    p.vs = tuple(v for _, v in parts)
    p._set_derived(t, u, table, ht, h, g_bits, c0.g_terms + (tau_star,))
    return p


def _maj_count(z: int, o: int):
    """Numbers of index triples over rows with term value 0 (z rows) or 1 (o rows)
    whose majority is 0, resp. 1."""
    return z ** 3 + 3 * z * z * o, o ** 3 + 3 * o * o * z


def _amalgam_table(child_rows: np.ndarray, k: int, t: int, tau: BoolTerm, v_pos) -> np.ndarray:
    """Canonical amalgam rows; amalgams rebuilt from equal inputs share one computation."""
    return _amalgam_cached(child_rows.shape, child_rows.tobytes(), k, t, tau, tuple(v_pos))


@lru_cache(maxsize=64)
def _amalgam_cached(shape, data, k, t, tau, v_pos):
    child_rows = np.frombuffer(data, dtype=np.uint8).reshape(shape)
    rows = _canonical_rows(_amalgam_rows(child_rows, k, t, tau, v_pos))
    rows.setflags(write=False)
    return rows


def _amalgam_rows(rows: np.ndarray, k: int, t: int, tau: BoolTerm, v_pos) -> np.ndarray:
    """Rows over heart + blocks whose restriction to every part lies in the
    (common) child table and whose majority values over consecutive triples of
    parts are non-decreasing."""
    tv = eval_columns(tau, [rows[:, p] for p in v_pos], len(rows))
    n_triples = t // 3
    tail = t - 3 * n_triples
    if k:
        _, group = np.unique(row_keys(rows[:, :k]), return_inverse=True)
        groups = [np.flatnonzero(group == gi) for gi in range(group.max() + 1)]
    else:
        groups = [np.arange(len(rows))]

    total = 0
    for g in groups:
        o = int(tv[g].sum())
        c0, c1 = _maj_count(len(g) - o, o)
        total += sum(c0 ** s * c1 ** (n_triples - s) for s in range(n_triples + 1)) * len(g) ** tail
        if total > MAX_ROWS:
            raise ResourceLimit(f"amalgam table would exceed {MAX_ROWS} rows")
    if total == 0:
        raise ConsistencyError("amalgam table is empty")

    out = []
    block_rows = rows[:, k:]
    for g in groups:
        factor = {0: None, 1: None}
        if n_triples:
            trip = g[_grid(len(g), 3)]
            t3 = tv[trip]
            maj = (t3.sum(axis=1) >= 2)
            factor = {0: trip[~maj], 1: trip[maj]}
        for s in range(n_triples + 1):
            factors = [factor[0]] * s + [factor[1]] * (n_triples - s) + [g[:, None]] * tail
            idx = _grid_factors(factors)
            if idx.shape[0] == 0:
                continue
            blocks = block_rows[idx]  # (N, t, b)
            heart_bits = np.broadcast_to(rows[g[0], :k], (idx.shape[0], k))
            out.append(np.concatenate([heart_bits, blocks.reshape(idx.shape[0], -1)], axis=1))
    return np.concatenate(out)


def _grid(n, d):
    """All ``d``-tuples over ``range(n)`` in lexicographic order, shape ``(n**d, d)``."""
    return np.indices((n,) * d).reshape(d, -1).T


def _grid_factors(factors):
    idx = np.zeros((1, 0), dtype=np.int64)
    for f in factors:
        n, m = idx.shape[0], f.shape[0]
        idx = np.concatenate([np.repeat(idx, m, axis=0), np.tile(f, (n, 1))], axis=1)
    return idx


# --------------------------------------------------------------------------
# order relations


def leq(p: Condition, q: Condition) -> bool:
    """The extension preorder: ``q`` is stronger than (or equal to) ``p``."""
    _check_width(p, q)
    return _leq(p, q)


def _leq(p, q):
    if p == q:
        return True
    if q.ht == 0 or not set(p.u) <= set(q.u):
        return False
    if p.ht < q.ht:
        return any(_leq(p, c) for c in q.parts)
    if p.ht == q.ht:
        # parallel amalgams; zeta* may differ
        return (p.tau_star == q.tau_star and p.heart == q.heart and p.vs == q.vs
                and all(pc.u == qc.u and _leq(pc, qc) for pc, qc in zip(p.parts, q.parts)))
    return False


def leq_pr(p: Condition, q: Condition) -> bool:
    """The pure extension order, which follows the zeta*-spine of ``q``."""
    _check_width(p, q)
    while True:
        if p == q:
            return True
        if q.ht <= p.ht:
            return False
        q = q.parts[q.zeta_star]


# --------------------------------------------------------------------------
# isomorphism and transport


def iso_map(p: Condition, q: Condition):
    """The order isomorphism ``u^p -> u^q`` if ``p`` and ``q`` are isomorphic, else ``None``.

    Isomorphism means equal height, equal support size and equal histories
    ``h`` and tags ``g`` along the order isomorphism.  When it succeeds, the
    tables are also checked to correspond under the map.
    """
    if p.width is not None and q.width is not None and p.width != q.width:
        return None
    if p.ht != q.ht or len(p.u) != len(q.u):
        return None
    if (not np.array_equal(p.h, q.h) or not np.array_equal(p.g_bits, q.g_bits)
            or p.g_terms != q.g_terms):
        return None
    if not np.array_equal(p.table.rows, q.table.rows):
        raise ConsistencyError(
            f"isomorphic conditions with non-corresponding tables: {p!r}, {q!r}")
    return dict(zip(p.u, q.u))


def relabel(p: Condition, mapping: Mapping[int, int]) -> Condition:
    """Copy of ``p`` with every generator index ``i`` replaced by ``mapping[i]``.

    The mapping must be strictly increasing on ``u^p``; all derived data is
    positional and therefore carried over unchanged.
    """
    image = [mapping[i] for i in p.u]
    if any(a >= b for a, b in zip(image, image[1:])):
        raise InvalidInput("relabeling map is not order preserving on the support")
    return _relabel(p, mapping)


def _relabel(p, mapping):
    if p.is_atomic:
        return Atomic(mapping[p.index], p.width)
    q = Amalgam.__new__(Amalgam)
    q.zeta_star = p.zeta_star
    q.tau_star = p.tau_star
    q.heart = tuple(mapping[i] for i in p.heart)
    q.parts = tuple(_relabel(c, mapping) for c in p.parts)
    q.vs = tuple(tuple(mapping[i] for i in v) for v in p.vs)
    q._set_derived(p.width, [mapping[i] for i in p.u],
                   ValuationTable._trusted([mapping[i] for i in p.u], p.table.rows),
                   p.ht, p.h, p.g_bits, p.g_terms)
    return q


def transport(H: Mapping[int, int], p0: Condition, q0: Condition, q1: Condition) -> Condition:
    """The unique ``p1 <= q1`` such that ``H`` restricted to ``u^p0`` is the
    isomorphism from ``p0`` to ``p1``."""
    expected = iso_map(q0, q1)
    if expected is None or dict(H) != expected:
        raise InvalidInput("H is not the isomorphism from q0 to q1")
    if not leq(p0, q0):
        raise InvalidInput("p0 is not below q0")
    p1 = _relabel(p0, H)
    if not _leq(p1, q1):
        raise ConsistencyError("transported condition is not below q1")
    return p1


# --------------------------------------------------------------------------
# p-transformation


def transform(p: Condition, q: Condition) -> Condition:
    """Rewrite the zeta* choices of ``q`` so that ``p`` becomes a pure predecessor."""
    if not leq(p, q):
        raise InvalidInput("transform needs p <= q")
    return _transform(p, q)


def _transform(p, q):
    if q.ht == 0:
        return p
    if p.ht < q.ht:
        # prefer the official part so that pure extensions of q transform coherently
        if _leq(p, q.parts[q.zeta_star]):
            xi_star = q.zeta_star
        else:
            xi_star = next(xi for xi, c in enumerate(q.parts) if _leq(p, c))
        src = q.parts[xi_star]
        new_parts = []
        for c, v in zip(q.parts, q.vs):
            moved = p if c is src else _relabel(p, iso_map(src, c))
            new_parts.append((_transform(moved, c), v))
        return amalgamate(xi_star, q.tau_star, q.heart, new_parts)
    new_parts = [(_transform(pc, qc), v) for pc, qc, v in zip(p.parts, q.parts, q.vs)]
    return amalgamate(p.zeta_star, q.tau_star, q.heart, new_parts)


# --------------------------------------------------------------------------
# misc


def fingerprint(p: Condition, j: int) -> frozenset:
    """Levels at which the history of ``j`` is an index rather than a token."""
    row = p.h[p.position(j)]
    return frozenset(int(b) for b in np.flatnonzero(row < p.history_width()))


def fingerprint_masks(p: Condition) -> np.ndarray:
    """Bitmask (bit beta) of the fingerprint of every support element, in support order."""
    if p.ht == 0:
        return np.zeros(len(p.u), dtype=np.int64)
    idx = (p.h < p.history_width()).astype(np.int64)
    return idx @ (np.int64(1) << np.arange(p.ht, dtype=np.int64))


def with_zetas(p: Condition, zetas: Sequence[int]) -> Condition:
    """Rebuild ``p`` choosing ``zetas[beta]`` as the official part at every
    level-``beta`` amalgamation (uniformly across components)."""
    if len(zetas) != p.ht:
        raise InvalidInput(f"need {p.ht} zeta values, got {len(zetas)}")
    if p.is_atomic:
        return p
    parts = [(with_zetas(c, zetas[:-1]), v) for c, v in zip(p.parts, p.vs)]
    return amalgamate(zetas[-1], p.tau_star, p.heart, parts)
