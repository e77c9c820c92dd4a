"""Components, closed level sets, U-sets, signatures and the flip map."""
from __future__ import annotations

from typing import Iterable, NamedTuple

import numpy as np

from .algebra import BoolTerm
from .errors import ConsistencyError, InvalidInput
from .poset import Condition, fingerprint_masks

__all__ = [
    "components", "pr_component", "is_p_closed", "close", "closed_sets",
    "U_set", "SignatureEntry", "upsilon", "u_iso", "flip", "flip_rows",
    "admissible_pairs", "signature_entry", "level_map_is_identity_on_overlap",
]


def _levels(p: Condition, Z: Iterable[int]) -> tuple:
    Z = tuple(sorted(set(int(z) for z in Z)))
    if any(not 0 <= z < p.ht for z in Z):
        raise InvalidInput(f"levels {Z} are not all below the height {p.ht}")
    return Z


def components(p: Condition, alpha: int) -> list:
    """The ``alpha``-components of ``p``: its height-``alpha`` constituents.

    Listed once each (heart material makes parts share sub-conditions), in
    order of first appearance.
    """
    if not 0 <= alpha <= p.ht:
        raise InvalidInput(f"alpha = {alpha} is outside [0, {p.ht}]")
    if alpha == p.ht:
        return [p]
    if alpha == p.ht - 1:
        return list(dict.fromkeys(p.parts))
    return list(dict.fromkeys(q for c in p.parts for q in components(c, alpha)))


def pr_component(p: Condition, alpha: int) -> Condition:
    """The unique ``alpha``-component purely below ``p`` (down the zeta*-spine)."""
    if not 0 <= alpha <= p.ht:
        raise InvalidInput(f"alpha = {alpha} is outside [0, {p.ht}]")
    while p.ht > alpha:
        p = p.parts[p.zeta_star]
    return p


def _demanded(q: Condition) -> set:
    """Levels below ``ht(q) - 1`` that the top level of amalgam ``q`` pulls into a closed set."""
    official = q.parts[q.zeta_star]
    k = len(q.heart)
    witnesses = set(q.vs[q.zeta_star]) | {official.u[k]}
    rows = official.h[[official.position(j) for j in sorted(witnesses)]]
    return {int(b) for b in np.flatnonzero((rows < q.width).any(axis=0))}


def is_p_closed(p: Condition, Z: Iterable[int]) -> bool:
    Z = set(_levels(p, Z))
    while p.ht > 0:
        alpha = p.ht - 1
        if alpha in Z and not _demanded(p) <= Z:
            return False
        p = p.parts[p.zeta_star]
    return True


def close(p: Condition, w: Iterable[int]) -> tuple:
    """Least ``p``-closed set of levels containing ``w``."""
    Z = set(_levels(p, w))
    # demands only point downwards, so one top-down sweep reaches the fixpoint
    q = p
    while q.ht > 0:
        if q.ht - 1 in Z:
            Z |= _demanded(q)
        q = q.parts[q.zeta_star]
    return tuple(sorted(Z))


def closed_sets(p: Condition) -> list:
    """All ``p``-closed subsets of ``[0, ht(p))``, in order of bitmask."""
    out = []
    for mask in range(2 ** p.ht):
        Z = [b for b in range(p.ht) if mask >> b & 1]
        if is_p_closed(p, Z):
            out.append(tuple(Z))
    return out


def _require_closed(p, Z):
    Z = _levels(p, Z)
    if not is_p_closed(p, Z):
        raise InvalidInput(f"levels {Z} are not closed for the condition")
    return Z


def U_set(p: Condition, Z: Iterable[int]) -> tuple:
    """Generators of ``p`` whose whole index history lies inside the closed set ``Z``."""
    Z = _require_closed(p, Z)
    zmask = sum(1 << z for z in Z)
    masks = fingerprint_masks(p)
    return tuple(j for j, m in zip(p.u, masks) if int(m) & ~zmask == 0)


class SignatureEntry(NamedTuple):
    zeta: int
    tau: BoolTerm
    n: int
    g: tuple
    h_vectors: tuple


def signature_entry(q: Condition, earlier: tuple) -> SignatureEntry:
    """The entry read off an amalgam ``q`` given the earlier levels of the closed set."""
    k = len(q.heart)
    official = q.parts[q.zeta_star]
    i0 = official.u[k]
    lower = list(earlier)
    g = tuple(int(q.h[q.position(i0), b]) for b in lower)
    hv = tuple(tuple(int(q.h[q.position(j), b]) for b in lower) for j in q.vs[q.zeta_star])
    return SignatureEntry(q.zeta_star, q.tau_star, q.n_star, g, hv)


def upsilon(p: Condition, Z: Iterable[int]) -> tuple:
    """Signature of the closed set ``Z``: one entry per level, read off the
    components just above that level.

    Each entry is computed from the component purely below ``p`` and compared
    with the entry of one other component of the same height.
    """
    Z = _require_closed(p, Z)
    out = []
    for ell, a in enumerate(Z):
        comps = components(p, a + 1)
        official = pr_component(p, a + 1)
        entry = signature_entry(official, Z[:ell])
        other = next((c for c in comps if c is not official and c != official), None)
        if other is not None and signature_entry(other, Z[:ell]) != entry:
            raise ConsistencyError(f"signature entry at level {a} depends on the component")
        out.append(entry)
    return tuple(out)


def u_iso(p: Condition, Z0: Iterable[int], Z1: Iterable[int]) -> dict:
    """Order isomorphism between the U-sets of two closed sets with equal signatures.

    Raises :class:`ConsistencyError` if the U-sets differ in size or the map
    fails to carry the history at the ``l``-th level of ``Z0`` to the history
    at the ``l``-th level of ``Z1``.
    """
    Z0, Z1 = _require_closed(p, Z0), _require_closed(p, Z1)
    if len(Z0) != len(Z1) or upsilon(p, Z0) != upsilon(p, Z1):
        raise InvalidInput("closed sets have different signatures")
    U0, U1 = U_set(p, Z0), U_set(p, Z1)
    if len(U0) != len(U1):
        raise ConsistencyError(
            f"equal signatures but U-sets of sizes {len(U0)} and {len(U1)}")
    pi = dict(zip(U0, U1))
    if U0:
        h0 = p.h[np.ix_([p.position(i) for i in U0], list(Z0))]
        h1 = p.h[np.ix_([p.position(i) for i in U1], list(Z1))]
        bad = np.flatnonzero((h0 != h1).any(axis=1))
        if bad.size:
            i = U0[bad[0]]
            raise ConsistencyError(f"order isomorphism breaks histories at generator {i}")
    return pi


def flip_rows(p: Condition, pi: dict, rows: np.ndarray) -> np.ndarray:
    """Apply the flip map to every row of ``rows`` (columns in support order).

    ``G(f)(j)`` is ``f(pi(j))`` on the domain of ``pi``, ``f(pi^-1(j))`` on the
    rest of its range, and 0 elsewhere.
    """
    out = np.zeros_like(rows)
    for i, j in pi.items():
        out[:, p.position(i)] = rows[:, p.position(j)]
    for i, j in pi.items():
        if j not in pi:
            out[:, p.position(j)] = rows[:, p.position(i)]
    return out


def flip(p: Condition, Z0: Iterable[int], Z1: Iterable[int], f) -> dict:
    """The flip of one assignment ``f`` of ``F^p`` along ``u_iso(p, Z0, Z1)``."""
    if f not in p.table:
        raise InvalidInput("assignment is not a row of the condition's table")
    pi = u_iso(p, Z0, Z1)
    row = np.array([[int(f[j]) for j in p.u]], dtype=np.uint8)
    return dict(zip(p.u, (int(b) for b in flip_rows(p, pi, row)[0])))


def level_map_is_identity_on_overlap(Z0, Z1) -> bool:
    """Whether the order isomorphism ``Z0 -> Z1`` fixes every level in both sets."""
    return all(Z1[Z0.index(z)] == z for z in set(Z0) & set(Z1))


def admissible_pairs(p: Condition) -> list:
    """Ordered pairs of closed sets usable for the flip map.

    Both sets have the same size and signature, and the order isomorphism
    between them fixes their common levels.
    """
    cs = closed_sets(p)
    sig = {Z: upsilon(p, Z) for Z in cs}
    return [(Z0, Z1) for Z0 in cs for Z1 in cs
            if len(Z0) == len(Z1) and sig[Z0] == sig[Z1]
            and level_map_is_identity_on_overlap(Z0, Z1)]
