"""Ordered Delta-systems and the cleaning step that amalgamates isomorphic conditions.

A sub-family is an *ordered* Delta-system with heart ``H`` when every member
has ``H`` as an initial segment, the blocks ``S - H`` are nonempty, and the
blocks are strictly increasing as intervals:

    max(H) < min(B_0) <= max(B_0) < min(B_1) <= ...

Ordering the blocks this way already makes them pairwise disjoint, so all
pairwise intersections equal the heart.
"""
from __future__ import annotations

from itertools import combinations
from typing import Callable, Iterable, NamedTuple, Sequence

from .algebra import BoolTerm
from .errors import InvalidInput, SearchFailure
from .poset import Condition, amalgamate, iso_map

__all__ = [
    "DeltaSystem", "find_delta_system", "validate_delta_system",
    "clean_and_amalgamate", "empty_v", "first_of_block", "EXHAUSTIVE_LIMIT",
]

EXHAUSTIVE_LIMIT = 20


class DeltaSystem(NamedTuple):
    heart: tuple
    members: tuple     # indices into the input family, in block order
    blocks: tuple


def _normalise(family) -> list:
    out = []
    for s in family:
        s = tuple(int(i) for i in s)
        if list(s) != sorted(set(s)):
            raise InvalidInput(f"family members must be sorted sets: {s}")
        out.append(s)
    return out


def validate_delta_system(family, ds: DeltaSystem) -> bool:
    """Re-check every defining property of ``ds`` against ``family``."""
    sets = [frozenset(s) for s in _normalise(family)]
    heart = frozenset(ds.heart)
    if len(set(ds.members)) != len(ds.members) or len(ds.members) < 2:
        return False
    for a, b in combinations(ds.members, 2):
        if sets[a] & sets[b] != heart:
            return False
    prev = max(heart) if heart else None
    for m, block in zip(ds.members, ds.blocks):
        if tuple(sorted(sets[m] - heart)) != tuple(block) or not block:
            return False
        if prev is not None and block[0] <= prev:
            return False
        prev = block[-1]
    return True


def _block_of(s, heart):
    """The block of ``s`` over ``heart`` if ``heart`` is a proper initial segment of ``s``."""
    k = len(heart)
    if len(s) <= k or s[:k] != heart:
        return None
    return s[k:]


def _exhaustive(sets, k):
    n = len(sets)
    fs = [frozenset(s) for s in sets]

    def extend(chosen, heart):
        if len(chosen) == k:
            blocks = sorted((sets[i][len(heart):], i) for i in chosen)
            hs = tuple(sorted(heart))
            if any(_block_of(sets[i], hs) is None for i in chosen):
                return None
            if any(b0[-1] >= b1[0] for (b0, _), (b1, _) in zip(blocks, blocks[1:])):
                return None
            return DeltaSystem(hs, tuple(i for _, i in blocks), tuple(b for b, _ in blocks))
        start = chosen[-1] + 1 if chosen else 0
        for i in range(start, n - (k - len(chosen)) + 1):
            if heart is None:
                new_heart = fs[chosen[0]] & fs[i] if chosen else None
            else:
                new_heart = heart
            if new_heart is not None:
                if any(fs[c] & fs[i] != new_heart for c in chosen):
                    continue
                hs = tuple(sorted(new_heart))
                if any(_block_of(sets[c], hs) is None for c in chosen + [i]):
                    continue
                # blocks over a common heart must not interleave as intervals
                bi = sets[i][len(hs):]
                if any(not (sets[c][-1] < bi[0] or bi[-1] < sets[c][len(hs)]) for c in chosen):
                    continue
            found = extend(chosen + [i], new_heart)
            if found is not None:
                return found
        return None

    return extend([], None)


def _by_heart(sets, k):
    hearts = sorted({tuple(sorted(set(a) & set(b))) for a, b in combinations(sets, 2)},
                    key=lambda h: (len(h), h))
    for heart in hearts:
        eligible = []
        for i, s in enumerate(sets):
            block = _block_of(s, heart)
            if block is not None:
                eligible.append((block[-1], block[0], i, block))
        # earliest-end interval scheduling maximises the number of ordered blocks
        eligible.sort()
        chosen, last = [], heart[-1] if heart else -1
        for end, start, i, block in eligible:
            if start > last:
                chosen.append((i, block))
                last = end
        if len(chosen) >= k:
            chosen = chosen[:k]
            return DeltaSystem(heart, tuple(i for i, _ in chosen), tuple(b for _, b in chosen))
    return None


def find_delta_system(family: Sequence[Iterable[int]], k: int, method: str = "auto"):
    """A ``k``-member ordered Delta-system inside ``family``, or ``None``.

    ``method`` is ``"exhaustive"`` (backtracking over member combinations),
    ``"greedy"`` (per candidate heart, interval scheduling over the blocks),
    or ``"auto"``, which searches exhaustively up to twenty sets.
    """
    if k < 2:
        raise InvalidInput(f"target size must be at least 2, got {k}")
    sets = _normalise(family)
    if k > len(sets):
        return None
    if method == "auto":
        method = "exhaustive" if len(sets) <= EXHAUSTIVE_LIMIT else "greedy"
    if method == "exhaustive":
        return _exhaustive(sets, k)
    if method == "greedy":
        return _by_heart(sets, k)
    raise InvalidInput(f"unknown search method {method!r}")


# --------------------------------------------------------------------------
# cleaning


def empty_v(cond: Condition, heart) -> tuple:
    return ()


def first_of_block(n: int) -> Callable:
    """Selector taking the first ``n`` generators of a condition's block."""
    def select(cond: Condition, heart):
        block = cond.u[len(heart):]
        if len(block) < n:
            raise InvalidInput(f"block {block} has fewer than {n} generators")
        return block[:n]
    return select


def clean_and_amalgamate(conds: Sequence[Condition], tau_star: BoolTerm,
                         v_selector: Callable = empty_v, width=None) -> Condition:
    """Pick ``t`` pairwise isomorphic conditions over an ordered Delta-system and amalgamate them.

    Conditions are grouped into isomorphism classes in order of first
    appearance; the first class holding a ``t``-member Delta-system wins.
    ``v_selector(part, heart)`` chooses ``v`` in the first selected part and
    the other parts get its image under the isomorphism.
    """
    conds = list(conds)
    if not conds:
        raise SearchFailure("no conditions to clean")
    t = width if width is not None else conds[0].width
    if t is None:
        raise InvalidInput("width is unknown; pass width= for atomic inputs")
    if any(c.width is not None and c.width != t for c in conds):
        raise InvalidInput("conditions of different widths")
    if len(conds) < t:
        raise SearchFailure(f"need at least {t} conditions, got {len(conds)}")

    classes = []
    for c in conds:
        for cls in classes:
            if iso_map(cls[0], c) is not None:
                cls.append(c)
                break
        else:
            classes.append([c])

    for cls in classes:
        if len(cls) < t:
            continue
        ds = find_delta_system([c.u for c in cls], t)
        if ds is None:
            continue
        parts = [cls[m] for m in ds.members]
        v0 = tuple(sorted(v_selector(parts[0], ds.heart)))
        vs = []
        for c in parts:
            H = iso_map(parts[0], c)
            vs.append(tuple(H[i] for i in v0))
        return amalgamate(0, tau_star, ds.heart, list(zip(parts, vs)))
    raise SearchFailure(f"no {t} pairwise isomorphic conditions form an ordered Delta-system")
