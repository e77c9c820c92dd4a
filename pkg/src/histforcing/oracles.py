"""Brute-force reference computations in plain Python.

Nothing here touches numpy or the table machinery of :mod:`algebra` and
:mod:`poset`; these routines re-derive answers straight from the
definitions so that the fast paths can be checked against them.
"""
from __future__ import annotations

from itertools import combinations, product

from .algebra import And, Const, Not, Var


def eval_bits(term, bits) -> int:
    if isinstance(term, Const):
        return term.value
    if isinstance(term, Var):
        return bits[term.slot]
    if isinstance(term, Not):
        return 1 - eval_bits(term.arg, bits)
    a, b = eval_bits(term.left, bits), eval_bits(term.right, bits)
    return a & b if isinstance(term, And) else a | b


def majority(a, b, c) -> int:
    return 1 if a + b + c >= 2 else 0


def in_table(p, f: dict) -> bool:
    """Membership of ``f`` (a dict over at least ``u^p``) in ``F^p``, by recursion on the definition."""
    if p.ht == 0:
        return f[p.index] in (0, 1)
    if not all(in_table(c, f) for c in p.parts):
        return False
    taus = [eval_bits(p.tau_star, [f[i] for i in v]) for v in p.vs]
    majs = [majority(*taus[3 * m: 3 * m + 3]) for m in range(len(taus) // 3)]
    return all(a <= b for a, b in zip(majs, majs[1:]))


def brute_force_rows(p) -> list:
    """Every member of ``F^p`` as a tuple in support order, by filtering all of ``2^u``."""
    return [bits for bits in product((0, 1), repeat=len(p.u))
            if in_table(p, dict(zip(p.u, bits)))]


# --- the algebra as a field of subsets of the row set ------------------------


def row_set_value(term, args, rows, domain) -> int:
    """The element ``term(x_a : a in args)`` as a bitmask over row indices.

    Generator ``x_a`` is the set of rows that give ``a`` the value 1; the
    Boolean operations are intersection, union and complement.
    """
    full = (1 << len(rows)) - 1
    pos = {d: n for n, d in enumerate(domain)}

    def gen(a):
        return sum(1 << r for r, row in enumerate(rows) if row[pos[a]])

    def go(t):
        if isinstance(t, Const):
            return full if t.value else 0
        if isinstance(t, Var):
            return gen(args[t.slot])
        if isinstance(t, Not):
            return full & ~go(t.arg)
        a, b = go(t.left), go(t.right)
        return a & b if isinstance(t, And) else a | b

    return go(term)


def partition_generates(rows, domain, j, v) -> bool:
    """``x_j`` in the subalgebra generated by ``x_v``: rows agreeing on ``v`` agree on ``j``."""
    pos = {d: n for n, d in enumerate(domain)}
    seen = {}
    for row in rows:
        key = tuple(row[pos[i]] for i in sorted(v))
        if seen.setdefault(key, row[pos[j]]) != row[pos[j]]:
            return False
    return True


def delta_system_exhaustive(family, k):
    """First ``k``-subfamily (in combination order) forming an ordered Delta-system, or None."""
    sets = [frozenset(s) for s in family]
    for combo in combinations(range(len(sets)), k):
        heart = sets[combo[0]] & sets[combo[1]]
        ok = True
        for a, b in combinations(combo, 2):
            if sets[a] & sets[b] != heart:
                ok = False
                break
        if not ok:
            continue
        blocks = sorted((sorted(sets[i] - heart), i) for i in combo)
        if any(not b for b, _ in blocks):
            continue
        if heart and max(heart) >= blocks[0][0][0]:
            continue
        if any(b1[-1] >= b2[0] for (b1, _), (b2, _) in zip(blocks, blocks[1:])):
            continue
        return sorted(heart), [i for _, i in blocks]
    return None


# --- histories and closed sets, straight from the recursive definitions ------


def history_tables(p):
    """``(h, g)`` as dicts ``{(j, beta): value}``, rebuilt level by level.

    ``h`` values use the integer encoding (``t`` and ``t+1`` for the tokens);
    ``g`` values are pairs ``(bit, term)``.
    """
    if p.ht == 0:
        return {}, {}
    t = len(p.parts)
    alpha = p.ht - 1
    h, g = {}, {}
    for xi, (c, v) in enumerate(zip(p.parts, p.vs)):
        ch, cg = history_tables(c)
        h.update(ch)
        g.update(cg)
        for j in c.u:
            if j in p.heart:
                h[j, alpha] = t
            elif xi == p.zeta_star:
                h[j, alpha] = t + 1
            else:
                h[j, alpha] = xi
            g[j, alpha] = (1 if j in v else 0, p.tau_star)
    return h, g


def is_closed_def(p, Z) -> bool:
    """The closedness predicate, clause by clause."""
    Z = set(Z)
    if p.ht == 0:
        return True
    alpha = p.ht - 1
    official = p.parts[p.zeta_star]
    if not is_closed_def(official, Z):
        return False
    if alpha not in Z:
        return True
    t = len(p.parts)
    block_min = min(set(official.u) - set(p.heart))
    witnesses = set(p.vs[p.zeta_star]) | {block_min}
    oh, _ = history_tables(official)
    demanded = {beta for beta in range(alpha) for j in witnesses if oh[j, beta] < t}
    return demanded <= Z


def u_set_def(p, Z) -> list:
    t = p.width or 2
    h, _ = history_tables(p)
    return [j for j in p.u if all(beta in Z for beta in range(p.ht) if h[j, beta] < t)]
