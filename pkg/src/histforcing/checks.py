"""Check batteries pairing library computations with independent oracles.

Every check takes a condition and returns a :class:`CheckReport`.  A check
never raises on a property failure: the verdict is ``"fail"`` and the
report carries a counterexample that can be replayed (a generator pair, a
level set, an assignment, ...).  Budgets and seeds are explicit arguments
so a report is reproducible from ``(condition, arguments)`` alone.
"""
from __future__ import annotations

import copy
import time
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Optional

import numpy as np

from . import oracles
from .algebra import (BoolTerm, TermInstance, elem_le, elem_lt, in_generated,
                      instance_column, instance_in_generated, longest_chain, sigma_maj)
from .errors import ConsistencyError, InvalidInput, PreconditionViolation
from .generate import TERM_POOLS, SplitMix64
from .poset import (Condition, _relabel, fingerprint_masks, iso_map, leq, leq_pr,
                    transform, transport, with_zetas)
from .serialize import condition_id, dumps, loads
from .signatures import (U_set, admissible_pairs, close, closed_sets, components,
                         flip_rows, is_p_closed, level_map_is_identity_on_overlap,
                         pr_component, signature_entry, u_iso, upsilon)

__all__ = [
    "CheckReport", "run_suite", "SUITE",
    "check_construction", "check_history", "check_generator_independence",
    "build_maj_chain", "check_maj_chain", "check_components", "check_closed_sets",
    "check_signature_iso", "check_flip_closure", "check_chain_collapse",
    "check_chain_collapse_all", "check_transform", "check_iso_transport",
    "check_order_relations", "corrupt_history", "misaligned_map",
    "transform_pairs",
]

EXACT_TABLE_LIMIT = 12      # supports up to this size are compared with the full brute force
ORACLE_ROW_LIMIT = 4096     # pure-Python row oracles run below this many rows
ORACLE_SAMPLES = 128


@dataclass
class CheckReport:
    name: str
    condition: str
    verdict: str
    counterexample: Optional[dict] = None
    ms: float = 0.0
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_json(self) -> dict:
        return {"name": self.name, "verdict": self.verdict,
                "counterexample": _plain(self.counterexample), "ms": round(self.ms, 3)}


def _plain(x):
    """JSON-friendly copy: tuples become lists, numpy scalars become ints, terms become strings."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = sorted(x) if isinstance(x, (set, frozenset)) else x
        return [_plain(v) for v in items]
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, BoolTerm):
        return str(x)
    return x


def _cid(p: Condition) -> str:
    try:
        return condition_id(p, p.width or 2)
    except Exception:
        return "unserializable"


def _run(name: str, p: Condition, body: Callable, *args, **kwargs) -> CheckReport:
    t0 = time.perf_counter()
    details = {}
    try:
        cex = body(p, details, *args, **kwargs)
    except (ConsistencyError, InvalidInput) as exc:
        cex = {"error": type(exc).__name__, "message": str(exc)}
    ms = (time.perf_counter() - t0) * 1000
    return CheckReport(name, _cid(p), "pass" if cex is None else "fail", cex, ms, details)


def _walk(p: Condition, path=()):
    """Every node of the construction tree with its path of part indices, preorder."""
    yield path, p
    if not p.is_atomic:
        for xi, c in enumerate(p.parts):
            yield from _walk(c, path + (xi,))


def _node_at(p: Condition, path):
    for xi in path:
        p = p.parts[xi]
    return p


def _spread(items, cap):
    """Up to ``cap`` items evenly spaced through ``items`` (deterministic)."""
    if len(items) <= cap:
        return list(items)
    idx = sorted({round(k * (len(items) - 1) / (cap - 1)) for k in range(cap)})
    return [items[i] for i in idx]


def _row_dict(p: Condition, row) -> dict:
    return {int(j): int(b) for j, b in zip(p.u, row)}


def _shifted_zetas(p: Condition):
    """Variant of ``p`` choosing the next part as official at every level."""
    return with_zetas(p, [(z + 1) % p.width for z in _spine_zetas(p)])


def _spine_zetas(p: Condition):
    out = []
    while not p.is_atomic:
        out.append(p.zeta_star)
        p = p.parts[0]
    return out[::-1]


# --------------------------------------------------------------------------
# construction


def _construction(p, details, seed=0):
    if len(p.table) == 0:
        return {"clause": "nonempty"}
    q = loads(dumps(p, p.width or 2))
    for name in ("u", "ht", "g_terms"):
        if getattr(p, name) != getattr(q, name):
            return {"clause": "round_trip", "field": name}
    for name in ("h", "g_bits"):
        if not np.array_equal(getattr(p, name), getattr(q, name)):
            return {"clause": "round_trip", "field": name}
    if not np.array_equal(p.table.rows, q.table.rows):
        return {"clause": "round_trip", "field": "table"}

    if len(p.u) <= EXACT_TABLE_LIMIT:
        expected = oracles.brute_force_rows(p)
        got = [tuple(int(b) for b in r) for r in p.table.rows]
        details["oracle"] = "exhaustive"
        if expected != got:
            extra = sorted(set(got) - set(expected))
            missing = sorted(set(expected) - set(got))
            row = (extra or missing)[0]
            return {"clause": "table", "f": dict(zip(p.u, row)),
                    "in_table": bool(extra), "by_definition": bool(missing)}
        return None

    details["oracle"] = "sampled"
    rng = SplitMix64(seed)
    for _ in range(ORACLE_SAMPLES):
        row = p.table.rows[rng.below(len(p.table))]
        f = _row_dict(p, row)
        if not oracles.in_table(p, f):
            return {"clause": "table", "f": f, "in_table": True, "by_definition": False}
    for _ in range(ORACLE_SAMPLES):
        bits = [rng.below(2) for _ in p.u]
        f = dict(zip(p.u, bits))
        if (f in p.table) != oracles.in_table(p, f):
            return {"clause": "table", "f": f, "in_table": f in p.table,
                    "by_definition": oracles.in_table(p, f)}
    return None


def check_construction(p: Condition, seed: int = 0) -> CheckReport:
    """Nonempty table, faithful serialization round trip, and the table
    against the recursive definition of its members."""
    return _run("construction", p, _construction, seed)


# --------------------------------------------------------------------------
# histories


def _below(p):
    """Every node lies below ``p`` with a smaller support and the restricted table;
    the equal-height variant with other official parts is below in both directions."""
    for path, c in _walk(p):
        if not leq(c, p):
            return {"path": path}
        if not set(c.u) <= set(p.u) or c.ht > p.ht:
            return {"path": path, "reason": "support or height"}
        if p.table.restrict(c.u) != c.table:
            return {"path": path, "reason": "table is not the restriction"}
    if p.ht:
        q = _shifted_zetas(p)
        if not (leq(p, q) and leq(q, p)):
            return {"reason": "equal-height extension is not reversible", "zetas": _spine_zetas(q)}
    return None


def _value_range(p):
    t = p.history_width()
    bad = np.argwhere((p.h < 0) | (p.h > t + 1))
    if bad.size:
        j, beta = bad[0]
        return {"j": p.u[j], "beta": int(beta), "value": int(p.h[j, beta])}
    return None


def _pure_tokens(p):
    """Generators of a pure predecessor carry tokens at every level from its height up."""
    t = p.history_width()
    for a in range(p.ht):
        c = pr_component(p, a)
        rows = [p.position(i) for i in c.u]
        bad = np.argwhere(p.h[np.ix_(rows, range(a, p.ht))] < t)
        if bad.size:
            r, b = bad[0]
            return {"j": c.u[r], "beta": int(a + b), "height": a}
    return None


def _separation(p):
    """Distinct generators differ at some level where neither history is theta."""
    t = p.history_width()
    if len(p.u) < 2:
        return None
    idx = p.h != t
    sep = (idx[:, None, :] & idx[None, :, :] & (p.h[:, None, :] != p.h[None, :, :])).any(axis=2)
    np.fill_diagonal(sep, True)
    bad = np.argwhere(~sep)
    if bad.size:
        i, j = bad[0]
        return {"pair": [p.u[i], p.u[j]]}
    return None


def _fingerprints(p):
    """Every set of levels is the exact fingerprint of some generator."""
    masks = {int(m) for m in fingerprint_masks(p)}
    for mask in range(2 ** p.ht):
        if mask not in masks:
            return {"X": [b for b in range(p.ht) if mask >> b & 1]}
    return None


def _interpolation(p):
    """The zeta*-spine is a pure chain with one condition per height, and a
    pure extension of equal height is the condition itself."""
    spine = [pr_component(p, a) for a in range(p.ht + 1)]
    for a, (lo, hi) in enumerate(zip(spine, spine[1:])):
        if lo.ht != a or not leq_pr(lo, hi):
            return {"height": a}
    if p.ht:
        q = _shifted_zetas(p)
        if leq_pr(q, p) != (q == p):
            return {"reason": "pure extension at equal height"}
    return None


def _definition(p):
    """History and tag tables agree with a rebuild from the construction rules."""
    h_def, g_def = oracles.history_tables(p)
    for (j, beta), value in h_def.items():
        if p.history(j, beta) != value:
            return {"j": j, "beta": beta, "h": p.history(j, beta), "expected": value}
        if p.tag(j, beta) != g_def[j, beta]:
            return {"j": j, "beta": beta, "field": "g"}
    return None


HISTORY_CLAUSES = (
    ("below", _below),
    ("range", _value_range),
    ("pure_tokens", _pure_tokens),
    ("separation", _separation),
    ("fingerprints", _fingerprints),
    ("interpolation", _interpolation),
    ("definition", _definition),
)


def _history(p, details, clauses=None):
    verdicts = {}
    first = None
    for name, fn in HISTORY_CLAUSES:
        if clauses is not None and name not in clauses:
            continue
        cex = fn(p)
        verdicts[name] = "pass" if cex is None else "fail"
        if cex is not None and first is None:
            first = {"clause": name, **cex}
    details["clauses"] = verdicts
    return first


def check_history(p: Condition, clauses=None) -> CheckReport:
    """Structural facts about supports, tables and history values.

    Every clause of :data:`HISTORY_CLAUSES` is evaluated (or only those named
    in ``clauses``); ``details["clauses"]`` holds the per-clause verdicts and
    the counterexample belongs to the first failing clause.
    """
    return _run("history", p, _history, clauses)


# --------------------------------------------------------------------------
# generator independence


def _independence(p, details):
    small = len(p.table) <= ORACLE_ROW_LIMIT
    details["oracle"] = small
    rows = [tuple(int(b) for b in r) for r in p.table.rows] if small else None
    for n, j in enumerate(p.u):
        prefix = p.u[:n]
        got = in_generated(p.table, j, prefix)
        if small and got != oracles.partition_generates(rows, p.u, j, prefix):
            return {"j": j, "reason": "row-partition oracle disagrees"}
        if got:
            return {"j": j, "generated_by": list(prefix)}
    return None


def check_generator_independence(p: Condition) -> CheckReport:
    """No generator lies in the subalgebra generated by the smaller ones."""
    return _run("generator_independence", p, _independence)


# --------------------------------------------------------------------------
# majority chains


def tau_instances(q: Condition) -> list:
    return [TermInstance(q.tau_star, v) for v in q.vs]


def build_maj_chain(q: Condition) -> list:
    """``sigma_maj`` of consecutive triples of the ``tau_xi``, one element per full triple."""
    if q.is_atomic:
        raise InvalidInput("majority chains are built on amalgams")
    taus = tau_instances(q)
    maj = sigma_maj()
    return [TermInstance.compose(maj, taus[3 * x: 3 * x + 3]) for x in range(len(q.parts) // 3)]


def maj_gate(q: Condition) -> bool:
    """Every ``tau_xi`` lies outside the subalgebra generated by the heart in its part."""
    return all(not instance_in_generated(c.table, TermInstance(q.tau_star, v), q.heart)
               for c, v in zip(q.parts, q.vs))


def _separating_rows(q: Condition):
    """Rows ``f0, f1`` of the part tables agreeing on the heart with ``tau`` values 0 and 1."""
    child = q.parts[0]
    col = instance_column(child.table, TermInstance(q.tau_star, q.vs[0]))
    k = len(q.heart)
    heart_keys = [tuple(r[:k]) for r in child.table.rows.tolist()]
    seen = {}
    for r, key in enumerate(heart_keys):
        seen.setdefault((key, bool(col[r])), r)
        if (key, not col[r]) in seen:
            a, b = seen[key, False], seen[key, True]
            return child.table.rows[a], child.table.rows[b]
    return None


def _maj_chain(p, details):
    if p.is_atomic:
        details["vacuous"] = True
        return None
    chain = build_maj_chain(p)
    details["length"] = len(chain)
    for x, z in combinations(range(len(chain)), 2):
        if not elem_le(p.table, chain[x], chain[z]):
            vx, vz = instance_column(p.table, chain[x]), instance_column(p.table, chain[z])
            r = int(np.flatnonzero(vx & ~vz)[0])
            return {"reason": "not increasing", "pair": [x, z], "f": _row_dict(p, p.table.rows[r])}
    gate = maj_gate(p)
    details["gate"] = gate
    if not gate:
        return None
    length, _ = longest_chain(p.table, chain)
    if length != len(p.parts) // 3:
        return {"reason": "chain not strict", "longest": length, "expected": len(p.parts) // 3}

    # the witness from the depth argument: f0 on the first triples, f1 above them
    f0, f1 = _separating_rows(p)
    k = len(p.heart)
    for x in range(len(chain) - 1):
        cut = 3 * x + 2
        blocks = [(f0 if xi <= cut else f1)[k:] for xi in range(len(p.parts))]
        g = np.concatenate([f0[:k]] + blocks)[None, :]
        f = _row_dict(p, g[0])
        member = bool(p.table.contains_rows(g)[0])
        if not member or not oracles.in_table(p, f):
            return {"reason": "witness not in table", "x": x, "f": f}
        lo = instance_column_of_row(chain[x], f)
        hi = instance_column_of_row(chain[x + 1], f)
        if (lo, hi) != (0, 1):
            return {"reason": "witness does not separate", "x": x, "f": f}
    return None


def instance_column_of_row(inst: TermInstance, f: dict) -> int:
    return oracles.eval_bits(inst.term, [f[a] for a in inst.args])


def check_maj_chain(p: Condition) -> CheckReport:
    """The majority chain is increasing, and strictly so when every ``tau_xi``
    escapes the heart subalgebra."""
    return _run("maj_chain", p, _maj_chain)


# --------------------------------------------------------------------------
# components


def _components(p, details):
    t = p.history_width()
    for alpha in range(p.ht + 1):
        comps = components(p, alpha)
        if len(set(comps)) != len(comps):
            return {"alpha": alpha, "reason": "components listed twice"}
        first = comps[0]
        levels = list(range(alpha, p.ht))
        covers = np.zeros(len(p.u), dtype=np.int64)
        for n, q in enumerate(comps):
            if q.ht != alpha or not leq(q, p):
                return {"alpha": alpha, "component": n, "reason": "not a component below p"}
            if iso_map(first, q) is None:
                return {"alpha": alpha, "component": n, "reason": "not isomorphic to the first"}
            rows = [p.position(j) for j in q.u]
            if levels:
                sub = p.h[np.ix_(rows, levels)]
                for b, beta in enumerate(levels):
                    vals = {int(v) for v in sub[:, b] if v != t}
                    if len(vals) > 1:
                        return {"alpha": alpha, "component": n, "beta": beta,
                                "reason": "history not uniform", "values": sorted(vals)}
                token = sub >= t
                # i qualifies for q when every level where i has a token is a token level of q
                q_tokens = token.all(axis=0)
                all_tok = p.h[:, levels] >= t
                ok = ~(all_tok & ~q_tokens[None, :]).any(axis=1)
            else:
                ok = np.ones(len(p.u), dtype=bool)
            member = np.zeros(len(p.u), dtype=bool)
            member[rows] = True
            covers += ok & member
        bad = np.flatnonzero(covers != 1)
        if bad.size:
            return {"alpha": alpha, "j": p.u[bad[0]], "reason": "home component not unique",
                    "count": int(covers[bad[0]])}
        pure = [n for n, q in enumerate(comps) if leq_pr(q, p)]
        if len(pure) != 1 or comps[pure[0]] != pr_component(p, alpha):
            return {"alpha": alpha, "reason": "pure component not unique", "pure": pure}
    return None


def check_components(p: Condition) -> CheckReport:
    """Components sit below ``p``, are mutually isomorphic, have uniform
    histories above their height, and exactly one is a pure predecessor."""
    return _run("components", p, _components)


# --------------------------------------------------------------------------
# closed sets


def _all_level_sets(ht):
    return [tuple(b for b in range(ht) if mask >> b & 1) for mask in range(2 ** ht)]


def _closed(p, details):
    family = set(closed_sets(p))
    details["closed_sets"] = len(family)
    for Z in _all_level_sets(p.ht):
        if (Z in family) != oracles.is_closed_def(p, Z):
            return {"Z": Z, "reason": "closedness disagrees with the definition"}
    for w in _all_level_sets(p.ht):
        Z = close(p, w)
        if not set(w) <= set(Z) or Z not in family:
            return {"w": w, "Z": Z, "reason": "closure is not a closed superset"}
        supersets = [set(C) for C in family if set(w) <= set(C)]
        if set(Z) != set.intersection(*supersets):
            return {"w": w, "Z": Z, "reason": "closure is not the least closed superset"}
    for alpha in range(p.ht):
        comps = components(p, alpha)
        ref = set(closed_sets(comps[0]))
        for n, q in enumerate(comps):
            if set(closed_sets(q)) != ref:
                return {"alpha": alpha, "component": n, "reason": "isomorphic components differ"}
        for Z in family:
            cut = tuple(z for z in Z if z < alpha)
            if not is_p_closed(comps[0], cut):
                return {"alpha": alpha, "Z": Z, "reason": "trace on a component is not closed"}
    return None


def check_closed_sets(p: Condition) -> CheckReport:
    """Closedness against its definition, least closures, and invariance
    under isomorphism and passage to components."""
    return _run("closed_sets", p, _closed)


# --------------------------------------------------------------------------
# signatures and the U-set isomorphism


def _signature_iso(p, details):
    family = closed_sets(p)
    sigs = {}
    for Z in family:
        sigs[Z] = upsilon(p, Z)
        for ell, a in enumerate(Z):
            for n, q in enumerate(components(p, a + 1)):
                if signature_entry(q, Z[:ell]) != sigs[Z][ell]:
                    return {"Z": Z, "level": a, "component": n, "reason": "entry depends on component"}
        if list(U_set(p, Z)) != oracles.u_set_def(p, Z):
            return {"Z": Z, "reason": "U-set disagrees with the definition"}
    pairs = 0
    for Z0 in family:
        for Z1 in family:
            if len(Z0) != len(Z1) or sigs[Z0] != sigs[Z1]:
                continue
            pairs += 1
            pi = u_iso(p, Z0, Z1)
            for i, j in pi.items():
                for a0, a1 in zip(Z0, Z1):
                    if p.history(i, a0) != p.history(j, a1):
                        return {"Z0": Z0, "Z1": Z1, "i": i, "reason": "histories not carried over"}
            for i in set(pi) & set(pi.values()):
                if pi[i] != i:
                    return {"Z0": Z0, "Z1": Z1, "i": i, "reason": "not the identity on the overlap"}
    details["pairs"] = pairs
    return None


def check_signature_iso(p: Condition) -> CheckReport:
    """Signatures do not depend on the component read, U-sets match their
    definition, and equal signatures give history-preserving isomorphisms."""
    return _run("signature_iso", p, _signature_iso)


# --------------------------------------------------------------------------
# flip closure


def misaligned_map(p: Condition, Z0, Z1) -> dict:
    """An order map from ``U[p, Z0]`` onto the last generators of ``u^p``.

    It generally breaks the history condition; used as a negative control.
    """
    U0 = U_set(p, Z0)
    return dict(zip(U0, p.u[len(p.u) - len(U0):]))


def _flip_failures(p, pi, rows):
    flipped = flip_rows(p, pi, rows)
    return flipped, np.flatnonzero(~p.table.contains_rows(flipped))


def _flip(p, details, budget, samples, seed, iso, pairs=None):
    pairs = admissible_pairs(p) if pairs is None else [(tuple(a), tuple(b)) for a, b in pairs]
    nrows = len(p.table)
    details["pairs"] = len(pairs)
    details["identity_pairs"] = sum(Z0 == Z1 for Z0, Z1 in pairs)
    maps = [iso(p, Z0, Z1) for Z0, Z1 in pairs]
    if not pairs:
        details["mode"] = "vacuous"
        return None
    if len(pairs) * nrows <= budget:
        details["mode"] = "exhaustive"
        details["triples"] = len(pairs) * nrows
        failing = []
        first = None
        for (Z0, Z1), pi in zip(pairs, maps):
            flipped, bad = _flip_failures(p, pi, p.table.rows)
            if bad.size:
                failing.append([Z0, Z1])
                if first is None:
                    first = (Z0, Z1, p.table.rows[bad[0]], flipped[bad[0]], int(bad.size))
        details["failing_pairs"] = failing
    else:
        details["mode"] = "sampled"
        details["seed"] = seed
        details["triples"] = samples
        rng = SplitMix64(seed)
        picks = [(rng.below(len(pairs)), rng.below(nrows)) for _ in range(samples)]
        first = None
        failing = set()
        for k in range(len(pairs)):
            rows_idx = [r for pk, r in picks if pk == k]
            if not rows_idx:
                continue
            rows = p.table.rows[rows_idx]
            flipped, bad = _flip_failures(p, maps[k], rows)
            if bad.size:
                failing.add(pairs[k])
                if first is None:
                    Z0, Z1 = pairs[k]
                    first = (Z0, Z1, rows[bad[0]], flipped[bad[0]], int(bad.size))
        details["failing_pairs"] = sorted(failing)
    if first is None:
        return None
    Z0, Z1, f, g, count = first
    g_dict = _row_dict(p, g)
    return {"Z0": Z0, "Z1": Z1, "f": _row_dict(p, f), "G(f)": g_dict,
            "failures_on_pair": count, "by_definition": oracles.in_table(p, g_dict)}


def check_flip_closure(p: Condition, budget: int = 2 ** 20, samples: int = 10_000,
                       seed: int = 0, iso: Callable = u_iso, pairs=None) -> CheckReport:
    """``G(f)`` stays in ``F^p`` for every admissible pair of closed sets.

    All ``(pair, f)`` triples are tried when there are at most ``budget`` of
    them; otherwise ``samples`` triples are drawn with splitmix64 from
    ``seed``.  ``iso`` computes the map between U-sets (swap it to run a
    negative control).  ``pairs`` restricts the check to the given
    admissible pairs.
    """
    return _run("flip_closure", p, _flip, budget, samples, seed, iso, pairs)


# --------------------------------------------------------------------------
# chain collapse


def _chain_preconditions(p, tau, w0, w1, Z0, Z1):
    w0, w1 = tuple(sorted(w0)), tuple(sorted(w1))
    Z0, Z1 = tuple(sorted(Z0)), tuple(sorted(Z1))
    if len(w0) != tau.arity or len(w1) != tau.arity:
        raise InvalidInput("w0 and w1 must have the arity of the term")
    for Z, w in ((Z0, w0), (Z1, w1)):
        if not is_p_closed(p, Z):
            raise PreconditionViolation("i", f"{Z} is not closed")
        if not set(w) <= set(U_set(p, Z)):
            raise PreconditionViolation("i", f"{Z} does not cover the histories of {w}")
    if len(Z0) != len(Z1) or upsilon(p, Z0) != upsilon(p, Z1):
        raise PreconditionViolation("i", "the closed sets have different signatures")
    if not level_map_is_identity_on_overlap(Z0, Z1):
        raise PreconditionViolation("ii", "the level map moves a common level")
    pi = u_iso(p, Z0, Z1)
    if tuple(pi[i] for i in w0) != w1:
        raise PreconditionViolation("iii", "the U-set isomorphism does not carry w0 onto w1")
    return w0, w1, Z0, Z1, pi


def _collapse_one(p, tau, w0, w1, Z0, Z1, pi):
    a, b = TermInstance(tau, w0), TermInstance(tau, w1)
    if not elem_lt(p.table, a, b):
        return None
    va, vb = instance_column(p.table, a), instance_column(p.table, b)
    r = int(np.flatnonzero(~va & vb)[0])
    f = p.table.rows[r]
    g = flip_rows(p, pi, f[None, :])[0]
    return {"tau": tau, "w0": w0, "w1": w1, "Z0": Z0, "Z1": Z1,
            "f": _row_dict(p, f), "G(f)": _row_dict(p, g),
            "G(f)_in_table": bool(p.table.contains_rows(g[None, :])[0])}


def check_chain_collapse(p: Condition, tau: BoolTerm, w0, w1, Z0, Z1) -> CheckReport:
    """``tau(w0) < tau(w1)`` must fail once ``(Z0, w0)`` and ``(Z1, w1)`` match up.

    Violated hypotheses raise :class:`PreconditionViolation` naming the
    item: ``i`` closed covering sets with equal signatures, ``ii`` the level
    map fixes common levels, ``iii`` the U-set map sends ``w0`` onto ``w1``.
    """
    w0, w1, Z0, Z1, pi = _chain_preconditions(p, tau, w0, w1, Z0, Z1)
    return _run("chain_collapse", p,
                lambda p, details: _collapse_one(p, tau, w0, w1, Z0, Z1, pi))


def _collapse_all(p, details, pool):
    tested = 0
    for Z0, Z1 in admissible_pairs(p):
        pi = u_iso(p, Z0, Z1)
        U0 = U_set(p, Z0)
        for tau in pool:
            for w0 in combinations(U0, tau.arity):
                w1 = tuple(pi[i] for i in w0)
                tested += 1
                cex = _collapse_one(p, tau, w0, w1, Z0, Z1, pi)
                if cex is not None:
                    details["tested"] = tested
                    return cex
    details["tested"] = tested
    return None


def check_chain_collapse_all(p: Condition, pool=TERM_POOLS["mixed"]) -> CheckReport:
    """:func:`check_chain_collapse` over every admissible pair, pool term and ``w0``."""
    return _run("chain_collapse", p, _collapse_all, pool)


# --------------------------------------------------------------------------
# p-transformation


def transform_pairs(p: Condition, cap: int = 4) -> list:
    """Deterministic ``(path, node)`` choices below ``p``: per height, up to
    ``cap`` nodes spread through the tree, always including the spine node."""
    by_height = {}
    for path, c in _walk(p):
        by_height.setdefault(c.ht, []).append((path, c))
    out = []
    for a in sorted(by_height):
        nodes = by_height[a]
        chosen = _spread(nodes, cap)
        spine = pr_component(p, a)
        if not any(c is spine for _, c in chosen):
            chosen.append(next((path, c) for path, c in nodes if c is spine))
        out.extend(chosen)
    return out


def _transform(p, details, cap):
    n = 0
    for path, c in transform_pairs(p, cap):
        T = transform(c, p)
        n += 1
        ctx = {"path": path}
        if T.u != p.u or T.ht != p.ht:
            return {**ctx, "clause": "support"}
        if not leq_pr(c, T):
            return {**ctx, "clause": "pure"}
        if not (leq(T, p) and leq(p, T)):
            return {**ctx, "clause": "equivalent"}
        if c.ht == p.ht and T != c:
            return {**ctx, "clause": "equal_height"}
        # pure extensions along the spine transform coherently
        for a in range(c.ht, p.ht + 1):
            q = pr_component(p, a)
            if leq(c, q) and not leq_pr(transform(c, q), T):
                return {**ctx, "clause": "monotone", "height": a}
        # transforms commute with isomorphisms between sibling components
        if c.ht < p.ht:
            q = pr_component(p, c.ht + 1) if leq(c, pr_component(p, c.ht + 1)) else None
            if q is not None:
                for sib in components(p, q.ht)[:3]:
                    H = iso_map(q, sib)
                    T0, T1 = transform(c, q), transform(_relabel(c, H), sib)
                    if iso_map(T0, T1) != H:
                        return {**ctx, "clause": "isomorphism"}
    details["pairs"] = n
    return None


def check_transform(p: Condition, cap: int = 4) -> CheckReport:
    """The p-transformation keeps the support, makes ``p`` a pure predecessor,
    is equivalent to the original, and respects pure extensions and isomorphisms."""
    return _run("transform", p, _transform, cap)


# --------------------------------------------------------------------------
# isomorphism and transport


def _iso_transport(p, details):
    checked = 0
    for alpha in range(p.ht + 1):
        comps = components(p, alpha)
        q0 = comps[0]
        for q1 in _spread(comps, 3):
            H = iso_map(q0, q1)
            if H is None:
                return {"alpha": alpha, "reason": "components not isomorphic"}
            if not q0.is_atomic:
                if (q0.zeta_star, q0.tau_star) != (q1.zeta_star, q1.tau_star):
                    return {"alpha": alpha, "reason": "top data differ"}
                for xi, (c0, c1) in enumerate(zip(q0.parts, q1.parts)):
                    if iso_map(c0, c1) != {i: H[i] for i in c0.u}:
                        return {"alpha": alpha, "part": xi, "reason": "restriction is not the part isomorphism"}
                    if tuple(H[i] for i in q0.vs[xi]) != q1.vs[xi]:
                        return {"alpha": alpha, "part": xi, "reason": "v not carried over"}
            # the tables correspond through H, row by row
            composed = q1.table.rows[:, [q1.position(H[j]) for j in q0.u]]
            if not q0.table.contains_rows(composed).all() or len(q0.table) != len(q1.table):
                return {"alpha": alpha, "reason": "tables do not correspond"}
            for path, p0 in _walk(q0):
                p1 = transport(H, p0, q0, q1)
                if p1 != _node_at(q1, path) or iso_map(p0, p1) != {i: H[i] for i in p0.u}:
                    return {"alpha": alpha, "path": path, "reason": "transport mismatch"}
                checked += 1
    details["transports"] = checked
    return None


def check_iso_transport(p: Condition) -> CheckReport:
    """Isomorphisms between components restrict to parts, carry tables and
    transport conditions below them to the matching nodes."""
    return _run("iso_transport", p, _iso_transport)


# --------------------------------------------------------------------------
# order relations


def _order(p, details, cap):
    nodes = [c for _, c in _walk(p)]
    pool = _spread(nodes, cap)
    if p.ht:
        pool.append(_shifted_zetas(p))
    details["conditions"] = len(pool)
    le = [[leq(a, b) for b in pool] for a in pool]
    pr = [[leq_pr(a, b) for b in pool] for a in pool]
    n = len(pool)
    for a in range(n):
        if not le[a][a] or not pr[a][a]:
            return {"reason": "not reflexive", "index": a}
        for b in range(n):
            if pr[a][b] and not le[a][b]:
                return {"reason": "pure extension is not an extension", "pair": [a, b]}
            if a != b and pr[a][b] and pr[b][a] and pool[a] != pool[b]:
                return {"reason": "pure extension not antisymmetric", "pair": [a, b]}
            for c in range(n):
                if le[a][b] and le[b][c] and not le[a][c]:
                    return {"reason": "extension not transitive", "triple": [a, b, c]}
                if pr[a][b] and pr[b][c] and not pr[a][c]:
                    return {"reason": "pure extension not transitive", "triple": [a, b, c]}
    return None


def check_order_relations(p: Condition, cap: int = 12) -> CheckReport:
    """Reflexivity, transitivity and antisymmetry facts for both orders on
    nodes of the construction tree."""
    return _run("order_relations", p, _order, cap)


# --------------------------------------------------------------------------
# suite


SUITE = (
    "construction", "history", "generator_independence", "maj_chain", "components",
    "closed_sets", "signature_iso", "flip_closure", "chain_collapse", "transform",
    "iso_transport", "order_relations",
)


def run_suite(p: Condition, budget: int = 2 ** 20, samples: int = 10_000,
              seed: int = 0) -> list:
    """Every check on ``p`` in the fixed order of :data:`SUITE`."""
    return [
        check_construction(p, seed),
        check_history(p),
        check_generator_independence(p),
        check_maj_chain(p),
        check_components(p),
        check_closed_sets(p),
        check_signature_iso(p),
        check_flip_closure(p, budget, samples, seed),
        check_chain_collapse_all(p),
        check_transform(p),
        check_iso_transport(p),
        check_order_relations(p),
    ]


# --------------------------------------------------------------------------
# negative controls


def corrupt_history(p: Condition, j: int, beta: int, value: int) -> Condition:
    """A copy of ``p`` whose history table says ``h(j, beta) = value``.

    The copy bypasses construction, so only use it to exercise checks.
    """
    q = copy.copy(p)
    h = p.h.copy()
    h[p.position(j), beta] = value
    h.setflags(write=False)
    q.h = h
    return q
