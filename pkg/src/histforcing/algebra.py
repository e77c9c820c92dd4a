"""Finitely presented Boolean algebras given by valuation tables.

A table over a finite sorted domain ``w`` of generator indices is a set of
0/1 rows, one column per generator.  The algebra it presents is the
subalgebra of the power set of rows generated by the columns, so every
question about elements reduces to evaluating terms column-wise.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import InvalidInput, ResourceLimit

__all__ = [
    "BoolTerm", "Const", "Var", "Not", "And", "Or",
    "sigma_maj", "eval_term", "substitute",
    "TermInstance", "ValuationTable",
    "closure", "instance_value", "instance_column",
    "elem_nonzero", "elem_le", "elem_lt",
    "in_generated", "instance_in_generated",
    "longest_chain", "longest_value_chain", "full_algebra_depth",
    "is_subalgebra_embedding",
]

FULL_DEPTH_MAX_ROWS = 12


# --------------------------------------------------------------------------
# terms


class BoolTerm:
    """Base class of the term AST.  Nodes are immutable and compare structurally."""

    __slots__ = ()

    @property
    def arity(self) -> int:
        return max(self.slots(), default=-1) + 1

    def slots(self) -> frozenset:
        raise NotImplementedError

    def _eval(self, args):
        raise NotImplementedError

    def __and__(self, other):
        return And(self, other)

    def __or__(self, other):
        return Or(self, other)

    def __invert__(self):
        return Not(self)


@dataclass(frozen=True, slots=True)
class Const(BoolTerm):
    value: int

    def __post_init__(self):
        if self.value not in (0, 1):
            raise InvalidInput(f"constant must be 0 or 1, got {self.value!r}")

    def slots(self):
        return frozenset()

    def _eval(self, args):
        return bool(self.value)

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True, slots=True)
class Var(BoolTerm):
    slot: int

    def __post_init__(self):
        if not isinstance(self.slot, int) or self.slot < 0:
            raise InvalidInput(f"slot index must be a natural number, got {self.slot!r}")

    def slots(self):
        return frozenset((self.slot,))

    def _eval(self, args):
        return args[self.slot]

    def __str__(self):
        return f"y{self.slot}"


@dataclass(frozen=True, slots=True)
class Not(BoolTerm):
    arg: BoolTerm

    def slots(self):
        return self.arg.slots()

    def _eval(self, args):
        return ~_as_bool(self.arg._eval(args))

    def __str__(self):
        return f"~{self.arg}"


@dataclass(frozen=True, slots=True)
class And(BoolTerm):
    left: BoolTerm
    right: BoolTerm

    def slots(self):
        return self.left.slots() | self.right.slots()

    def _eval(self, args):
        return _as_bool(self.left._eval(args)) & _as_bool(self.right._eval(args))

    def __str__(self):
        return f"({self.left} & {self.right})"


@dataclass(frozen=True, slots=True)
class Or(BoolTerm):
    left: BoolTerm
    right: BoolTerm

    def slots(self):
        return self.left.slots() | self.right.slots()

    def _eval(self, args):
        return _as_bool(self.left._eval(args)) | _as_bool(self.right._eval(args))

    def __str__(self):
        return f"({self.left} | {self.right})"


def _as_bool(x):
    # python bools would turn ~True into -2
    return np.bool_(x) if isinstance(x, bool) else x


def sigma_maj() -> BoolTerm:
    """The ternary majority term (y0 & y1) | (y0 & y2) | (y1 & y2)."""
    y0, y1, y2 = Var(0), Var(1), Var(2)
    return Or(Or(And(y0, y1), And(y0, y2)), And(y1, y2))


def eval_term(term: BoolTerm, bits: Sequence[int]) -> int:
    if len(bits) != term.arity:
        raise InvalidInput(f"term has arity {term.arity} but {len(bits)} bits were given")
    args = [np.bool_(bool(b)) for b in bits]
    return int(bool(term._eval(args)))


def eval_columns(term: BoolTerm, columns: Sequence[np.ndarray], nrows: int) -> np.ndarray:
    """Evaluate ``term`` row-wise, slot k reading ``columns[k]``."""
    out = term._eval([np.asarray(c, dtype=bool) for c in columns])
    return np.broadcast_to(np.asarray(out, dtype=bool), (nrows,)).copy()


def substitute(term: BoolTerm, mapping: Mapping[int, BoolTerm]) -> BoolTerm:
    """Replace every ``Var(k)`` by ``mapping[k]``."""
    if isinstance(term, Const):
        return term
    if isinstance(term, Var):
        return mapping[term.slot]
    if isinstance(term, Not):
        return Not(substitute(term.arg, mapping))
    return type(term)(substitute(term.left, mapping), substitute(term.right, mapping))


# --------------------------------------------------------------------------
# term instances


@dataclass(frozen=True)
class TermInstance:
    """``term(x_i : i in args)``; slot k binds the k-th smallest element of ``args``."""

    term: BoolTerm
    args: tuple

    def __post_init__(self):
        args = tuple(int(a) for a in self.args)
        if list(args) != sorted(set(args)):
            raise InvalidInput(f"instance arguments must be strictly increasing: {args}")
        if len(args) != self.term.arity:
            raise InvalidInput(
                f"term of arity {self.term.arity} bound to {len(args)} generators")
        object.__setattr__(self, "args", args)

    @classmethod
    def generator(cls, i: int) -> TermInstance:
        return cls(Var(0), (i,))

    @classmethod
    def constant(cls, value: int) -> TermInstance:
        return cls(Const(value), ())

    @classmethod
    def compose(cls, outer: BoolTerm, inner: Sequence[TermInstance]) -> TermInstance:
        """Instance of ``outer(inner_0, inner_1, ...)``, dropping generators no slot reads."""
        used = sorted({inst.args[k] for inst in inner for k in inst.term.slots()})
        pos = {g: n for n, g in enumerate(used)}
        pieces = {
            m: substitute(inst.term, {k: Var(pos[inst.args[k]]) for k in inst.term.slots()})
            for m, inst in enumerate(inner)
        }
        return cls(substitute(outer, pieces), tuple(used))

    def __str__(self):
        return f"{self.term}[{', '.join(f'y{k}=x{a}' for k, a in enumerate(self.args))}]"


# --------------------------------------------------------------------------
# valuation tables


class ValuationTable:
    """A nonempty set of 0/1 assignments over a sorted finite domain.

    Rows are kept unique and in lexicographic order (first domain element
    most significant), so two tables are equal iff their arrays are equal.
    """

    __slots__ = ("domain", "rows", "_pos", "_keys")

    def __init__(self, domain: Iterable[int], rows):
        domain = tuple(int(d) for d in domain)
        if list(domain) != sorted(set(domain)):
            raise InvalidInput(f"domain must be strictly increasing: {domain}")
        rows = np.asarray(rows, dtype=np.uint8)
        if rows.ndim == 1 and rows.size == 0:
            rows = rows.reshape(0, len(domain))
        if rows.ndim != 2 or rows.shape[1] != len(domain):
            raise InvalidInput(f"rows must have shape (r, {len(domain)}), got {rows.shape}")
        if rows.shape[0] == 0:
            raise InvalidInput("a valuation table needs at least one row")
        if rows.max(initial=0) > 1:
            raise InvalidInput("rows must be 0/1 valued")
        self.domain = domain
        self.rows = _canonical_rows(rows)
        self.rows.setflags(write=False)
        self._pos = {d: n for n, d in enumerate(domain)}
        self._keys = None

    @classmethod
    def _trusted(cls, domain, rows) -> ValuationTable:
        """Wrap rows already known to be canonical (unique, sorted, 0/1)."""
        table = cls.__new__(cls)
        table.domain = tuple(domain)
        table.rows = rows
        table._pos = {d: n for n, d in enumerate(table.domain)}
        table._keys = None
        return table

    @classmethod
    def free(cls, domain: Iterable[int]) -> ValuationTable:
        domain = tuple(domain)
        if len(domain) > 20:
            raise ResourceLimit("free table over more than 20 generators")
        rows = np.array(list(product((0, 1), repeat=len(domain))), dtype=np.uint8)
        return cls(domain, rows.reshape(-1, len(domain)))

    @classmethod
    def from_assignments(cls, domain: Iterable[int], assignments) -> ValuationTable:
        """Build from dicts ``{index: bit}`` or from bit strings / tuples in domain order."""
        domain = tuple(domain)
        rows = []
        for a in assignments:
            if isinstance(a, Mapping):
                if set(a) != set(domain):
                    raise InvalidInput(f"assignment {a} is not over domain {domain}")
                rows.append([int(a[d]) for d in domain])
            else:
                rows.append([int(b) for b in a])
        return cls(domain, np.array(rows, dtype=np.uint8).reshape(len(rows), len(domain)))

    def __len__(self):
        return self.rows.shape[0]

    def __eq__(self, other):
        if not isinstance(other, ValuationTable):
            return NotImplemented
        return self.domain == other.domain and np.array_equal(self.rows, other.rows)

    def __hash__(self):
        return hash((self.domain, self.rows.tobytes()))

    def __repr__(self):
        return f"ValuationTable(domain={self.domain}, rows={len(self)})"

    def position(self, i: int) -> int:
        try:
            return self._pos[i]
        except KeyError:
            raise InvalidInput(f"generator {i} is not in the domain {self.domain}") from None

    def positions(self, idx: Iterable[int]) -> list:
        return [self.position(i) for i in idx]

    def column(self, i: int) -> np.ndarray:
        return self.rows[:, self.position(i)].astype(bool)

    def assignments(self):
        for row in self.rows:
            yield dict(zip(self.domain, (int(b) for b in row)))

    def keys(self) -> np.ndarray:
        if self._keys is None:
            self._keys = row_keys(self.rows)
        return self._keys

    def contains_rows(self, rows: np.ndarray) -> np.ndarray:
        """Membership of each row of ``rows`` (columns in domain order)."""
        rows = np.asarray(rows, dtype=np.uint8)
        return np.isin(row_keys(rows), self.keys())

    def __contains__(self, assignment):
        if isinstance(assignment, Mapping):
            if set(assignment) != set(self.domain):
                return False
            row = [int(assignment[d]) for d in self.domain]
        else:
            row = [int(b) for b in assignment]
            if len(row) != len(self.domain):
                return False
        return bool(self.contains_rows(np.array([row], dtype=np.uint8))[0])

    def restrict(self, subdomain: Iterable[int]) -> ValuationTable:
        """``{f | subdomain : f in self}``."""
        subdomain = tuple(sorted(subdomain))
        return ValuationTable(subdomain, self.rows[:, self.positions(subdomain)])


def _canonical_rows(rows: np.ndarray) -> np.ndarray:
    if rows.shape[1] == 0:
        return np.zeros((1, 0), dtype=np.uint8)
    if rows.shape[1] > 62:
        return np.unique(rows, axis=0)
    _, first = np.unique(row_keys(rows), return_index=True)
    return rows[first]


def row_keys(rows: np.ndarray) -> np.ndarray:
    """Order-preserving integer keys for 0/1 rows (first column most significant)."""
    rows = np.asarray(rows, dtype=np.uint8)
    n = rows.shape[1]
    if n <= 62:
        weights = np.left_shift(np.int64(1), np.arange(n - 1, -1, -1, dtype=np.int64))
        return rows.astype(np.int64) @ weights if n else np.zeros(len(rows), dtype=np.int64)
    packed = np.packbits(rows, axis=1)
    return np.array([r.tobytes() for r in packed], dtype=object)


def closure(table: ValuationTable) -> ValuationTable:
    # with a finite domain, taking the finite subset u = w in the closure
    # condition shows cl(F) = F
    return table


# --------------------------------------------------------------------------
# elements


def instance_column(table: ValuationTable, inst: TermInstance) -> np.ndarray:
    """Value of the instance under every row of ``table``."""
    cols = [table.rows[:, table.position(a)] for a in inst.args]
    return eval_columns(inst.term, cols, len(table))


def instance_value(f: Mapping[int, int], inst: TermInstance) -> int:
    try:
        bits = [f[a] for a in inst.args]
    except KeyError as exc:
        raise InvalidInput(f"generator {exc.args[0]} is not bound by the assignment") from None
    return eval_term(inst.term, bits)


def elem_nonzero(table: ValuationTable, inst: TermInstance) -> bool:
    return bool(instance_column(table, inst).any())


def elem_le(table: ValuationTable, a: TermInstance, b: TermInstance) -> bool:
    va, vb = instance_column(table, a), instance_column(table, b)
    return not bool((va & ~vb).any())


def elem_lt(table: ValuationTable, a: TermInstance, b: TermInstance) -> bool:
    va, vb = instance_column(table, a), instance_column(table, b)
    return not bool((va & ~vb).any()) and bool((~va & vb).any())


def _constant_on_blocks(table: ValuationTable, values: np.ndarray, v: Iterable[int]) -> bool:
    cols = table.positions(sorted(set(v)))
    if not cols:
        return bool(values.all() or not values.any())
    _, block = np.unique(row_keys(table.rows[:, cols]), return_inverse=True)
    ones = np.bincount(block, weights=values.astype(np.int64))
    sizes = np.bincount(block)
    return bool(np.all((ones == 0) | (ones == sizes)))


def in_generated(table: ValuationTable, j: int, v: Iterable[int]) -> bool:
    """Whether ``x_j`` lies in the subalgebra generated by ``{x_i : i in v}``.

    For a finite table this holds iff column ``j`` is constant on every block
    of rows that agree on ``v``.
    """
    v = set(v)
    table.positions(v)
    return _constant_on_blocks(table, table.column(j), v)


def instance_in_generated(table: ValuationTable, inst: TermInstance, v: Iterable[int]) -> bool:
    """Same test for an arbitrary term instance in place of a generator."""
    v = set(v)
    table.positions(v)
    return _constant_on_blocks(table, instance_column(table, inst), v)


def longest_value_chain(values: np.ndarray):
    """Longest strictly increasing chain among the rows of a 0/1 matrix.

    Row ``a`` is below row ``b`` when it is pointwise ``<=`` and differs.
    Returns ``(length, indices)`` where ``length`` counts elements.  Ties are
    broken towards smaller indices.
    """
    values = np.asarray(values, dtype=bool)
    m = values.shape[0]
    if m == 0:
        return 0, []
    le = ~np.any(values[:, None, :] & ~values[None, :, :], axis=2)
    lt = le & ~le.T
    order = sorted(range(m), key=lambda k: (int(values[k].sum()), k))
    best = np.ones(m, dtype=np.int64)
    pred = np.full(m, -1, dtype=np.int64)
    for b in order:
        below = np.flatnonzero(lt[:, b])
        if below.size:
            top = best[below].max()
            best[b] = top + 1
            pred[b] = below[best[below] == top].min()
    end = int(np.flatnonzero(best == best.max()).min())
    chain = []
    while end >= 0:
        chain.append(end)
        end = int(pred[end])
    return int(best.max()), chain[::-1]


def longest_chain(table: ValuationTable, elements: Sequence[TermInstance]):
    """Longest chain of the given elements under the strict algebra order.

    Returns ``(length, witness)`` with the witness listed bottom-up.
    """
    if not elements:
        return 0, []
    values = np.stack([instance_column(table, e) for e in elements])
    length, idx = longest_value_chain(values)
    return length, [elements[k] for k in idx]


def full_algebra_depth(table: ValuationTable) -> int:
    """Longest strict chain length (in elements) of the whole algebra presented by ``table``.

    Only offered for at most twelve rows, since the algebra has ``2**rows`` elements.
    """
    r = len(table)
    if r > FULL_DEPTH_MAX_ROWS:
        raise ResourceLimit(f"full algebra depth needs <= {FULL_DEPTH_MAX_ROWS} rows, got {r}")
    subsets = (np.arange(2 ** r)[:, None] >> np.arange(r)[None, :]) & 1
    return longest_value_chain(subsets.astype(bool))[0]


def is_subalgebra_embedding(inner: ValuationTable, outer: ValuationTable) -> bool:
    if not set(inner.domain) <= set(outer.domain):
        raise InvalidInput(
            f"inner domain {inner.domain} is not contained in outer domain {outer.domain}")
    projected = outer.restrict(inner.domain)
    # every inner row extends to an outer row, and every outer row restricts into inner
    return projected == inner
