import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from histforcing import (And, Const, Not, Or, TermInstance, ValuationTable, Var, closure,
                         elem_le, elem_lt, elem_nonzero, eval_term, in_generated,
                         instance_value, is_subalgebra_embedding, longest_chain, sigma_maj)
from histforcing import oracles
from histforcing.algebra import full_algebra_depth, instance_in_generated, substitute
from histforcing.errors import InvalidInput, ResourceLimit

x = TermInstance.generator


def table(domain, bits):
    return ValuationTable.from_assignments(domain, bits)


# --- terms -----------------------------------------------------------------

def test_eval_term_examples():
    assert eval_term(And(Var(0), Not(Var(1))), (1, 0)) == 1
    assert eval_term(sigma_maj(), (0, 1, 1)) == 1
    assert eval_term(Const(1), ()) == 1


@pytest.mark.parametrize("bits,expected", [((1, 1, 0), 1), ((0, 0, 1), 0), ((1, 1, 1), 1)])
def test_majority(bits, expected):
    assert sigma_maj().arity == 3
    assert eval_term(sigma_maj(), bits) == expected


def test_eval_term_arity_mismatch():
    with pytest.raises(InvalidInput):
        eval_term(And(Var(0), Var(1)), (1,))


def test_instance_value():
    f = {0: 1, 5: 0}
    assert instance_value(f, x(5)) == 0
    assert instance_value(f, TermInstance(Or(Var(0), Var(1)), (0, 5))) == 1
    assert instance_value(f, TermInstance.constant(0)) == 0
    with pytest.raises(InvalidInput):
        instance_value(f, x(3))


def test_instance_rejects_bad_args():
    with pytest.raises(InvalidInput):
        TermInstance(Var(0), (2, 1))
    with pytest.raises(InvalidInput):
        TermInstance(And(Var(0), Var(1)), (1,))


def test_compose_drops_unread_generators():
    inst = TermInstance.compose(sigma_maj(), [TermInstance.constant(1)] * 3)
    assert inst.args == ()
    assert instance_value({}, inst) == 1


# --- tables ----------------------------------------------------------------

def test_table_is_canonical():
    a = table((0, 1), ["11", "00", "11"])
    b = table((0, 1), ["00", "11"])
    assert a == b and len(a) == 2 and hash(a) == hash(b)


def test_table_rejects_bad_input():
    with pytest.raises(InvalidInput):
        ValuationTable((1, 0), [[0, 0]])
    with pytest.raises(InvalidInput):
        ValuationTable((0,), np.zeros((0, 1)))
    with pytest.raises(InvalidInput):
        ValuationTable((0,), [[2]])
    with pytest.raises(ResourceLimit):
        ValuationTable.free(range(21))


@pytest.mark.parametrize("bits", [["00", "01", "10", "11"], ["00", "11"], ["1"]])
def test_closure_is_identity_on_finite_tables(bits):
    t = table(tuple(range(len(bits[0]))), bits)
    assert closure(t) == t


def test_elem_nonzero_examples():
    inst = TermInstance(And(Var(0), Not(Var(1))), (0, 1))
    assert elem_nonzero(ValuationTable.free((0, 1)), inst)
    assert not elem_nonzero(table((0, 1), ["00", "11"]), inst)
    assert not elem_nonzero(ValuationTable.free((0, 1)), TermInstance.constant(0))


def test_order_relations():
    free = ValuationTable.free((0, 1))
    both = TermInstance(And(Var(0), Var(1)), (0, 1))
    assert elem_le(free, both, x(0)) and elem_lt(free, both, x(0))
    assert elem_le(free, x(0), x(0)) and not elem_lt(free, x(0), x(0))
    diag = table((0, 1), ["00", "11"])
    assert elem_le(diag, x(0), x(1)) and elem_le(diag, x(1), x(0))
    assert not elem_lt(diag, x(0), x(1))


def test_in_generated_examples():
    diag = table((0, 1), ["00", "11"])
    assert in_generated(diag, 1, {0})
    assert not in_generated(ValuationTable.free((0, 1)), 1, {0})
    assert in_generated(ValuationTable.free((0, 1, 2)), 2, {1, 2})
    with pytest.raises(InvalidInput):
        in_generated(diag, 7, {0})


def test_instance_in_generated():
    free = ValuationTable.free((0, 1, 2))
    inst = TermInstance(Or(Var(0), Var(1)), (0, 1))
    assert instance_in_generated(free, inst, {0, 1})
    assert not instance_in_generated(free, inst, {0})


def test_longest_chain_examples():
    free = ValuationTable.free((0, 1))
    els = [TermInstance(And(Var(0), Var(1)), (0, 1)), x(0),
           TermInstance(Or(Var(0), Var(1)), (0, 1)), x(1)]
    length, witness = longest_chain(free, els)
    assert length == 3
    assert witness == els[:3]
    assert longest_chain(free, [TermInstance.constant(1)] * 4)[0] == 1
    assert longest_chain(free, []) == (0, [])


def test_full_algebra_depth():
    # a finite algebra with r atoms has longest chain r + 1
    assert full_algebra_depth(ValuationTable.free((0, 1))) == 5
    assert full_algebra_depth(table((0,), ["1"])) == 2
    with pytest.raises(ResourceLimit):
        full_algebra_depth(ValuationTable.free(range(4)))


def test_subalgebra_embedding_examples():
    outer = table((0, 1), ["00", "11"])
    assert is_subalgebra_embedding(outer.restrict((0,)), outer)
    assert is_subalgebra_embedding(ValuationTable.free((0,)), outer)
    assert not is_subalgebra_embedding(table((0,), ["0"]), ValuationTable.free((0, 1)))
    with pytest.raises(InvalidInput):
        is_subalgebra_embedding(ValuationTable.free((5,)), outer)


# --- properties against the plain-Python oracles ----------------------------

terms = st.recursive(
    st.one_of(st.builds(Const, st.sampled_from([0, 1])), st.builds(Var, st.integers(0, 3))),
    lambda sub: st.one_of(st.builds(Not, sub), st.builds(And, sub, sub), st.builds(Or, sub, sub)),
    max_leaves=8,
)


@st.composite
def table_and_instance(draw):
    n = draw(st.integers(1, 4))
    domain = tuple(sorted(draw(st.sets(st.integers(0, 30), min_size=n, max_size=n))))
    rows = draw(st.sets(st.tuples(*[st.sampled_from([0, 1])] * n), min_size=1))
    term = draw(terms)
    # renumber the slots the term actually uses onto a subset of the domain
    slots = sorted(term.slots())
    if len(slots) > n:
        term = Const(draw(st.sampled_from([0, 1])))
        slots = []
    args = tuple(sorted(draw(st.sets(st.sampled_from(domain), min_size=len(slots), max_size=len(slots)))))
    term = substitute(term, {s: Var(k) for k, s in enumerate(slots)})
    return ValuationTable(domain, sorted(rows)), TermInstance(term, args)


@settings(max_examples=300, deadline=None)
@given(table_and_instance())
def test_nonzero_matches_row_set_construction(ti):
    t, inst = ti
    expected = oracles.row_set_value(inst.term, inst.args, t.rows.tolist(), t.domain) != 0
    assert elem_nonzero(t, inst) == expected


@settings(max_examples=200, deadline=None)
@given(table_and_instance(), st.data())
def test_in_generated_matches_partition_oracle(ti, data):
    t, _ = ti
    j = data.draw(st.sampled_from(t.domain))
    v = data.draw(st.sets(st.sampled_from(t.domain)))
    assert in_generated(t, j, v) == oracles.partition_generates(t.rows.tolist(), t.domain, j, v)


@settings(max_examples=200, deadline=None)
@given(table_and_instance())
def test_restriction_embeds(ti):
    t, _ = ti
    sub = t.domain[: max(1, len(t.domain) // 2)]
    assert is_subalgebra_embedding(t.restrict(sub), t)
