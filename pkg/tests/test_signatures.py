from itertools import combinations

import pytest

from histforcing import (Const, Var, U_set, amalgamate, atomic, close, closed_sets, components,
                         flip, is_p_closed, pr_component, u_iso, upsilon)
from histforcing import oracles
from histforcing.errors import InvalidInput
from histforcing.poset import relabel
from histforcing.signatures import SignatureEntry, admissible_pairs, level_map_is_identity_on_overlap


def stack(p, tau, v_pos, zeta=0, t=3):
    """Amalgam of ``t`` disjoint shifted copies of ``p`` with no heart."""
    n = max(p.u) + 1
    copies = [relabel(p, {i: i + xi * n for i in p.u}) for xi in range(t)]
    return amalgamate(zeta, tau, (), [(c, tuple(c.u[k] for k in v_pos)) for c in copies])


@pytest.fixture
def two_levels(trivial):
    # v of the official part is generator 1, whose level-0 history is an index
    return stack(trivial, Var(0), [1], zeta=0)


def test_components_examples(trivial, two_levels):
    assert components(trivial, 1) == [trivial]
    assert components(trivial, 0) == list(trivial.parts)
    assert len(components(two_levels, 0)) == 9
    assert all(c.is_atomic for c in components(two_levels, 0))
    with pytest.raises(InvalidInput):
        components(trivial, 2)


def test_components_are_listed_once():
    low = amalgamate(0, Const(1), (), [(atomic(i, 2), ()) for i in (0, 1)])
    top = amalgamate(0, Const(1), (0,), [(low, ()), (relabel(low, {0: 0, 1: 2}), ())])
    comps = components(top, 0)
    assert [c.u for c in comps] == [(0,), (1,), (2,)]


def test_pr_component(trivial, two_levels):
    assert pr_component(trivial, 1) is trivial
    assert pr_component(stack(atomic(0, 3), Const(1), [], zeta=2), 0) == atomic(2, 3)
    assert pr_component(two_levels, 0) == two_levels.parts[0].parts[0]


def test_closedness(trivial, two_levels):
    assert is_p_closed(atomic(4), ())
    assert is_p_closed(two_levels, ())
    assert not is_p_closed(two_levels, (1,))
    assert is_p_closed(two_levels, (0, 1))
    assert close(two_levels, (1,)) == (0, 1)
    assert close(trivial, ()) == ()
    assert close(atomic(3), ()) == ()
    with pytest.raises(InvalidInput):
        is_p_closed(trivial, (1,))


def test_u_set_examples(trivial):
    assert U_set(trivial, ()) == (0,)
    assert U_set(trivial, (0,)) == trivial.u
    assert U_set(atomic(6), ()) == (6,)


def test_u_set_needs_closed_levels(two_levels):
    with pytest.raises(InvalidInput):
        U_set(two_levels, (1,))


def test_upsilon_examples(chain6):
    assert upsilon(chain6, ()) == ()
    assert upsilon(chain6, (0,)) == (SignatureEntry(0, Var(0), 1, (), ((),)),)


def test_u_iso_identity(trivial):
    assert u_iso(trivial, (0,), (0,)) == {i: i for i in trivial.u}
    assert u_iso(trivial, (), ()) == {0: 0}


def test_flip_identity_cases(trivial):
    for f in trivial.table.assignments():
        assert flip(trivial, (0,), (0,), f) == f
        g = flip(trivial, (), (), f)
        assert g == {0: f[0], 1: 0, 2: 0}


def test_flip_rejects_foreign_assignment(chain6):
    with pytest.raises(InvalidInput):
        flip(chain6, (0,), (0,), {i: (1 if i < 3 else 0) for i in range(6)})


def test_level_map_identity_on_overlap():
    assert level_map_is_identity_on_overlap((0, 2), (0, 3))
    assert not level_map_is_identity_on_overlap((0, 2), (2, 3))
    assert level_map_is_identity_on_overlap((), ())


# --- against the definitions on the corpus ----------------------------------

def test_closed_sets_match_definition(corpus):
    for _, p in corpus:
        if p.ht == 0:
            continue
        levels = range(p.ht)
        all_sets = [Z for r in range(p.ht + 1) for Z in combinations(levels, r)]
        closed = {Z for Z in all_sets if oracles.is_closed_def(p, Z)}
        assert set(closed_sets(p)) == closed
        for w in all_sets:
            least = min((Z for Z in closed if set(w) <= set(Z)), key=len)
            assert close(p, w) == least
        for Z in closed:
            assert list(U_set(p, Z)) == oracles.u_set_def(p, Z)


def test_admissible_pairs_have_history_preserving_maps(corpus):
    seen = 0
    for _, p in corpus:
        for Z0, Z1 in admissible_pairs(p):
            pi = u_iso(p, Z0, Z1)
            for i, j in pi.items():
                assert [p.history(i, a) for a in Z0] == [p.history(j, b) for b in Z1]
            seen += Z0 != Z1
    assert seen > 0
