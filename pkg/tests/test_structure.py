import pytest

from oracles import TableGroup
from ptower.abelian import AbelianInvariants, abelianization
from ptower.pcp import PcPresentation
from ptower.structure import (
    BudgetExceeded,
    center,
    closure,
    derived_length,
    derived_series,
    element_order_histogram,
    frattini,
    lower_p_central,
    maximal_subgroups,
    subgroup_abelianization,
    whole_group,
)
from ptower.transfer import compute_ttt


def _as_set(H):
    return frozenset(H.elements)


def test_closure_examples(g2, g5a):
    assert closure(g2, []).order == 1
    Z = closure(g2, [g2.gen(2)])
    assert Z.order == 3
    assert closure(g5a, [g5a.gen(0), g5a.gen(1)]).order == 3 ** 8


def test_center_of_extraspecial(g2):
    Z = center(g2)
    assert Z.order == 3 and g2.gen(2) in Z


def test_series_against_oracle(small_groups):
    for P in small_groups[:13]:
        T = TableGroup(P)
        ds = derived_series(P)
        assert [_as_set(H) for H in ds] == T.derived_series()
        lp = lower_p_central(P)
        assert [_as_set(H) for H in lp] == T.lower_p_central()
        assert P.p_class == len(lp) - 1


def test_derived_length_examples(g1, g2, g5a, g5b, c3):
    assert derived_length(g1) == 1 and derived_length(c3) == 1
    assert derived_length(g2) == 2
    assert derived_length(g5a) == 3 and derived_length(g5b) == 3


def test_p_class_examples(g1, g2, g5a, g5b):
    assert g1.p_class == 1 and g2.p_class == 2
    assert frattini(g2).order == 3 and len(lower_p_central(g2)) == 3
    assert g5a.p_class == 5 and g5b.p_class == 5


def test_maximal_subgroups(g1, g5a):
    assert len(maximal_subgroups(g1)) == 4
    ms = maximal_subgroups(g5a)
    assert len(ms) == 4 and all(M.order == 3 ** 7 for M in ms)
    F = frattini(g5a)
    assert all(M.contains_subgroup(F) for M in ms)
    assert len({M for M in ms}) == 4
    cyclic9 = PcPresentation(3, 2, [(0, 1), (0, 0)])
    assert len(maximal_subgroups(cyclic9)) == 1


def test_subgroup_abelianization(g1, g5a, chain):
    G = whole_group(g5a)
    assert subgroup_abelianization(g5a, G) == abelianization(g5a)
    assert subgroup_abelianization(g1, whole_group(g1)) == AbelianInvariants([3, 3])
    ttt = sorted(compute_ttt(g5a).components)
    assert [str(t) for t in ttt] == ["[3,9]", "[3,9]", "[3,9]", "[9,27]"]
    assert [str(t) for t in compute_ttt(chain[2]).components] == ["[3,9]"] * 4


def test_subgroup_abelianization_against_oracle(small_groups):
    for P in small_groups[:13]:
        T = TableGroup(P)
        for M in maximal_subgroups(P):
            H = _as_set(M)
            D = T.comm_subgroup(H, H)
            assert tuple(subgroup_abelianization(P, M)) == T.abelian_invariants_of(H, D)


def test_budget(monkeypatch, g5a):
    monkeypatch.setenv("PTOWER_MAX_ORDER", "729")
    with pytest.raises(BudgetExceeded):
        element_order_histogram(g5a)
