import itertools
import random

import pytest

from oracles import TableGroup, naive_collect
from ptower.pcp import (
    MAX_PRIME,
    PcPresentation,
    PresentationError,
    check_consistency,
    check_definitions,
    images_from_definitions,
    is_homomorphism,
)
from ptower.isom import find_isomorphism


def presentations_up_to_3_gens(p=3):
    """Every syntactically valid presentation on at most 3 generators."""
    out = []
    for n in (1, 2, 3):
        slots = [("pow", i) for i in range(n)] + [("comm", j, i) for j in range(n) for i in range(j)]

        def choices(slot):
            lead = slot[1]
            free = [k for k in range(n) if k > lead]
            return list(itertools.product(range(p), repeat=len(free))), free

        opts = [choices(s) for s in slots]
        for pick in itertools.product(*[o[0] for o in opts]):
            pw = [(0,) * n for _ in range(n)]
            cm = {}
            for slot, (vals, (_, free)) in zip(slots, zip(pick, opts)):
                v = [0] * n
                for k, e in zip(free, vals):
                    v[k] = e
                if slot[0] == "pow":
                    pw[slot[1]] = tuple(v)
                elif any(v):
                    cm[(slot[1], slot[2])] = tuple(v)
            out.append(PcPresentation(p, n, pw, cm, infer_definitions=False))
    return out


def test_collect_empty_word_is_identity(g5a):
    assert g5a.collect([]) == g5a.identity


def test_collect_extraspecial(g2):
    assert g2.collect([(1, 1), (0, 1)]) == (1, 1, 1)


def test_collect_large(g5a):
    assert g5a.collect([(1, 1), (0, 1)]) == (1, 1, 1, 0, 0, 0, 0, 0)


def test_collect_index_out_of_range(g2):
    with pytest.raises(IndexError):
        g2.collect([(3, 1)])


def test_trivial_operations(g1, g5a):
    x = (1, 2, 0, 1, 0, 2, 1, 0)
    assert g5a.multiply(x, g5a.identity) == x
    assert g5a.inverse(g5a.identity) == g5a.identity
    assert g1.power((1, 0), 3) == g1.identity
    assert g5a.multiply(g5a.inverse(x), x) == g5a.identity
    assert g5a.power(x, -1) == g5a.inverse(x)


def test_consistency_of_fixtures(g1, g2, g5a, g5b):
    for P in (g1, g2, g5a, g5b):
        ok, failures = check_consistency(P)
        assert ok and not failures


def test_inconsistent_presentation_is_reported():
    # g1^3 = g2 with g2 central but [g2,g1] = g3 clashes with g1 commuting with its power
    P = PcPresentation(3, 3, [(0, 1, 0), (0, 0, 0), (0, 0, 0)], {(1, 0): (0, 0, 1)}, infer_definitions=False)
    ok, failures = check_consistency(P)
    assert not ok
    assert failures[0].left != failures[0].right


def test_mutation_delete_defining_commutator(g5a, g5b):
    cm = dict(g5a.comm_rhs)
    del cm[(5, 1)]  # [g6, g2] = g8 removed
    M = PcPresentation(3, 8, g5a.power_rhs, cm, infer_definitions=False)
    ok, _ = check_consistency(M)
    # computed outcome: the mutated presentation is inconsistent
    assert ok is False
    if ok:
        M = PcPresentation(3, 8, g5a.power_rhs, cm)
        assert find_isomorphism(g5a, M) is None and find_isomorphism(g5b, M) is None


def test_validation_errors():
    with pytest.raises(PresentationError):
        PcPresentation(4, 1)
    with pytest.raises(PresentationError):
        PcPresentation(MAX_PRIME + 1, 1)
    with pytest.raises(PresentationError):
        PcPresentation(3, 2, [(1, 0), (0, 0)])  # g1^3 may not involve g1
    with pytest.raises(PresentationError):
        PcPresentation(3, 2, [(0, 3), (0, 0)])  # unreduced exponent
    with pytest.raises(PresentationError):
        PcPresentation(3, 3, comm_rhs={(1, 0): (0, 1, 0)})  # [g2,g1] may not involve g2


def test_associativity_random_triples(g5a):
    rng = random.Random(7)
    rand = lambda: tuple(rng.randrange(3) for _ in range(8))
    for _ in range(1000):
        x, y, z = rand(), rand(), rand()
        assert g5a.multiply(g5a.multiply(x, y), z) == g5a.multiply(x, g5a.multiply(y, z))


def test_collection_confluence_random_words(g5a):
    rng = random.Random(11)
    for _ in range(200):
        word = [(rng.randrange(8), rng.randrange(1, 3)) for _ in range(rng.randrange(1, 12))]
        letters = [g for g, e in word for _ in range(e)]
        assert g5a.collect(word) == naive_collect(g5a, letters)


def test_small_presentations_against_naive_tables():
    """Every consistent presentation on <= 3 generators: full multiplication tables agree."""
    checked = 0
    for P in presentations_up_to_3_gens():
        ok, _ = check_consistency(P)
        if not ok:
            continue
        T = TableGroup(P)
        for x in T.elements:
            for y in T.elements:
                assert P.multiply(x, y) == T.mul(x, y)
        checked += 1
    assert checked > 0


def test_group_axioms_small(g2):
    T = TableGroup(g2)
    E = T.elements
    assert len(E) == 27
    for x, y, z in itertools.product(E, repeat=3):
        assert g2.multiply(g2.multiply(x, y), z) == g2.multiply(x, g2.multiply(y, z))
    for x in E:
        assert g2.multiply(x, g2.inverse(x)) == g2.identity


def test_two_generator_groups_up_to_243_against_naive_tables(small_groups):
    """Exact agreement of multiply with the naive table, all pairs, all groups of order <= 3^5."""
    for P in small_groups:
        T = TableGroup(P)
        for x in T.elements:
            for y in T.elements:
                assert P.multiply(x, y) == T.mul(x, y), P


def test_definitions_and_images(g5a):
    check_definitions(g5a)
    assert g5a.weights == (1, 1, 2, 3, 3, 4, 5, 5)
    assert g5a.d == 2 and g5a.p_class == 5
    imgs = images_from_definitions(g5a, [g5a.gen(0), g5a.gen(1)], g5a)
    assert imgs == [g5a.gen(i) for i in range(8)]
    assert is_homomorphism(g5a, imgs, g5a)


def test_truncate_gives_quotient(g5a):
    Q = g5a.truncate(6)
    assert Q.order == 729 and check_consistency(Q)[0]
    # projection is a homomorphism on random products
    rng = random.Random(3)
    for _ in range(100):
        x = tuple(rng.randrange(3) for _ in range(8))
        y = tuple(rng.randrange(3) for _ in range(8))
        assert g5a.multiply(x, y)[:6] == Q.multiply(x[:6], y[:6])
