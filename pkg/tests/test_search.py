import dataclasses
import json
from concurrent.futures import ThreadPoolExecutor

import pytest

from ptower.audit import reference_groups
from ptower.pcp import PcPresentation, check_consistency
from ptower.search import (
    COMPLETE,
    INCONCLUSIVE,
    Node,
    RULE_ORDER,
    RULES,
    CountMismatch,
    SearchReport,
    TargetSpec,
    ancestor_chain,
    final_checks,
    kernel_containment,
    run_search,
    verify_survivors,
)


def test_spec_round_trip(spec):
    again = TargetSpec.from_dict(spec.to_dict())
    assert again.to_dict() == spec.to_dict()
    assert spec.uses_tkt and spec.d == 2
    with pytest.raises(ValueError):
        TargetSpec.from_dict({"p": 3, "gab": "[3,3]", "relation_rank": 2, "max_class": 0})


def test_cyclic_target():
    s = TargetSpec.from_dict({"p": 3, "gab": "[3]", "ttt": "", "relation_rank": 1})
    r = run_search(s)
    assert r.status == COMPLETE
    assert [n.id for n in r.survivors] == ["1.1"]
    assert r.survivors[0].group.order == 3
    assert all(n.pruned_by == "P1" for n in r.level(2))


def test_impossible_target_has_no_survivors():
    s = TargetSpec.from_dict({"p": 3, "gab": "[3,3]", "ttt": "{[3,3]^4}", "tkt": "(1,4,3,1)",
                              "relation_rank": 2})
    r = run_search(s)
    assert r.status == COMPLETE and r.survivors == []
    # regression value: the last level is class 3, emptied by the maximal-subgroup rule
    assert r.level_sizes() == {1: 1, 2: 7, 3: 11}
    assert all(n.pruned_by == "P2" for n in r.level(3))


def test_max_class_gives_inconclusive(spec):
    r = run_search(spec, max_class=2)
    assert r.status == INCONCLUSIVE
    assert r.survivors == []


def test_count_mismatch_is_an_error(spec):
    bad = dataclasses.replace(spec, expected_level_sizes={2: 6})
    with pytest.raises(CountMismatch):
        run_search(bad, max_class=2)


def test_report_is_deterministic(spec):
    with ThreadPoolExecutor(2) as ex:
        a, b = ex.map(lambda _: run_search(spec, max_class=3).to_json(), range(2))
    c = run_search(spec, max_class=3).to_json()
    assert a == b == c
    data = json.loads(a)
    assert list(data) == ["spec", "status", "audit", "pruning", "rule_order", "level_sizes", "levels", "survivors"]


def test_full_run(report):
    assert report.status == COMPLETE
    assert report.level_sizes() == {1: 1, 2: 7, 3: 11, 4: 4, 5: 14, 6: 4}
    assert sorted(n.id for n in report.survivors) == ["5.13", "5.14"]
    for n in report.survivors:
        assert all(n.final_checks.values())


def test_every_node_is_accounted_for(report):
    for n in report.nodes:
        assert n.status in ("survivor", "terminal", "expanded", "pruned")
        if n.status == "pruned":
            assert n.pruned_by in RULE_ORDER
        else:
            assert n.pruned_by is None


def test_audit_records_every_rule(report):
    for n in report.nodes:
        assert set(n.verdicts) == set(RULES)


def test_pruning_evidence(report):
    for n in report.nodes:
        if n.pruned_by is None:
            continue
        ev = n.verdicts[n.pruned_by].evidence
        assert ev
        if n.pruned_by == "P2":
            assert ev["unmatched"]
        if n.pruned_by == "P4":
            assert ev["gap"] > ev["bound"]
        if n.pruned_by == "P1":
            assert ev["abelianization"] != ev["target"]


def test_kernel_containment_on_every_edge(report):
    edges = [n for n in report.nodes if n.parent is not None]
    assert edges
    for n in edges:
        assert n.edge_check is not False
        assert kernel_containment(n.group, n.parent.group) == n.edge_check


def test_true_chain_passes_every_rule(report, spec, chain, g5a):
    for s in report.survivors:
        for node in ancestor_chain(s):
            assert node.passed_all, node.id
    chain_ids = [n.id for n in ancestor_chain(report.survivors[0])]
    assert chain_ids == ["1.1", "2.2", "3.9", "4.2", chain_ids[-1]]
    # the quotients of a final presentation pass the same predicates
    parent = None
    for c, G in enumerate(chain[1:] + [g5a], 2):
        node = Node(f"q{c}", c, G, parent)
        for name, rule in RULES.items():
            assert rule(node, spec).passed, (c, name)
        parent = node


def test_final_checks_on_references(spec):
    for G in reference_groups():
        assert all(final_checks(G, spec).values())


def test_tampered_survivor_fails_verification(report, g5a):
    pw = list(g5a.power_rhs)
    pw[0] = tuple((e + (1 if k == 7 else 0)) % 3 for k, e in enumerate(pw[0]))
    M = PcPresentation(3, 8, pw, g5a.comm_rhs)
    assert check_consistency(M)[0]
    target = report.survivors[0]
    fake = dataclasses.replace(target, group=M)
    levels = [[fake if n is target else n for n in lv] for lv in report.levels]
    tampered = SearchReport(report.spec, levels, report.status, audit=True)
    v = verify_survivors(tampered, reference_groups(), expected_count=2)
    assert not v.ok
    names = [c.name for c in v.failures()]
    assert any("matches a reference" in nm or "distinct" in nm or "not isomorphic" in nm for nm in names)


def test_verify_survivors_on_the_real_report(report):
    v = verify_survivors(report, reference_groups(), expected_count=2, expected_order=3 ** 8,
                         expected_class=5, expected_derived_length=3)
    assert v.ok, [str(c) for c in v.failures()]
