"""Per-level filter counts for the [3,3] target search, checked against fixed values.

Counts are recomputed from the verdicts stored on the report nodes, so the
search must be run with ``audit=True`` (every rule evaluated on every node).
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from typing import List, Optional

from .abelian import format_invariants_multiset, parse_invariants_multiset
from .io import load
from .pga import immediate_descendants
from .search import (
    Node,
    SearchReport,
    TargetSpec,
    class_quotient,
    passes,
    rule_p6,
    run_search,
    verify_survivors,
)
from .sigma import find_sigma
from .transfer import Tkt, compute_tkt, compute_ttt, tkt_equivalent


@dataclass
class LedgerLine:
    name: str
    expected: object
    actual: object

    @property
    def ok(self):
        return self.expected == self.actual

    def __str__(self):
        mark = "ok  " if self.ok else "FAIL"
        return f"{mark} {self.name}: expected {self.expected}, got {self.actual}"


def fixture_path(name):
    return resources.files("ptower") / "fixtures" / name


def load_fixture(name):
    return load(fixture_path(name))


def default_spec() -> TargetSpec:
    return TargetSpec.load(fixture_path("target.json"))


def reference_groups():
    return [load_fixture("g5a.pcp"), load_fixture("g5b.pcp")]


def _ttt(G):
    return format_invariants_multiset(compute_ttt(G).components)


def _ms(text):
    return format_invariants_multiset(parse_invariants_multiset(text))


def _class_nodes(report, c):
    return report.level(c)


def count_ledger(report: Optional[SearchReport] = None) -> List[LedgerLine]:
    """Every count of the narrative, from an audited search of the default spec."""
    spec = default_spec()
    if report is None:
        report = run_search(spec, audit=True)
    if not report.audit:
        raise ValueError("ledger counts need an audited report")
    L: List[LedgerLine] = []
    add = lambda name, exp, act: L.append(LedgerLine(name, exp, act))

    lv2 = _class_nodes(report, 2)
    add("immediate descendants of [3,3]", 7, len(lv2))
    p1 = [n for n in lv2 if passes(n, "P1")]
    add("class 2: pass P1 (abelianization [3,3])", 2, len(p1))
    p3 = [n for n in p1 if passes(n, "P3")]
    add("class 2: of those, pass P3 (sigma)", 1, len(p3))
    g2 = p3[0] if len(p3) == 1 else None

    lv3 = [n for n in _class_nodes(report, 3) if g2 is not None and n.parent is g2]
    add("immediate descendants of G_2", 11, len(lv3))
    p2 = [n for n in lv3 if passes(n, "P1", "P2")]
    add("class 3: pass P2 (maximal subgroup quotients)", 5, len(p2))
    p4 = [n for n in p2 if passes(n, "P4")]
    add("class 3: of those, pass P4 (rank gap)", 2, len(p4))
    add("class 3: TTT of both", [_ms("{[3,9]^4}")] * 2, [_ttt(n.group) for n in p4])

    # the stabilization rule decides between the two class-3 candidates
    stable_dead, alive = [], []
    for q in p4:
        kids = [Node(f"{q.id}/{k + 1}", 4, D, q) for k, D in enumerate(immediate_descendants(q.group))]
        if kids and all(not rule_p6(k, spec).passed for k in kids):
            stable_dead.append((q, len(kids)))
        else:
            alive.append((q, kids))
    add("class 3: branches removed by P6 (TTT stabilization)", 1, len(stable_dead))
    add("class 3: descendants of the removed branch, all with its TTT", [2],
        [k for _, k in stable_dead])
    g3 = alive[0][0] if len(alive) == 1 else None

    lv4 = [n for n in _class_nodes(report, 4) if g3 is not None and n.parent is g3]
    add("immediate descendants of G_3", 4, len(lv4))
    s4 = [n for n in lv4 if passes(n, "P3")]
    add("class 4: pass P3 (sigma)", 1, len(s4))
    g4 = s4[0] if len(s4) == 1 else None

    lv5 = [n for n in _class_nodes(report, 5) if g4 is not None and n.parent is g4]
    add("immediate descendants of G_4", 14, len(lv5))
    add("class 5: descendants with sigma", 14, sum(1 for n in lv5 if find_sigma(n.group) is not None))
    six = [n for n in lv5 if passes(n, "P4")]
    add("class 5: pass P4 (rank gap)", 6, len(six))
    add("class 5: orders of the six", [3 ** 8] * 6, [n.order for n in six])
    add("class 5: TTT of the six", [_ms("{[3,9]^3,[9,27]}")] * 6, [_ttt(n.group) for n in six])
    add("class 5: of the six, pruned by P5 (TKT)", 3, sum(1 for n in six if not passes(n, "P5")))
    target = Tkt.parse("(1,4,3,1)")
    other = Tkt.parse("(0,2,3,1)")
    kept = [n for n in six if passes(n, "P5")]
    add("class 5: TKT equivalent to (1,4,3,1)", 2,
        sum(1 for n in kept if tkt_equivalent(compute_tkt(n.group), target)))
    odd = [n for n in kept if tkt_equivalent(compute_tkt(n.group), other)]
    add("class 5: TKT equivalent to (0,2,3,1)", 1, len(odd))
    kids = [n for n in report.nodes if odd and n.parent is odd[0]]
    add("immediate descendants of the (0,2,3,1) group", 4, len(kids))
    add("their TTT", [_ms("{[3,9]^3,[27,27]}")] * 4, [_ttt(n.group) for n in kids])
    add("their P2 verdicts (pruned)", [False] * 4, [n.verdicts["P2"].passed for n in kids])

    surv = report.survivors
    add("survivors", 2, len(surv))
    add("search status", "COMPLETE", report.status)
    verdict = verify_survivors(report, reference_groups(), expected_count=2, expected_order=3 ** 8,
                               expected_class=5, expected_derived_length=3)
    add("survivor verification", [], [f"{c.name}: {c.detail}" for c in verdict.failures()])
    add("quotient chain orders", [[9, 27, 243, 729]] * len(surv),
        [[class_quotient(n.group, c).order for c in (1, 2, 3, 4)] for n in surv])
    return L
