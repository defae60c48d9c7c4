"""Pruned breadth-first search of the descendant tree for quotients of a target group.

Starting from the elementary abelian group of rank d, each level holds the
candidates of p-class c.  Every node is checked against the pruning rules
P1..P6 (cheapest first); nodes passing all rules are expanded to their
immediate descendants.  A node that passes every rule and every final check
is a survivor.  The search ends when a level is empty; hitting ``max_class``
first is reported as ``INCONCLUSIVE``.
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

from .abelian import (
    AbelianInvariants,
    abelianization,
    format_invariants_multiset,
    is_quotient,
    parse_invariants_multiset,
    quotient_matching,
)
from .io import render
from .isom import find_isomorphism, fingerprint, verify_isomorphism
from .pcp import PcPresentation
from .pga import allowable_subgroups, descendant_classes, p_cover
from .sigma import find_sigma
from .structure import derived_length, maximal_subgroups
from .transfer import (
    Tkt,
    compute_tkt,
    compute_ttt,
    derived_subgroup,
    matched_maximal_subgroups,
    tkt_compatible,
    tkt_equivalent,
    transfer_kernel,
)

log = logging.getLogger(__name__)

RULE_ORDER = ("P1", "P2", "P4", "P5", "P6", "P3")
COMPLETE = "COMPLETE"
INCONCLUSIVE = "INCONCLUSIVE"


class CountMismatch(RuntimeError):
    """A level size differs from the expected-counts fixture."""


@dataclass
class TargetSpec:
    p: int
    gab_target: AbelianInvariants
    ttt_target: Tuple[AbelianInvariants, ...]
    tkt_target: Optional[Tkt]
    relation_rank: int
    max_class: int = 7
    expected_level_sizes: Dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        self.ttt_target = tuple(sorted(AbelianInvariants(t) for t in self.ttt_target))
        self.gab_target = AbelianInvariants(self.gab_target)
        if self.max_class < 1:
            raise ValueError("max_class must be at least 1")

    @property
    def d(self):
        return self.gab_target.rank

    @property
    def uses_tkt(self):
        return self.tkt_target is not None and self.p == 3 and tuple(self.gab_target) == (3, 3)

    @classmethod
    def from_dict(cls, data):
        tkt = data.get("tkt")
        return cls(
            p=int(data["p"]),
            gab_target=AbelianInvariants.parse(data["gab"]),
            ttt_target=parse_invariants_multiset(data["ttt"]) if data.get("ttt") else (),
            tkt_target=Tkt.parse(tkt) if tkt else None,
            relation_rank=int(data["relation_rank"]),
            max_class=int(data.get("max_class", 7)),
            expected_level_sizes={int(k): int(v) for k, v in data.get("expected_level_sizes", {}).items()},
        )

    @classmethod
    def load(cls, path):
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self):
        return {
            "p": self.p,
            "gab": str(self.gab_target),
            "ttt": format_invariants_multiset(self.ttt_target),
            "tkt": str(self.tkt_target) if self.tkt_target is not None else None,
            "relation_rank": self.relation_rank,
            "max_class": self.max_class,
        }


@dataclass
class Verdict:
    passed: bool
    evidence: dict


@dataclass
class Node:
    id: str
    p_class: int
    group: PcPresentation
    parent: Optional["Node"] = None
    subgroup: str = ""
    verdicts: Dict[str, Verdict] = field(default_factory=dict)
    pruned_by: Optional[str] = None
    final_checks: Dict[str, bool] = field(default_factory=dict)
    status: str = ""
    edge_check: Optional[bool] = None

    @property
    def order(self):
        return self.group.order

    @property
    def passed_all(self):
        return self.pruned_by is None

    def to_dict(self, with_presentation=True):
        G = self.group
        out = {
            "id": self.id,
            "class": self.p_class,
            "order": G.order,
            "log_order": G.n,
            "parent": self.parent.id if self.parent else None,
            "allowable_subgroup": self.subgroup,
            "abelianization": str(abelianization(G)),
            "ttt": compute_ttt(G).sequence_str(),
            "tkt": _tkt_str(G),
            "fingerprint": _fp_str(G),
            "verdicts": {k: {"passed": v.passed, "evidence": v.evidence}
                         for k, v in sorted(self.verdicts.items())},
            "pruned_by": self.pruned_by,
            "status": self.status,
            "kernel_containment": self.edge_check,
        }
        if self.final_checks:
            out["final_checks"] = dict(self.final_checks)
        if with_presentation:
            out["presentation"] = render(G)
        return out


def _tkt_str(G):
    try:
        return str(compute_tkt(G))
    except ValueError:
        return None


def _fp_str(G):
    return repr(fingerprint(G))


# -- pruning rules ----------------------------------------------------------

def rule_p1(node: Node, spec: TargetSpec) -> Verdict:
    """The node's abelianization must be a quotient of the target's."""
    ab = abelianization(node.group)
    ok = is_quotient(spec.gab_target, ab)
    return Verdict(ok, {"abelianization": str(ab), "target": str(spec.gab_target)})


def rule_p2(node: Node, spec: TargetSpec) -> Verdict:
    """The maximal-subgroup abelianizations must match quotients of the target's."""
    ttt = compute_ttt(node.group)
    comps = ttt.components
    if not spec.ttt_target:
        return Verdict(True, {"ttt": str(ttt), "note": "no target"})
    perm = quotient_matching(comps, spec.ttt_target)
    ev = {"ttt": ttt.sequence_str(), "target": format_invariants_multiset(spec.ttt_target)}
    if perm is None:
        bad = [str(c) for c in comps if not any(is_quotient(t, c) for t in spec.ttt_target)]
        ev["unmatched"] = bad
    else:
        ev["matching"] = [str(spec.ttt_target[k]) for k in perm]
    return Verdict(perm is not None, ev)


def rule_p3(node: Node, spec: TargetSpec) -> Verdict:
    """The node must admit a sigma-automorphism."""
    w = find_sigma(node.group)
    if w is None:
        return Verdict(False, {"sigma": None})
    return Verdict(True, {"sigma": [list(x) for x in w.images], "verified": w.verified})


def rule_p4(node: Node, spec: TargetSpec) -> Verdict:
    """Multiplicator rank minus nucleus rank is bounded by the relation rank."""
    cov = p_cover(node.group)
    gap = cov.multiplicator_rank - cov.nucleus_rank
    return Verdict(gap <= spec.relation_rank, {
        "multiplicator_rank": cov.multiplicator_rank,
        "nucleus_rank": cov.nucleus_rank,
        "gap": gap,
        "bound": spec.relation_rank,
    })


def rule_p5(node: Node, spec: TargetSpec) -> Verdict:
    """Each transfer kernel must contain the corresponding target kernel."""
    if not spec.uses_tkt or abelianization(node.group) != spec.gab_target:
        return Verdict(True, {"note": "not applicable"})
    k = compute_tkt(node.group)
    return Verdict(tkt_compatible(k, spec.tkt_target), {"tkt": str(k), "target": str(spec.tkt_target)})


def rule_p6(node: Node, spec: TargetSpec) -> Verdict:
    """Maximal-subgroup abelianizations that did not grow from the parent never
    grow again; prune if they do not already match the target."""
    Q = node.parent.group if node.parent is not None else None
    if Q is None or Q.d != node.group.d:
        return Verdict(True, {"note": "no parent"})
    td, tq = compute_ttt(node.group).components, compute_ttt(Q).components
    pairs = matched_maximal_subgroups(node.group, Q)
    stable = all(td[a] == tq[b] for a, b in pairs)
    on_target = not spec.ttt_target or tuple(sorted(tq)) == spec.ttt_target
    ev = {"ttt": compute_ttt(node.group).sequence_str(), "parent_ttt": compute_ttt(Q).sequence_str(),
          "stable": stable}
    return Verdict(not stable or on_target, ev)


RULES: Dict[str, Callable[[Node, TargetSpec], Verdict]] = {
    "P1": rule_p1, "P2": rule_p2, "P3": rule_p3, "P4": rule_p4, "P5": rule_p5, "P6": rule_p6,
}


def final_checks(G: PcPresentation, spec: TargetSpec) -> Dict[str, bool]:
    """The target hypotheses evaluated on a group (as a candidate for the target itself)."""
    out = {
        "gab": abelianization(G) == spec.gab_target,
        "ttt": not spec.ttt_target or tuple(sorted(compute_ttt(G).components)) == spec.ttt_target,
    }
    if spec.uses_tkt:
        out["tkt"] = out["gab"] and tkt_equivalent(compute_tkt(G), spec.tkt_target)
    out["relation_rank"] = p_cover(G).multiplicator_rank == spec.relation_rank
    out["sigma"] = find_sigma(G) is not None
    return out


def kernel_containment(D: PcPresentation, Q: PcPresentation) -> Optional[bool]:
    """Transfer kernels of D map into those of its parent Q (None when the
    induced map on abelianizations is not an isomorphism)."""
    if abelianization(D).order != abelianization(Q).order:
        return None
    mq = maximal_subgroups(Q)
    md = maximal_subgroups(D)
    DQ = derived_subgroup(Q)
    for a, b in matched_maximal_subgroups(D, Q):
        kq = set(transfer_kernel(Q, mq[b]))
        for x in transfer_kernel(D, md[a]):
            if DQ.coset_rep(x[:Q.n]) not in kq:
                return False
    return True


# -- the search -------------------------------------------------------------

@dataclass
class SearchReport:
    spec: TargetSpec
    levels: List[List[Node]]
    status: str
    timing: List[float] = field(default_factory=list)
    audit: bool = False
    pruning: bool = True

    @property
    def nodes(self):
        return [n for level in self.levels for n in level]

    @property
    def survivors(self) -> List[Node]:
        return [n for n in self.nodes if n.status == "survivor"]

    def level(self, c) -> List[Node]:
        for lv in self.levels:
            if lv and lv[0].p_class == c:
                return lv
        return []

    def level_sizes(self):
        return {lv[0].p_class: len(lv) for lv in self.levels if lv}

    def node(self, node_id) -> Node:
        return next(n for n in self.nodes if n.id == node_id)

    def children(self, node: Node) -> List[Node]:
        return [n for n in self.nodes if n.parent is node]

    def to_dict(self, *, with_presentations=True, with_timing=False):
        out = {
            "spec": self.spec.to_dict(),
            "status": self.status,
            "audit": self.audit,
            "pruning": self.pruning,
            "rule_order": list(RULE_ORDER),
            "level_sizes": {str(k): v for k, v in self.level_sizes().items()},
            "levels": [
                {"class": lv[0].p_class if lv else None,
                 "nodes": [n.to_dict(with_presentations) for n in lv]}
                for lv in self.levels
            ],
            "survivors": [n.id for n in self.survivors],
        }
        if with_timing:
            out["timing_seconds"] = [round(t, 3) for t in self.timing]
        return out

    def to_json(self, **kw):
        return json.dumps(self.to_dict(**kw), indent=2, sort_keys=False, ensure_ascii=False)


def elementary_abelian(p, d) -> PcPresentation:
    return PcPresentation(p, d)


def _evaluate(node: Node, spec: TargetSpec, audit: bool, pruning: bool):
    for name in RULE_ORDER:
        if node.pruned_by is not None and not audit:
            break
        v = RULES[name](node, spec)
        node.verdicts[name] = v
        if not v.passed and node.pruned_by is None and pruning:
            node.pruned_by = name


def run_search(spec: TargetSpec, *, max_class=None, audit=False, pruning=True,
               max_allowable=None, progress: Callable[[str], None] = None) -> SearchReport:
    """Breadth-first search by p-class from the elementary abelian root.

    With ``pruning=False`` no rule removes a node (verdicts are still
    recorded), which gives the exhaustive tree up to ``max_class``.  Nodes
    with more than ``max_allowable`` allowable subgroups are left unexpanded
    (status ``capped``).
    """
    max_class = spec.max_class if max_class is None else max_class
    root = Node("1.1", 1, elementary_abelian(spec.p, spec.d))
    levels = [[root]]
    timing = []
    status = COMPLETE
    c = 1
    while True:
        t0 = time.perf_counter()
        level = levels[-1]
        expected = spec.expected_level_sizes.get(c) if pruning else None
        if expected is not None and expected != len(level):
            raise CountMismatch(f"class {c}: {len(level)} nodes, expected {expected}")
        for node in level:
            _evaluate(node, spec, audit, pruning)
            if node.parent is not None:
                node.edge_check = kernel_containment(node.group, node.parent.group)
                if node.edge_check is False:
                    raise AssertionError(f"transfer kernel containment fails on edge {node.parent.id}->{node.id}")
            terminal = p_cover(node.group).nucleus_rank == 0
            if node.passed_all:
                node.final_checks = final_checks(node.group, spec)
                if all(node.final_checks.values()):
                    node.status = "survivor"
                else:
                    node.status = "terminal" if terminal else "open"
            else:
                node.status = "pruned"
        nxt = []
        expandable = [n for n in level if n.passed_all and p_cover(n.group).nucleus_rank > 0]
        if expandable and c >= max_class:
            status = INCONCLUSIVE
            timing.append(time.perf_counter() - t0)
            break
        if max_allowable is not None:
            for n in expandable:
                if len(allowable_subgroups(p_cover(n.group))) > max_allowable:
                    n.status = "capped"
            expandable = [n for n in expandable if n.status != "capped"]
        for node in expandable:
            if node.status == "open":
                node.status = "expanded"
            for cls in descendant_classes(node.group):
                nxt.append(Node(f"{c + 1}.{len(nxt) + 1}", c + 1, cls.representative, node, str(cls.subgroup)))
        timing.append(time.perf_counter() - t0)
        if progress:
            progress(f"class {c}: {len(level)} nodes, {len(expandable)} expanded, {len(nxt)} children")
        log.info("class %d: %d nodes, %d expanded", c, len(level), len(expandable))
        if not nxt:
            break
        levels.append(nxt)
        c += 1
    return SearchReport(spec, levels, status, timing, audit, pruning)


# -- survivor verification --------------------------------------------------

@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class SurvivorVerdict:
    checks: List[Check]

    @property
    def ok(self):
        return all(c.passed for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.passed]


def ancestor_chain(node: Node) -> List[Node]:
    chain = []
    while node is not None:
        chain.append(node)
        node = node.parent
    return chain[::-1]


def class_quotient(G: PcPresentation, c: int) -> PcPresentation:
    return G.truncate(sum(1 for w in G.weights if w <= c))


def verify_survivors(report: SearchReport, references: List[PcPresentation],
                     expected_count: int = 2, expected_order=None, expected_class=None,
                     expected_derived_length=None) -> SurvivorVerdict:
    """Independent re-check of the survivors of a search.

    Each survivor must be terminal, have multiplicator rank equal to the
    relation rank, admit a sigma-automorphism, be isomorphic (by a re-verified
    witness) to exactly one reference presentation, and have class-c
    quotients isomorphic to the search's ancestor at class c.
    """
    spec = report.spec
    checks: List[Check] = []
    surv = report.survivors
    checks.append(Check("survivor count", len(surv) == expected_count, f"{len(surv)} survivors"))
    matched = []
    for node in surv:
        G = node.group
        cov = p_cover(G)
        checks.append(Check(f"{node.id} terminal", cov.nucleus_rank == 0, f"nucleus rank {cov.nucleus_rank}"))
        checks.append(Check(f"{node.id} multiplicator rank", cov.multiplicator_rank == spec.relation_rank,
                            f"rank {cov.multiplicator_rank}"))
        if expected_order is not None:
            checks.append(Check(f"{node.id} order", G.order == expected_order, str(G.order)))
        if expected_class is not None:
            checks.append(Check(f"{node.id} p-class", G.p_class == expected_class, str(G.p_class)))
        if expected_derived_length is not None:
            dl = derived_length(G)
            checks.append(Check(f"{node.id} derived length", dl == expected_derived_length, str(dl)))
        w = find_sigma(G)
        checks.append(Check(f"{node.id} sigma", w is not None and w.verified, "witness re-verified" if w else "none"))
        hits = []
        for k, R in enumerate(references):
            imgs = find_isomorphism(R, G)
            if imgs is not None and verify_isomorphism(R, G, imgs):
                hits.append(k)
        matched.append(tuple(hits))
        checks.append(Check(f"{node.id} matches a reference", len(hits) == 1,
                            f"isomorphic to references {hits}" if hits else "isomorphism search found no witness"))
        for anc in ancestor_chain(node)[:-1]:
            q = class_quotient(G, anc.p_class)
            imgs = find_isomorphism(anc.group, q)
            ok = imgs is not None and verify_isomorphism(anc.group, q, imgs)
            checks.append(Check(f"{node.id} class-{anc.p_class} quotient ~ {anc.id}", ok, f"order {q.order}"))
    flat = [h for hs in matched for h in hs]
    checks.append(Check("survivors match distinct references", len(flat) == len(set(flat)), str(matched)))
    for i in range(len(surv)):
        for j in range(i + 1, len(surv)):
            iso = find_isomorphism(surv[i].group, surv[j].group)
            checks.append(Check(f"{surv[i].id} not isomorphic to {surv[j].id}", iso is None, ""))
    chains = {tuple(a.id for a in ancestor_chain(n)[:-1]) for n in surv}
    checks.append(Check("unique ancestor chain", len(chains) <= 1, str(sorted(chains))))
    return SurvivorVerdict(checks)


# -- ledger counts ----------------------------------------------------------

def passes(node: Node, *rules) -> bool:
    """All listed rule verdicts were recorded and passed."""
    return all(r in node.verdicts and node.verdicts[r].passed for r in rules)
