"""The p-group generation algorithm: p-covering group, allowable subgroups,
immediate descendants.

The covering group is computed with tails: every relation that is not a
definition gets a fresh central generator of order p, and the overlap
(consistency) tests yield the F_p-linear relations among the tails.  The
surviving tails span the p-multiplicator; the nucleus is ``P_c`` of the
cover.  Immediate descendants are the quotients by proper subspaces U of the
multiplicator with ``U + nucleus = multiplicator``; isomorphic quotients are
merged by an explicit isomorphism search (see :mod:`ptower.isom`).
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import List, Tuple

from .linalg import rank, rref, subspaces
from .pcp import (
    Definition,
    PcPresentation,
    PresentationError,
    check_consistency,
    consistency_tests,
    non_defining_relations,
)
from .structure import lower_p_central

log = logging.getLogger(__name__)


@dataclass
class PCover:
    """Presentation of the p-covering group ``G* = F/[F,R]R^p`` and its tail data.

    ``cover`` has the generators of ``G`` followed by the tail generators
    (``tail_indices``); the tails span the multiplicator, so multiplicator
    coordinates are exponent vectors restricted to the tail indices.
    """

    source: PcPresentation
    cover: PcPresentation
    tail_indices: Tuple[int, ...]
    tail_relations: Tuple[tuple, ...]
    nucleus_basis: Tuple[Tuple[int, ...], ...]
    source_class: int

    @property
    def multiplicator_rank(self):
        return len(self.tail_indices)

    @property
    def nucleus_rank(self):
        return len(self.nucleus_basis)

    @property
    def multiplicator_basis(self):
        r = self.multiplicator_rank
        return tuple(tuple(int(i == k) for i in range(r)) for k in range(r))

    def tail_part(self, x):
        return tuple(x[i] for i in self.tail_indices)


def _relation_key_str(rel):
    if rel[0] == "pow":
        return f"g{rel[1] + 1}^p"
    return f"[g{rel[1] + 1},g{rel[2] + 1}]"


def p_cover(P: PcPresentation) -> PCover:
    """The p-covering group of ``P`` (requires definitions for all non-Frattini generators)."""
    cached = P._info.get("p_cover")
    if cached is not None:
        return cached
    p, n = P.p, P.n
    rels = non_defining_relations(P)
    m = len(rels)
    tail_of = {rel: n + k for k, rel in enumerate(rels)}
    N = n + m

    def padded(v, rel):
        out = list(v) + [0] * m
        t = tail_of.get(rel)
        if t is not None:
            out[t] = 1
        return tuple(out)

    power_rhs = [padded(P.power_rhs[i], ("pow", i)) for i in range(n)] + [(0,) * N] * m
    comm_rhs = {}
    for j in range(n):
        for i in range(j):
            v = padded(P.comm_rhs.get((j, i), (0,) * n), ("comm", j, i))
            if any(v):
                comm_rhs[(j, i)] = v
    E = PcPresentation(p, N, power_rhs, comm_rhs, infer_definitions=False)

    relations = []
    for name, left, right in consistency_tests(E, range(n)):
        if left[:n] != right[:n]:
            raise PresentationError(f"input presentation is inconsistent ({name})")
        diff = tuple((a - b) % p for a, b in zip(left[n:], right[n:]))
        if any(diff):
            relations.append(diff)
    ech, pivots = rref(relations, p, m) if relations else ([], [])
    free = [k for k in range(m) if k not in pivots]
    col = {k: c for c, k in enumerate(free)}

    def reduce(tail_vec):
        """Express a tail vector in the surviving tails."""
        out = [0] * len(free)
        for k, e in enumerate(tail_vec):
            if not e:
                continue
            if k in col:
                out[col[k]] = (out[col[k]] + e) % p
            else:
                row = ech[pivots.index(k)]
                for f in free:
                    if row[f]:
                        out[col[f]] = (out[col[f]] - e * row[f]) % p
        return tuple(out)

    r = len(free)
    n2 = n + r

    def cover_rhs(v):
        return tuple(v[:n]) + reduce(v[n:])

    c_power = [cover_rhs(power_rhs[i]) for i in range(n)] + [(0,) * n2] * r
    c_comm = {}
    for key, v in comm_rhs.items():
        w = cover_rhs(v)
        if any(w):
            c_comm[key] = w
    defs = list(P.definitions)
    for f in free:
        rel = rels[f]
        defs.append(Definition("pow", rel[1]) if rel[0] == "pow" else Definition("comm", rel[1], rel[2]))
    C = PcPresentation(p, n2, c_power, c_comm, defs)

    c = P.p_class
    series = lower_p_central(C)
    nuc_rows = []
    if c < len(series):
        for h in series[c].pcgs.values():
            if any(h[:n]):
                raise RuntimeError("nucleus element outside the multiplicator")
            nuc_rows.append(h[n:])
    nucleus, _ = rref(nuc_rows, p, r) if nuc_rows else ([], [])
    cov = PCover(P, C, tuple(range(n, n2)), tuple(rels[f] for f in free), tuple(nucleus), c)
    P._info["p_cover"] = cov
    log.debug("p-cover of order %d^%d: multiplicator rank %d, nucleus rank %d",
              p, n2, r, len(nucleus))
    return cov


def verify_cover(cov: PCover):
    """Consistency of the cover and ``cover / multiplicator = source``."""
    ok, failures = check_consistency(cov.cover)
    if not ok:
        return False
    n = cov.source.n
    return cov.cover.truncate(n) == cov.source


def relation_rank_gap(P) -> int:
    """Rank of the p-multiplicator minus rank of the nucleus."""
    cov = p_cover(P)
    return cov.multiplicator_rank - cov.nucleus_rank


def is_terminal(P) -> bool:
    return p_cover(P).nucleus_rank == 0


@dataclass(frozen=True)
class AllowableSubgroup:
    """A proper subspace U of the multiplicator with ``U + nucleus = multiplicator``
    (RREF basis in tail coordinates)."""

    basis: Tuple[Tuple[int, ...], ...]

    @property
    def dim(self):
        return len(self.basis)

    def __str__(self):
        return "<" + " ".join("".join(map(str, row)) for row in self.basis) + ">"


def allowable_subgroups(cov: PCover) -> List[AllowableSubgroup]:
    """All allowable subgroups, sorted by (dimension descending, RREF basis)."""
    p = cov.source.p
    r = cov.multiplicator_rank
    N = [list(v) for v in cov.nucleus_basis]
    s = len(N)
    if s == 0:
        return []
    npiv = [next(k for k, e in enumerate(v) if e) for v in N]
    W = [tuple(int(i == c) for i in range(r)) for c in range(r) if c not in npiv]
    found = set()
    for j in range(s):
        for coeffs in subspaces(s, p, j):
            A = [tuple(sum(a * N[k][c] for k, a in enumerate(row)) % p for c in range(r)) for row in coeffs]
            _, apiv = rref(coeffs, p, s) if coeffs else ([], [])
            comp = [N[k] for k in range(s) if k not in apiv]
            for vals in itertools.product(range(p), repeat=len(W) * len(comp)):
                rows = list(A)
                for wi, w in enumerate(W):
                    v = list(w)
                    for ci, cvec in enumerate(comp):
                        e = vals[wi * len(comp) + ci]
                        if e:
                            v = [(x + e * y) % p for x, y in zip(v, cvec)]
                    rows.append(tuple(v))
                basis, _ = rref(rows, p, r) if rows else ([], [])
                found.add(tuple(basis))
    return [AllowableSubgroup(b) for b in sorted(found, key=lambda b: (-len(b), b))]


def is_allowable(cov: PCover, U: AllowableSubgroup) -> bool:
    p = cov.source.p
    r = cov.multiplicator_rank
    if rank(U.basis, p, r) != len(U.basis) or len(U.basis) >= r:
        return False
    return rank(list(U.basis) + list(cov.nucleus_basis), p, r) == r


def quotient_by(cov: PCover, U: AllowableSubgroup) -> PcPresentation:
    """Presentation of ``G*/U``; the surviving tails become the new generators."""
    if not is_allowable(cov, U):
        raise ValueError(f"{U} is not an allowable subgroup")
    P, C = cov.source, cov.cover
    p, n, r = P.p, P.n, cov.multiplicator_rank
    basis, pivots = rref(U.basis, p, r) if U.basis else ([], [])
    free = [k for k in range(r) if k not in pivots]
    col = {k: c for c, k in enumerate(free)}

    def reduce(tail):
        out = [0] * len(free)
        for k, e in enumerate(tail):
            if not e:
                continue
            if k in col:
                out[col[k]] = (out[col[k]] + e) % p
            else:
                row = basis[pivots.index(k)]
                for f in free:
                    if row[f]:
                        out[col[f]] = (out[col[f]] - e * row[f]) % p
        return tuple(out)

    n2 = n + len(free)
    power_rhs = [C.power_rhs[i][:n] + reduce(C.power_rhs[i][n:]) for i in range(n)]
    power_rhs += [(0,) * n2] * len(free)
    comm_rhs = {}
    for (j, i), v in C.comm_rhs.items():
        w = v[:n] + reduce(v[n:])
        if any(w):
            comm_rhs[(j, i)] = w
    defs = list(P.definitions) + [C.definitions[n + f] for f in free]
    D = PcPresentation(p, n2, power_rhs, comm_rhs, defs)
    if D.p_class != cov.source_class + 1:
        raise RuntimeError(f"quotient by {U} has p-class {D.p_class}, expected {cov.source_class + 1}")
    return D


@dataclass
class DescendantClass:
    """One isomorphism class of immediate descendants.

    ``members`` are indices into the allowable-subgroup list; ``witnesses``
    maps each merged member to images of the Frattini generators of the
    representative in that member (an explicit isomorphism).
    """

    representative: PcPresentation
    subgroup: AllowableSubgroup
    members: List[int] = field(default_factory=list)
    witnesses: dict = field(default_factory=dict)


def descendant_classes(P) -> List[DescendantClass]:
    """Isomorphism classes of ``{G*/U : U allowable}``, in canonical order."""
    cached = P._info.get("descendant_classes")
    if cached is not None:
        return cached
    from .isom import cheap_invariants, find_isomorphism

    cov = p_cover(P)
    subs = allowable_subgroups(cov)
    classes: List[DescendantClass] = []
    keys = []
    for idx, U in enumerate(subs):
        D = quotient_by(cov, U)
        key = cheap_invariants(D)
        for cls, k in zip(classes, keys):
            if k != key:
                continue
            w = find_isomorphism(cls.representative, D)
            if w is not None:
                cls.members.append(idx)
                cls.witnesses[idx] = w
                break
        else:
            classes.append(DescendantClass(D, U, [idx]))
            keys.append(key)
    P._info["descendant_classes"] = classes
    log.info("%d allowable subgroups -> %d descendants", len(subs), len(classes))
    return classes


def immediate_descendants(P) -> List[PcPresentation]:
    """One representative per isomorphism class of immediate descendants."""
    return [c.representative for c in descendant_classes(P)]
