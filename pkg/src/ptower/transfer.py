"""Transfer maps into maximal subgroups, transfer target and kernel types."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

from .abelian import AbelianInvariants, abelianization, format_invariants_multiset
from .structure import (
    derived_subgroup_of,
    frattini,
    maximal_subgroups,
    subgroup_abelianization,
    whole_group,
)

BOTTOM = None  # label of a trivial transfer kernel


def derived_subgroup(P):
    cached = P._info.get("derived_subgroup")
    if cached is None:
        cached = derived_subgroup_of(P, whole_group(P))
        P._info["derived_subgroup"] = cached
    return cached


def abelianization_reps(P):
    """Canonical representatives of ``G/[G,G]`` (zero at the depths of ``[G,G]``)."""
    D = derived_subgroup(P)
    free = [i for i in range(P.n) if i not in D.pcgs]
    reps = []
    for exps in itertools.product(range(P.p), repeat=len(free)):
        v = [0] * P.n
        for i, e in zip(free, exps):
            v[i] = e
        reps.append(tuple(v))
    return reps


def minimal_transversal(P, M):
    """Lexicographically least normal-form representative of each coset of M."""
    F = frattini(P)
    top = [i for i in range(P.n) if i not in F.pcgs]
    reps = []
    for exps in itertools.product(range(P.p), repeat=len(top)):
        v = [0] * P.n
        for i, e in zip(top, exps):
            v[i] = e
        v = tuple(v)
        if not any(P.multiply(P.inverse(r), v) in M for r in reps):
            reps.append(v)
    if len(reps) * M.order != P.order:
        raise ValueError("subgroup is not a maximal subgroup containing the Frattini subgroup")
    return sorted(reps)


def transfer_map(P, M, transversal=None) -> Dict[tuple, tuple]:
    """Evaluate ``V: G^ab -> M^ab`` on every coset of ``[G,G]``.

    Values are canonical representatives of ``M/[M,M]``; keys are the
    canonical representatives of ``G/[G,G]``.  ``transversal`` lists one left
    coset representative of M per coset (minimal normal forms by default).
    """
    T = list(transversal) if transversal is not None else minimal_transversal(P, M)
    DM = derived_subgroup_of(P, M)
    inv = [P.inverse(t) for t in T]
    out = {}
    for g in abelianization_reps(P):
        prod = P.identity
        for t in T:
            y = P.multiply(g, t)
            for j, tj_inv in enumerate(inv):
                h = P.multiply(tj_inv, y)
                if h in M:
                    break
            else:
                raise ValueError("transversal does not cover the cosets")
            prod = P.multiply(prod, h)
        out[g] = DM.coset_rep(prod)
    return out


def transfer_kernel(P, M, transversal=None):
    """Canonical representatives of ``G^ab`` lying in the kernel of the transfer."""
    ident = P.identity
    return sorted(g for g, v in transfer_map(P, M, transversal).items() if v == ident)


@dataclass(frozen=True)
class Ttt:
    """Abelianizations of the maximal subgroups, in canonical subgroup order."""

    components: Tuple[AbelianInvariants, ...]

    @property
    def multiset(self):
        return tuple(sorted(self.components))

    def __str__(self):
        return format_invariants_multiset(self.components)

    def sequence_str(self):
        return "(" + ",".join(str(c) for c in self.components) + ")"


@dataclass(frozen=True)
class Tkt:
    """Transfer kernel type of a group with abelianization [3,3].

    Labels 1..4 name the kernels equal to ``M_j/G'`` for the canonically
    ordered maximal subgroups, 0 the full ``G^ab`` and ``None`` the trivial
    kernel.
    """

    labels: Tuple[Optional[int], ...]

    def __str__(self):
        return "(" + ",".join("⊥" if x is None else str(x) for x in self.labels) + ")"

    @classmethod
    def parse(cls, text):
        body = text.strip().strip("()")
        labels = []
        for tok in body.split(","):
            tok = tok.strip()
            labels.append(None if tok in ("⊥", "_", "bot") else int(tok))
        return cls(tuple(labels))


def compute_ttt(P) -> Ttt:
    cached = P._info.get("ttt")
    if cached is None:
        cached = Ttt(tuple(subgroup_abelianization(P, M) for M in maximal_subgroups(P)))
        P._info["ttt"] = cached
    return cached


def compute_tkt(P) -> Tkt:
    cached = P._info.get("tkt")
    if cached is not None:
        return cached
    if P.p != 3 or abelianization(P) != AbelianInvariants([3, 3]):
        raise ValueError("transfer kernel types are only defined for G^ab = [3,3]")
    maxes = maximal_subgroups(P)
    labels = []
    for M in maxes:
        ker = transfer_kernel(P, M)
        if len(ker) == 9:
            labels.append(0)
        elif len(ker) == 1:
            labels.append(BOTTOM)
        else:
            x = next(k for k in ker if any(k))
            labels.append(next(j + 1 for j, N in enumerate(maxes) if x in N))
    out = Tkt(tuple(labels))
    P._info["tkt"] = out
    return out


def _act(perm, labels):
    """Relabel ``labels`` by ``perm`` (a tuple: perm[k-1] is the image of label k)."""
    out = [None] * len(labels)
    for i, lab in enumerate(labels):
        img = lab if lab in (0, BOTTOM) else perm[lab - 1]
        out[perm[i] - 1] = img
    return tuple(out)


def _perms(m):
    return [tuple(x + 1 for x in q) for q in itertools.permutations(range(m))]


def tkt_equivalent(a: Tkt, b: Tkt) -> bool:
    """Some simultaneous relabeling of positions and values carries a to b."""
    la, lb = tuple(a.labels), tuple(b.labels)
    return len(la) == len(lb) and any(_act(q, la) == lb for q in _perms(len(la)))


def tkt_compatible(candidate: Tkt, target: Tkt) -> bool:
    """Can ``candidate`` (a quotient's type) still shrink to ``target``?

    True iff after some relabeling every candidate kernel is either the full
    group (label 0) or equal to the target kernel at that position.
    """
    lc, lt = tuple(candidate.labels), tuple(target.labels)
    if len(lc) != len(lt):
        return False
    for q in _perms(len(lc)):
        c = _act(q, lc)
        if all(x == 0 or (x is not BOTTOM and x == y) or (x is BOTTOM and y is BOTTOM)
               for x, y in zip(c, lt)):
            return True
    return False


def matched_maximal_subgroups(D, Q):
    """Pair the maximal subgroups of a descendant D with those of its parent Q.

    Both presentations share their Frattini generators, so subgroups with the
    same normal vector correspond under ``D -> Q``.
    """
    md = {M.normal_vector: k for k, M in enumerate(maximal_subgroups(D))}
    mq = {M.normal_vector: k for k, M in enumerate(maximal_subgroups(Q))}
    if set(md) != set(mq):
        raise ValueError("descendant and parent have different Frattini quotients")
    return [(md[v], mq[v]) for v in sorted(md)]
