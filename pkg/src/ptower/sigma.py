"""Automorphisms of order 2 inducing inversion on the abelianization.

Images of ``g_j`` (j <= d) are searched over the full coset ``g_j^-1 [G,G]``,
which is exactly the inversion constraint.  Any automorphism ``a`` found this
way has ``a^2`` acting trivially on ``G/Phi(G)``; such automorphisms form a
p-group, so ``ord(a) = 2 p^k`` for odd p and ``a^(p^k)`` is an involution that
still inverts ``G^ab``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

from .isom import _layer_depths, _reduce, search_homomorphisms
from .pcp import images_from_definitions, relation_holds
from .structure import frattini_coordinates
from .linalg import rank
from .transfer import abelianization_reps, derived_subgroup


@dataclass(frozen=True)
class SigmaWitness:
    images: Tuple[tuple, ...]
    verified: bool


def _apply(P, full, v):
    return P.word_value(full, v)


def automorphism_order(P, imgs, limit=10**6) -> int:
    """Order of the automorphism with images ``imgs`` of the Frattini generators."""
    full = images_from_definitions(P, imgs, P)
    gens = [P.gen(i) for i in range(P.d)]
    cur = list(full[:P.d])
    k = 1
    while cur != gens:
        cur = [_apply(P, full, x) for x in cur]
        k += 1
        if k > limit:
            raise RuntimeError("automorphism order exceeds limit")
    return k


def power_of_automorphism(P, imgs, e):
    full = images_from_definitions(P, imgs, P)
    cur = [P.gen(i) for i in range(P.d)]
    for _ in range(e):
        cur = [_apply(P, full, x) for x in cur]
    return cur


def inverse_coset(P, j):
    """All elements of ``g_j^-1 [G,G]``."""
    D = derived_subgroup(P)
    gi = P.inverse(P.gen(j))
    return sorted(P.multiply(gi, h) for h in D.elements)


def verify_sigma(P, imgs) -> bool:
    """Homomorphism on every relation, bijective, order 2, inverting on ``G^ab``."""
    full = images_from_definitions(P, imgs, P)
    if not all(relation_holds(P, rel, full, P) for rel in P.relations()):
        return False
    coords = [frattini_coordinates(P, x) for x in imgs]
    if rank(coords, P.p, P.d) != P.d:
        return False
    if any(_apply(P, full, x) != P.gen(i) for i, x in enumerate(full[:P.d])):
        return False
    if all(x == P.gen(i) for i, x in enumerate(imgs)):
        return False
    D = derived_subgroup(P)
    for g in abelianization_reps(P):
        if D.coset_rep(_apply(P, full, g)) != D.coset_rep(P.inverse(g)):
            return False
    return True


def find_sigma(P) -> Optional[SigmaWitness]:
    """A sigma-automorphism of ``P`` if one exists (exhaustive search), else None."""
    if "sigma" in P._info:
        return P._info["sigma"]
    depths = _layer_depths(P)
    cands: List[List[tuple]] = []
    for j in range(P.d):
        seen = {}
        for x in inverse_coset(P, j):
            seen.setdefault(_reduce(x, depths), x)
        cands.append(sorted(seen.values()))
    out = None
    for imgs in search_homomorphisms(P, P, cands, depths=depths):
        k = automorphism_order(P, imgs)
        sigma = power_of_automorphism(P, imgs, k // 2)
        out = SigmaWitness(tuple(sigma), verify_sigma(P, sigma))
        if not out.verified:
            raise RuntimeError("sigma candidate failed re-verification")
        break
    P._info["sigma"] = out
    return out


def has_sigma(P) -> bool:
    return find_sigma(P) is not None
