"""Isomorphism testing by backtracking over images of the Frattini generators.

A homomorphism from a group with definitions is fixed by the images of its
weight-1 generators; images of later generators follow from the definition
tags and every relation is then checked by collection.  Two reductions keep
the candidate lists short:

* the last nontrivial term ``L`` of the lower exponent-p central series of the
  target is central of exponent p and lies below weight 2, so changing an
  image by an element of ``L`` never changes whether a relation holds; images
  are searched modulo ``L``;
* composing with inner automorphisms of the target preserves being an
  isomorphism, so the image of ``g_1`` only ranges over conjugacy-class
  representatives.
"""

from __future__ import annotations

import itertools
from typing import List, Optional, Sequence

from .abelian import abelianization
from .pcp import images_from_definitions, non_defining_relations, relation_holds
from .structure import (
    class_size_histogram,
    derived_length,
    element_order_histogram,
    frattini,
    frattini_coordinates,
    lower_p_central,
)
from .linalg import rank, rref


def _layer_depths(H):
    """Depths of the last nontrivial lower exponent-p central term (when usable)."""
    series = lower_p_central(H)
    if len(series) < 3:
        return set()
    L = series[-2]
    return set(L.pcgs)


def _reduce(x, depths):
    if not depths:
        return x
    return tuple(0 if i in depths else e for i, e in enumerate(x))


def _ordered_relations(G):
    w = G.weights
    rels = non_defining_relations(G)

    def weight(rel):
        if rel[0] == "pow":
            return w[rel[1]] + 1
        return w[rel[1]] + w[rel[2]]

    return sorted(rels, key=lambda r: (weight(r), r))


def _orbit_reps(H, cands, depths):
    """Representatives of ``cands`` (a set closed under conjugation mod L) under conjugation."""
    F = frattini(H)
    gens = [H.gen(i) for i in range(H.n) if i not in F.pcgs]
    seen = set()
    reps = []
    for x in sorted(cands):
        if x in seen:
            continue
        reps.append(x)
        seen.add(x)
        stack = [x]
        while stack:
            y = stack.pop()
            for g in gens:
                z = _reduce(H.conjugate(y, g), depths)
                if z not in seen:
                    seen.add(z)
                    stack.append(z)
    return reps


def search_homomorphisms(G, H, candidates: Sequence[Sequence[tuple]], *, require_bijective=True,
                         depths=None, reduce_first=True):
    """Yield images ``[x_1..x_d]`` of G's Frattini generators in H defining a homomorphism.

    ``candidates[j]`` lists the allowed images of ``g_j``.  With
    ``reduce_first`` the first list is cut down to conjugacy-class
    representatives.
    """
    d = len(candidates)
    rels = _ordered_relations(G)
    depths = _layer_depths(H) if depths is None else depths
    tried = set()

    def check(imgs):
        key = tuple(imgs)
        if key in tried:
            return None
        tried.add(key)
        if require_bijective:
            coords = [frattini_coordinates(H, x) for x in imgs]
            if rank(coords, H.p, len(coords[0]) if coords else 0) != H.d:
                return None
        full = images_from_definitions(G, imgs, H)
        for rel in rels:
            if not relation_holds(G, rel, full, H):
                return None
        return list(imgs)

    first = list(candidates[0])
    if reduce_first and d:
        first = _orbit_reps(H, {_reduce(x, depths) for x in first}, depths)
        # keep an actual candidate per reduced class
        by_red = {}
        for x in candidates[0]:
            by_red.setdefault(_reduce(x, depths), x)
        first = [by_red[x] for x in first if x in by_red]
    rest = []
    for cl in candidates[1:]:
        by_red = {}
        for x in cl:
            by_red.setdefault(_reduce(x, depths), x)
        rest.append(sorted(by_red.values()))

    def rec(prefix):
        if len(prefix) == d:
            out = check(prefix)
            if out is not None:
                yield out
            return
        for x in rest[len(prefix) - 1]:
            yield from rec(prefix + [x])

    for x in first:
        yield from rec([x])


def _normalize_vec(v, p):
    lead = next(k for k, e in enumerate(v) if e)
    inv = pow(v[lead], -1, p)
    return tuple((e * inv) % p for e in v)


def maximal_subgroup_data(P):
    """Per maximal subgroup (keyed by normal vector): abelianization and the
    image of its transfer kernel in the Frattini quotient (an RREF basis)."""
    cached = P._info.get("maxdata")
    if cached is not None:
        return cached
    from .structure import maximal_subgroups, subgroup_abelianization
    from .transfer import transfer_kernel
    out = {}
    for M in maximal_subgroups(P):
        ker = [frattini_coordinates(P, x) for x in transfer_kernel(P, M)]
        span, _ = rref(ker, P.p, P.d)
        out[M.normal_vector] = (subgroup_abelianization(P, M), tuple(span))
    P._info["maxdata"] = out
    return out


def _mat_mul(a, A, p):
    return tuple(sum(a[k] * A[k][j] for k in range(len(a))) % p for j in range(len(A[0])))


def _mat_inv(A, p):
    d = len(A)
    aug = [list(A[i]) + [int(i == j) for j in range(d)] for i in range(d)]
    rows, piv = rref(aug, p, d)
    if piv != list(range(d)):
        return None
    return [tuple(r[d:]) for r in rows]


def frattini_maps(G, H, max_d=3):
    """Matrices A (rows: Frattini coordinates of the images of ``g_1..g_d``)
    compatible with the abelianizations and transfer kernels of the maximal
    subgroups.  Returns None when ``d`` is too large to enumerate."""
    p, d = G.p, G.d
    if d > max_d:
        return None
    dg, dh = maximal_subgroup_data(G), maximal_subgroup_data(H)
    out = []
    for A, Ainv in _gl(d, p):
        ok = True
        for v, (ab, ker) in dg.items():
            u = _normalize_vec(tuple(sum(Ainv[i][k] * v[k] for k in range(d)) % p for i in range(d)), p)
            ab2, ker2 = dh[u]
            if ab != ab2:
                ok = False
                break
            img, _ = rref([_mat_mul(a, A, p) for a in ker], p, d)
            if tuple(img) != ker2:
                ok = False
                break
        if ok:
            out.append(A)
    return out


def find_isomorphism(G, H, hints=()) -> Optional[List[tuple]]:
    """Images of G's Frattini generators defining an isomorphism ``G -> H``, or None."""
    if (G.p, G.order, G.d, G.p_class) != (H.p, H.order, H.d, H.p_class):
        return None
    if abelianization(G) != abelianization(H):
        return None
    depths = _layer_depths(H)
    pool = _candidate_pool(H, depths)
    orders = [G.element_order(G.gen(j)) for j in range(G.d)]

    def cands(j, row):
        return [x for x in pool.get(row, ()) if H.element_order(x) == orders[j]]

    maps = frattini_maps(G, H)
    if maps is None:
        rows = sorted(pool)
        maps = [A for A in itertools.product(rows, repeat=G.d)]
    for h in hints:
        if verify_isomorphism(G, H, h):
            return list(h)
    for A in maps:
        lists = [cands(j, A[j]) for j in range(G.d)]
        if not all(lists):
            continue
        for imgs in search_homomorphisms(G, H, lists, depths=depths):
            return imgs
    return None


def _candidate_pool(H, depths):
    """Elements outside the Frattini subgroup, one per coset of the last layer,
    grouped by Frattini coordinates."""
    cached = H._info.get("iso_pool")
    if cached is not None:
        return cached
    F = frattini(H)
    top = [i for i in range(H.n) if i not in F.pcgs]
    keep = [i for i in range(H.n) if i not in depths]
    out = {}
    for exps in itertools.product(range(H.p), repeat=len(keep)):
        v = [0] * H.n
        for i, e in zip(keep, exps):
            v[i] = e
        if any(v[i] for i in top):
            x = tuple(v)
            out.setdefault(frattini_coordinates(H, x), []).append(x)
    H._info["iso_pool"] = out
    return out


def verify_isomorphism(G, H, imgs) -> bool:
    """Re-check an isomorphism witness: every relation of G, and surjectivity."""
    coords = [frattini_coordinates(H, x) for x in imgs]
    if G.order != H.order or rank(coords, H.p, len(coords[0])) != H.d:
        return False
    full = images_from_definitions(G, imgs, H)
    return all(relation_holds(G, rel, full, H) for rel in G.relations())


def is_isomorphic(G, H) -> bool:
    if fingerprint(G) != fingerprint(H):
        return False
    return find_isomorphism(G, H) is not None


def quotient_abelianizations(P):
    """Abelianizations of ``G/P_k(G)`` for ``k = 1..c``."""
    out = []
    w = P.weights
    for k in range(1, P.p_class + 1):
        m = sum(1 for x in w if x <= k)
        out.append(tuple(abelianization(P.truncate(m))))
    return tuple(out)


def _gl(d, p):
    for A in itertools.product(itertools.product(range(p), repeat=d), repeat=d):
        Ainv = _mat_inv(A, p)
        if Ainv is not None:
            yield A, Ainv


def canonical_maximal_data(P, max_d=3):
    """Least relabeling of :func:`maximal_subgroup_data` under ``GL(d, p)``
    acting on the Frattini quotient (None when ``d > max_d``)."""
    p, d = P.p, P.d
    if d > max_d:
        return None
    data = maximal_subgroup_data(P)
    best = None
    for A, Ainv in _gl(d, p):
        moved = []
        for v, (ab, ker) in data.items():
            u = _normalize_vec(tuple(sum(Ainv[i][k] * v[k] for k in range(d)) % p for i in range(d)), p)
            img, _ = rref([_mat_mul(a, A, p) for a in ker], p, d)
            moved.append((u, tuple(ab), tuple(img)))
        moved.sort()
        key = tuple(moved)
        if best is None or key < best:
            best = key
    return best


def cheap_invariants(P):
    """Invariants that need no element enumeration."""
    cached = P._info.get("cheap_invariants")
    if cached is None:
        cached = (P.order, P.p_class, tuple(abelianization(P)), quotient_abelianizations(P),
                  canonical_maximal_data(P))
        P._info["cheap_invariants"] = cached
    return cached


def fingerprint(P):
    """Isomorphism invariants, including brute-force order and class statistics."""
    cached = P._info.get("fingerprint")
    if cached is None:
        cached = cheap_invariants(P) + (
            derived_length(P),
            tuple(element_order_histogram(P).items()),
            tuple(class_size_histogram(P).items()),
        )
        P._info["fingerprint"] = cached
    return cached
