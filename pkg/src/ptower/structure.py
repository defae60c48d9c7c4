"""Subgroups, series and maximal subgroups of groups given by a pc presentation.

Subgroups are carried by induced polycyclic generating sequences (one
normalized element per leading depth).  Membership is a sift, closures add
p-th powers and commutators until the sequence is closed, and the full
element set is only materialized on request (``SubgroupHandle.elements``).
"""

from __future__ import annotations

import itertools
import os
from functools import cached_property
from typing import Dict, Iterable, List, Sequence

from .abelian import AbelianInvariants, invariants_from_layers

DEFAULT_BUDGET = 3 ** 9


class BudgetExceeded(RuntimeError):
    pass


def order_budget() -> int:
    """Largest group order for which elements may be materialized."""
    return int(os.environ.get("PTOWER_MAX_ORDER", DEFAULT_BUDGET))


def leading(x):
    for k, e in enumerate(x):
        if e:
            return k
    return -1


class SubgroupHandle:
    """A subgroup given by an induced pcgs.

    Attributes
    ----------
    generators : list of exponent vectors the subgroup was generated from
    pcgs : dict mapping leading depth to a normalized element
    order : int
    """

    def __init__(self, P, pcgs: Dict[int, tuple], generators=()):
        self.P = P
        self.pcgs = dict(sorted(pcgs.items()))
        self.generators = list(generators)
        self.order = P.p ** len(self.pcgs)
        self._powers = {}

    @property
    def depths(self):
        return list(self.pcgs)

    @property
    def rank(self):
        """log_p of the order."""
        return len(self.pcgs)

    def _pow(self, depth, k):
        key = (depth, k)
        v = self._powers.get(key)
        if v is None:
            v = self.P.power(self.pcgs[depth], k)
            self._powers[key] = v
        return v

    def sift(self, x):
        p = self.P.p
        mul = self.P.multiply
        pcgs = self.pcgs
        while True:
            l = leading(x)
            if l < 0 or l not in pcgs:
                return x
            x = mul(x, self._pow(l, p - x[l]))

    def __contains__(self, x):
        return not any(self.sift(tuple(x)))

    def coset_rep(self, x):
        """Canonical representative of ``x H`` (zero exponents at the depths of H)."""
        p = self.P.p
        for l in self.pcgs:
            if x[l]:
                x = self.P.multiply(x, self._pow(l, p - x[l]))
        return x

    def contains_subgroup(self, other: "SubgroupHandle"):
        return all(h in self for h in other.pcgs.values())

    def __eq__(self, other):
        if not isinstance(other, SubgroupHandle):
            return NotImplemented
        return self.order == other.order and self.contains_subgroup(other)

    def __hash__(self):
        return hash(self.order)

    def __repr__(self):
        return f"<SubgroupHandle order={self.P.p}^{self.rank}>"

    def element(self, exps):
        """Product ``h_1^e_1 ... h_r^e_r`` over the pcgs in depth order."""
        x = self.P.identity
        for l, e in zip(self.pcgs, exps):
            if e:
                x = self.P.multiply(x, self._pow(l, e))
        return x

    @cached_property
    def elements(self):
        if self.order > order_budget():
            raise BudgetExceeded(f"subgroup of order {self.order} exceeds budget {order_budget()}")
        return sorted(self.element(e) for e in itertools.product(range(self.P.p), repeat=self.rank))


def _normalize(P, r):
    l = leading(r)
    e = r[l]
    return P.power(r, pow(e, -1, P.p)) if e != 1 else r


def closure(P, gens: Iterable, normal_under: Sequence = (), start: Dict[int, tuple] = None) -> SubgroupHandle:
    """Subgroup generated by ``gens``; also closed under conjugation by ``normal_under``."""
    gens = [tuple(g) for g in gens]
    H = SubgroupHandle(P, dict(start or {}), gens)
    queue = list(gens)
    ident = P.identity
    normal_under = [tuple(g) for g in normal_under]
    while queue:
        x = queue.pop()
        r = H.sift(x)
        if r == ident:
            continue
        h = _normalize(P, r)
        others = list(H.pcgs.values())
        H.pcgs[leading(h)] = h
        H._powers.clear()
        queue.append(P.power(h, P.p))
        for h2 in others:
            queue.append(P.commutator(h, h2))
        for g in normal_under:
            queue.append(P.commutator(h, g))
    H.pcgs = dict(sorted(H.pcgs.items()))
    H.order = P.p ** len(H.pcgs)
    return H


def whole_group(P) -> SubgroupHandle:
    return SubgroupHandle(P, {i: P.gen(i) for i in range(P.n)}, [P.gen(i) for i in range(P.n)])


def trivial_subgroup(P) -> SubgroupHandle:
    return SubgroupHandle(P, {})


def all_generators(P):
    return [P.gen(i) for i in range(P.n)]


def normal_closure(P, gens):
    return closure(P, gens, normal_under=all_generators(P))


def commutator_subgroup(P, A: SubgroupHandle, B: SubgroupHandle):
    """``[A, B]`` for normal subgroups A, B of the whole group."""
    gens = [P.commutator(a, b) for a in A.pcgs.values() for b in B.pcgs.values()]
    return normal_closure(P, gens)


def derived_subgroup_of(P, H: SubgroupHandle) -> SubgroupHandle:
    """``[H, H]`` as a subgroup normal in ``H`` (H need not be normal in G)."""
    hs = list(H.pcgs.values())
    gens = [P.commutator(a, b) for i, a in enumerate(hs) for b in hs[:i]]
    return closure(P, gens, normal_under=hs)


def derived_series(P) -> List[SubgroupHandle]:
    series = [whole_group(P)]
    while series[-1].order > 1:
        H = series[-1]
        hs = list(H.pcgs.values())
        gens = [P.commutator(a, b) for i, a in enumerate(hs) for b in hs[:i]]
        # characteristic in a normal subgroup, so normal in G
        series.append(normal_closure(P, gens))
        if series[-1].order == H.order:
            raise RuntimeError("derived series stalled: group is not a p-group")
    return series


def derived_length(P) -> int:
    return len(derived_series(P)) - 1


def lower_p_central(P) -> List[SubgroupHandle]:
    """``P_0 = G``, ``P_k = P_{k-1}^p [G, P_{k-1}]``, down to the trivial group."""
    cached = P._info.get("lower_p_central")
    if cached is not None:
        return cached
    gens = all_generators(P)
    series = [whole_group(P)]
    while series[-1].order > 1:
        prev = list(series[-1].pcgs.values())
        new = [P.power(h, P.p) for h in prev]
        new += [P.commutator(h, g) for h in prev for g in gens]
        nxt = normal_closure(P, new)
        if nxt.order == series[-1].order:
            raise RuntimeError("lower exponent-p central series stalled")
        series.append(nxt)
    P._info["lower_p_central"] = series
    return series


def p_class(P) -> int:
    return len(lower_p_central(P)) - 1


def generator_weights(P):
    series = lower_p_central(P)
    weights = []
    for i in range(P.n):
        g = P.gen(i)
        w = 1
        while w < len(series) and g in series[w]:
            w += 1
        weights.append(w)
    return tuple(weights)


def is_weighted(P) -> bool:
    """Weights non-decreasing and every ``P_k`` spanned by the generators of weight > k."""
    w = P.weights
    if any(a > b for a, b in zip(w, w[1:])):
        return False
    for k, S in enumerate(lower_p_central(P)):
        if S.rank != sum(1 for x in w if x > k):
            return False
    return True


def frattini(P) -> SubgroupHandle:
    series = lower_p_central(P)
    return series[1] if len(series) > 1 else series[0]


def frattini_rank(P) -> int:
    return P.n - frattini(P).rank


def frattini_coordinates(P, x):
    """Coordinates of ``x`` in ``G/Phi(G)`` w.r.t. the generators outside Phi."""
    F = frattini(P)
    r = F.coset_rep(x)
    return tuple(r[i] for i in range(P.n) if i not in F.pcgs)


def _normalized_vectors(p, d):
    out = []
    for v in itertools.product(range(p), repeat=d):
        if any(v) and v[leading(v)] == 1:
            out.append(v)
    return sorted(out)


def hyperplane_normals(p, d):
    """Normalized nonzero vectors of F_p^d in lexicographic order."""
    return _normalized_vectors(p, d)


def maximal_subgroups(P) -> List[SubgroupHandle]:
    """Index-p subgroups ordered by their normal vector in ``G/Phi(G)``."""
    cached = P._info.get("maximal_subgroups")
    if cached is not None:
        return cached
    F = frattini(P)
    top = [i for i in range(P.n) if i not in F.pcgs]
    d = len(top)
    out = []
    for a in hyperplane_normals(P.p, d):
        gens = []
        # basis of the hyperplane a.x = 0
        for v in _hyperplane_basis(a, P.p):
            x = P.identity
            for i, e in zip(top, v):
                if e:
                    x = P.multiply(x, P.gen(i, e))
            gens.append(x)
        M = closure(P, gens, start=F.pcgs)
        M.normal_vector = a
        out.append(M)
    P._info["maximal_subgroups"] = out
    return out


def _hyperplane_basis(a, p):
    d = len(a)
    l = leading(a)
    basis = []
    for j in range(d):
        if j == l:
            continue
        v = [0] * d
        v[j] = 1
        v[l] = (-a[j]) % p  # a[l] == 1
        basis.append(tuple(v))
    return basis


def subgroup_abelianization(P, H: SubgroupHandle) -> AbelianInvariants:
    """Invariants of ``H/[H,H]``, from the orders of ``H^(p^k)[H,H]``."""
    D = derived_subgroup_of(P, H)
    hs = list(H.pcgs.values())
    ranks = [H.rank]
    cur = hs
    while ranks[-1] > D.rank:
        cur = [P.power(h, P.p) for h in cur]
        S = closure(P, cur, start=D.pcgs)
        ranks.append(S.rank)
        if len(ranks) > 64:
            raise RuntimeError("agemo series did not terminate")
    return invariants_from_layers(P.p, ranks)


def element_order_histogram(P):
    from collections import Counter
    if P.order > order_budget():
        raise BudgetExceeded(f"group of order {P.order} exceeds budget")
    G = whole_group(P)
    return dict(sorted(Counter(P.element_order(x) for x in G.elements).items()))


def conjugacy_classes(P):
    """Partition of the group into conjugacy classes (brute force)."""
    if P.order > order_budget():
        raise BudgetExceeded(f"group of order {P.order} exceeds budget")
    F = frattini(P)
    gens = [P.gen(i) for i in range(P.n) if i not in F.pcgs]
    seen = set()
    classes = []
    for x in whole_group(P).elements:
        if x in seen:
            continue
        orbit = [x]
        seen.add(x)
        k = 0
        while k < len(orbit):
            y = orbit[k]
            k += 1
            for g in gens:
                z = P.conjugate(y, g)
                if z not in seen:
                    seen.add(z)
                    orbit.append(z)
        classes.append(orbit)
    return classes


def class_size_histogram(P):
    from collections import Counter
    return dict(sorted(Counter(len(c) for c in conjugacy_classes(P)).items()))


def center(P) -> SubgroupHandle:
    """Centre, by brute force over the elements."""
    F = frattini(P)
    gens = [P.gen(i) for i in range(P.n) if i not in F.pcgs]
    z = [x for x in whole_group(P).elements
         if all(P.multiply(x, g) == P.multiply(g, x) for g in gens)]
    return closure(P, z)
