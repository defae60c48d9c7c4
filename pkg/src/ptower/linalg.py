"""Small dense linear algebra over F_p (row echelon forms, subspace enumeration)."""

from __future__ import annotations

import itertools
from typing import List, Sequence, Tuple


def rref(rows: Sequence[Sequence[int]], p: int, ncols: int = None):
    """Reduced row echelon form; returns ``(rows, pivots)`` with zero rows dropped."""
    A = [[x % p for x in r] for r in rows]
    if ncols is None:
        ncols = len(A[0]) if A else 0
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(A)) if A[i][c]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = pow(A[r][c], -1, p)
        A[r] = [(x * inv) % p for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [(x - f * y) % p for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == len(A):
            break
    return [tuple(row) for row in A[:r]], pivots


def rank(rows, p, ncols=None):
    return len(rref(rows, p, ncols)[0])


def span_contains(basis, v, p):
    return rank(list(basis) + [v], p, len(v)) == rank(basis, p, len(v))


def subspaces(dim: int, p: int, k: int) -> List[Tuple[Tuple[int, ...], ...]]:
    """All k-dimensional subspaces of F_p^dim as RREF bases, in lexicographic order."""
    out = []
    for pivots in itertools.combinations(range(dim), k):
        free_slots = []
        for r, pc in enumerate(pivots):
            for c in range(pc + 1, dim):
                if c not in pivots:
                    free_slots.append((r, c))
        for vals in itertools.product(range(p), repeat=len(free_slots)):
            rows = [[0] * dim for _ in range(k)]
            for r, pc in enumerate(pivots):
                rows[r][pc] = 1
            for (r, c), v in zip(free_slots, vals):
                rows[r][c] = v
            out.append(tuple(tuple(row) for row in rows))
    return sorted(out)


def gaussian_binomial(n, k, q):
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den
