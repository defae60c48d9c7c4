"""Abelian invariants: Smith normal form, abelianization, quotient dominance."""

from __future__ import annotations

from typing import List, Sequence, Tuple


class AbelianInvariants(tuple):
    """Orders of cyclic factors, ascending: ``AbelianInvariants([3, 9])`` is C3 x C9.

    The empty tuple is the trivial group.
    """

    def __new__(cls, invariants=()):
        inv = sorted(int(x) for x in invariants if int(x) != 1)
        if any(x < 1 for x in inv):
            raise ValueError(f"invariants must be positive, got {list(invariants)}")
        return super().__new__(cls, inv)

    @property
    def order(self):
        out = 1
        for x in self:
            out *= x
        return out

    @property
    def rank(self):
        return len(self)

    def __str__(self):
        return "[" + ",".join(str(x) for x in self) + "]"

    def __repr__(self):
        return f"AbelianInvariants({list(self)})"

    @classmethod
    def parse(cls, text):
        text = text.strip()
        if not (text.startswith("[") and text.endswith("]")):
            raise ValueError(f"expected [a,b,...], got {text!r}")
        body = text[1:-1].strip()
        return cls([int(t) for t in body.split(",")] if body else [])


def _prime_of(inv):
    for x in inv:
        k = 2
        while x % k:
            k += 1
        return k
    return None


def smith_normal_form(M: Sequence[Sequence[int]]) -> List[int]:
    """Diagonal of the Smith normal form of an integer matrix.

    Returns ``min(rows, cols)`` entries ``d_1 | d_2 | ...`` (non-negative;
    zeros last), computed with exact integer row and column operations.
    """
    A = [list(map(int, row)) for row in M]
    rows = len(A)
    cols = len(A[0]) if rows else 0
    diag = []
    for t in range(min(rows, cols)):
        while True:
            nz = [(abs(A[i][j]), i, j) for i in range(t, rows) for j in range(t, cols) if A[i][j]]
            if not nz:
                break
            _, i, j = min(nz)
            A[t], A[i] = A[i], A[t]
            for row in A:
                row[t], row[j] = row[j], row[t]
            piv = A[t][t]
            clean = True
            for i in range(t + 1, rows):
                q = A[i][t] // piv
                if q:
                    A[i] = [a - q * b for a, b in zip(A[i], A[t])]
                clean = clean and A[i][t] == 0
            for j in range(t + 1, cols):
                q = A[t][j] // piv
                if q:
                    for row in A:
                        row[j] -= q * row[t]
                clean = clean and A[t][j] == 0
            if not clean:
                continue
            bad = next((i for i in range(t + 1, rows)
                        if any(A[i][j] % piv for j in range(t + 1, cols))), None)
            if bad is None:
                break
            A[t] = [a + b for a, b in zip(A[t], A[bad])]
        diag.append(abs(A[t][t]) if t < rows and t < cols else 0)
    return diag


def abelianization(P) -> AbelianInvariants:
    """Invariants of ``G/[G,G]`` from the relation matrix of the presentation."""
    n, p = P.n, P.p
    if n == 0:
        return AbelianInvariants()
    rows = []
    for i, w in enumerate(P.power_rhs):
        row = [-e for e in w]
        row[i] += p
        rows.append(row)
    for w in P.comm_rhs.values():
        rows.append(list(w))
    diag = smith_normal_form(rows)
    if len(diag) < n or 0 in diag:
        raise ValueError("relation matrix is not of full rank; presentation is not finite")
    return AbelianInvariants(diag)


def invariants_from_layers(p, ranks) -> AbelianInvariants:
    """Invariants of an abelian p-group A from ``ranks[k] = log_p |A^(p^k)| + const``.

    ``ranks`` must be decreasing to its final value (the constant offset).
    """
    r = [x - ranks[-1] for x in ranks]
    # number of factors of order >= p^(k+1) is r[k] - r[k+1]
    ge = [r[k] - r[k + 1] for k in range(len(r) - 1)] + [0]
    inv = []
    for k in range(len(ge) - 1):
        inv += [p ** (k + 1)] * (ge[k] - ge[k + 1])
    return AbelianInvariants(inv)


def is_quotient(A: Sequence[int], B: Sequence[int]) -> bool:
    """True iff the abelian p-group B is an epimorphic image of A.

    Both lists are sorted descending, padded with 1s to equal length, and
    each factor of B must divide the corresponding factor of A.
    """
    pa, pb = _prime_of(A), _prime_of(B)
    if pa is not None and pb is not None and pa != pb:
        raise ValueError(f"mismatched primes {pa} and {pb}")
    a = sorted(A, reverse=True)
    b = sorted(B, reverse=True)
    m = max(len(a), len(b))
    a += [1] * (m - len(a))
    b += [1] * (m - len(b))
    return all(x % y == 0 for x, y in zip(a, b))


def quotient_matching(node: Sequence[Sequence[int]], target: Sequence[Sequence[int]]):
    """A perfect matching ``node[i] -> target[perm[i]]`` with each node entry a
    quotient of its target partner, or ``None`` if there is none."""
    import itertools
    if len(node) != len(target):
        return None
    for perm in itertools.permutations(range(len(target))):
        if all(is_quotient(target[perm[i]], node[i]) for i in range(len(node))):
            return perm
    return None


def parse_invariants_multiset(text) -> Tuple[AbelianInvariants, ...]:
    """Parse ``{[3,9]^3,[9,27]}`` style notation into a sorted tuple."""
    text = text.strip()
    if text.startswith("{") and text.endswith("}"):
        text = text[1:-1]
    out = []
    depth = 0
    cur = ""
    for ch in text:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if ch == "," and depth == 0:
            out.append(cur)
            cur = ""
        else:
            cur += ch
    if cur.strip():
        out.append(cur)
    result = []
    for item in out:
        item = item.strip()
        mult = 1
        if "^" in item.split("]")[-1]:
            item, m = item.rsplit("^", 1)
            mult = int(m)
        result += [AbelianInvariants.parse(item)] * mult
    return tuple(sorted(result))


def format_invariants_multiset(items) -> str:
    from collections import Counter
    c = Counter(tuple(x) for x in items)
    parts = []
    for inv in sorted(c):
        s = str(AbelianInvariants(inv))
        parts.append(s if c[inv] == 1 else f"{s}^{c[inv]}")
    return "{" + ",".join(parts) + "}"
