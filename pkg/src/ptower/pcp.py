"""Power-commutator presentations of finite p-groups and element arithmetic.

Elements are exponent vectors: tuples ``(a_1, ..., a_n)`` with ``0 <= a_i < p``
standing for the normal word ``g_1^a_1 ... g_n^a_n``.  Generator indices are
0-based in the API and 1-based in the text format and in reports.

Multiplication is collection from the left: to multiply a normal word by a
generator ``g_i`` the suffix behind ``g_i`` is conjugated by ``g_i`` (which only
involves the subgroup ``<g_{i+1}, ..., g_n>``) and the power relation of
``g_i`` is applied on overflow.  Intermediate results are memoized per
presentation, which keeps products cheap at the group orders used here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

ExponentVector = Tuple[int, ...]

MAX_PRIME = 1 << 16


class PresentationError(ValueError):
    """Raised for malformed or unusable presentations."""


@dataclass(frozen=True)
class Definition:
    """How a non-weight-1 generator arises from earlier ones.

    ``kind`` is ``"pow"`` (``g_a^p = w g_i``) or ``"comm"``
    (``[g_a, g_b] = w g_i``).  ``b`` is ``None`` for powers.  ``w`` is the
    part of the right-hand side in front of ``g_i``.
    """

    kind: str
    a: int
    b: Optional[int] = None

    def __str__(self):
        if self.kind == "pow":
            return f"g{self.a + 1}^p"
        return f"[g{self.a + 1},g{self.b + 1}]"


def _is_prime(p):
    if p < 2:
        return False
    k = 2
    while k * k <= p:
        if p % k == 0:
            return False
        k += 1
    return True


class PcPresentation:
    """A power-commutator presentation ``<g_1..g_n | g_i^p = w_i, [g_j,g_i] = w_ji>``.

    Parameters
    ----------
    p : int
        The prime.
    n : int
        Number of generators.
    power_rhs : sequence of exponent vectors, optional
        ``power_rhs[i]`` is the normal form of ``g_i^p``; defaults to trivial.
    comm_rhs : dict, optional
        ``comm_rhs[(j, i)]`` for ``j > i`` is the normal form of
        ``[g_j, g_i] = g_j^-1 g_i^-1 g_j g_i``; missing entries are trivial.
    definitions : sequence, optional
        Definition of each generator (``None`` for defining generators).
        Inferred from the relations when omitted.

    The object is immutable; arithmetic caches are private and only ever
    memoize pure functions of the relations.
    """

    def __init__(self, p, n, power_rhs=None, comm_rhs=None, definitions=None,
                 *, infer_definitions=True):
        if not isinstance(p, int) or not _is_prime(p) or p > MAX_PRIME:
            raise PresentationError(f"p must be a prime <= {MAX_PRIME}, got {p!r}")
        if n < 0:
            raise PresentationError("n must be non-negative")
        self.p = p
        self.n = n
        zero = (0,) * n
        pw = []
        for i in range(n):
            v = zero if power_rhs is None else power_rhs[i]
            pw.append(self._check_rhs(v, i, f"power relation of g{i + 1}"))
        self.power_rhs: Tuple[ExponentVector, ...] = tuple(pw)
        cm: Dict[Tuple[int, int], ExponentVector] = {}
        for key, v in (comm_rhs or {}).items():
            j, i = key
            if not (0 <= i < j < n):
                raise PresentationError(f"bad commutator index ({j + 1},{i + 1})")
            v = self._check_rhs(v, j, f"[g{j + 1},g{i + 1}]")
            if any(v):
                cm[(j, i)] = v
        self.comm_rhs: Dict[Tuple[int, int], ExponentVector] = cm

        # conj[i][k] = g_k^(g_i) = g_k [g_k, g_i], for k > i
        self._conj: List[Dict[int, ExponentVector]] = []
        for i in range(n):
            row = {}
            for k in range(i + 1, n):
                v = list(cm.get((k, i), zero))
                v[k] = 1
                row[k] = tuple(v)
            self._conj.append(row)
        self._gen_cache: Dict[Tuple[int, ExponentVector], ExponentVector] = {}
        self._conj_cache: Dict[Tuple[int, ExponentVector], ExponentVector] = {}
        self._inv_cache: Dict[ExponentVector, ExponentVector] = {}
        self._info: dict = {}

        if definitions is not None:
            if len(definitions) != n:
                raise PresentationError("need one definition entry per generator")
            self.definitions = tuple(definitions)
        elif infer_definitions:
            self.definitions = infer_definitions_for(self)
        else:
            self.definitions = (None,) * n

    def _check_rhs(self, v, lead, what):
        v = tuple(int(e) for e in v)
        if len(v) != self.n:
            raise PresentationError(f"{what}: expected {self.n} exponents")
        for k, e in enumerate(v):
            if not 0 <= e < self.p:
                raise PresentationError(f"{what}: exponent {e} not reduced mod {self.p}")
            if e and k <= lead:
                raise PresentationError(
                    f"{what}: right side involves g{k + 1}, must only use later generators")
        return v

    # -- basic data -------------------------------------------------------

    @property
    def identity(self) -> ExponentVector:
        return (0,) * self.n

    @property
    def order(self) -> int:
        return self.p ** self.n

    def gen(self, i, e=1) -> ExponentVector:
        v = [0] * self.n
        v[i] = e % self.p
        return tuple(v)

    def relation_rhs(self, rel):
        """Right side of a relation key ``("pow", a)`` or ``("comm", j, i)``."""
        if rel[0] == "pow":
            return self.power_rhs[rel[1]]
        return self.comm_rhs.get((rel[1], rel[2]), self.identity)

    def relations(self):
        """All relation keys in canonical order: powers by i, then commutators by (j, i)."""
        keys = [("pow", i) for i in range(self.n)]
        keys += [("comm", j, i) for j in range(self.n) for i in range(j)]
        return keys

    def __eq__(self, other):
        if not isinstance(other, PcPresentation):
            return NotImplemented
        return (self.p, self.n, self.power_rhs, self.comm_rhs) == (
            other.p, other.n, other.power_rhs, other.comm_rhs)

    def __hash__(self):
        return hash((self.p, self.n, self.power_rhs, tuple(sorted(self.comm_rhs.items()))))

    def __repr__(self):
        return f"<PcPresentation p={self.p} n={self.n} order={self.p}^{self.n}>"

    # -- arithmetic -------------------------------------------------------

    def _conj_suffix(self, i, v):
        """``v^(g_i)`` for ``v`` in ``<g_{i+1}..g_n>`` (full-length vectors)."""
        key = (i, v)
        out = self._conj_cache.get(key)
        if out is not None:
            return out
        acc = self.identity
        row = self._conj[i]
        for k in range(i + 1, self.n):
            e = v[k]
            if e:
                c = row[k]
                for _ in range(e):
                    acc = self.multiply(acc, c)
        self._conj_cache[key] = acc
        return acc

    def _mul_gen(self, x, i):
        """``x * g_i``."""
        suffix = x[i:]
        key = (i, suffix)
        out = self._gen_cache.get(key)
        if out is None:
            p = self.p
            v = (0,) * (i + 1) + x[i + 1:]
            if any(v):
                v = self._conj_suffix(i, v)
            a = x[i] + 1
            if a == p:
                a = 0
                v = self.multiply(self.power_rhs[i], v)
            out = (a,) + v[i + 1:]
            self._gen_cache[key] = out
        return x[:i] + out

    def multiply(self, x: ExponentVector, y: ExponentVector) -> ExponentVector:
        for i, e in enumerate(y):
            for _ in range(e):
                x = self._mul_gen(x, i)
        return x

    def inverse(self, x: ExponentVector) -> ExponentVector:
        out = self._inv_cache.get(x)
        if out is not None:
            return out
        p = self.p
        r = x
        y = self.identity
        for i in range(self.n):
            e = r[i]
            if e:
                for _ in range(p - e):
                    r = self._mul_gen(r, i)
                    y = self._mul_gen(y, i)
        self._inv_cache[x] = y
        return y

    def power(self, x: ExponentVector, k: int) -> ExponentVector:
        if k < 0:
            x, k = self.inverse(x), -k
        result = self.identity
        base = x
        while k:
            if k & 1:
                result = self.multiply(result, base)
            k >>= 1
            if k:
                base = self.multiply(base, base)
        return result

    def commutator(self, x, y):
        """``[x, y] = x^-1 y^-1 x y``."""
        return self.multiply(self.inverse(self.multiply(y, x)), self.multiply(x, y))

    def conjugate(self, x, g):
        """``x^g = g^-1 x g``."""
        return self.multiply(self.inverse(g), self.multiply(x, g))

    def element_order(self, x) -> int:
        k = 1
        ident = self.identity
        while x != ident:
            x = self.power(x, self.p)
            k *= self.p
        return k

    def collect(self, word: Iterable[Tuple[int, int]]) -> ExponentVector:
        """Normal form of a word given as ``(generator index, exponent)`` pairs (0-based)."""
        result = self.identity
        for g, e in word:
            if not 0 <= g < self.n:
                raise IndexError(f"generator index {g} out of range for n={self.n}")
            result = self.multiply(result, self.power(self.gen(g), e))
        return result

    def word_value(self, images: Sequence[ExponentVector], v: ExponentVector, target=None):
        """Evaluate the normal word ``v`` with ``g_i`` replaced by ``images[i]`` in ``target``."""
        target = self if target is None else target
        acc = target.identity
        for i, e in enumerate(v):
            if e:
                acc = target.multiply(acc, target.power(images[i], e))
        return acc

    # -- derived structure (lazily computed) --------------------------------

    def _cached(self, name, fn):
        if name not in self._info:
            self._info[name] = fn()
        return self._info[name]

    @property
    def weights(self) -> Tuple[int, ...]:
        from .structure import generator_weights
        return self._cached("weights", lambda: generator_weights(self))

    @property
    def d(self) -> int:
        """Generator rank (rank of the Frattini quotient)."""
        from .structure import frattini_rank
        return self._cached("d", lambda: frattini_rank(self))

    @property
    def p_class(self) -> int:
        return max(self.weights, default=0)

    def is_weighted(self) -> bool:
        from .structure import is_weighted
        return self._cached("weighted", lambda: is_weighted(self))

    def truncate(self, m: int) -> "PcPresentation":
        """Quotient by ``<g_{m+1}, ..., g_n>`` (valid when that is normal)."""
        pw = [v[:m] for v in self.power_rhs[:m]]
        cm = {k: v[:m] for k, v in self.comm_rhs.items() if k[0] < m and any(v[:m])}
        return PcPresentation(self.p, m, pw, cm, self.definitions[:m])

    def replace(self, power_rhs=None, comm_rhs=None, definitions=None):
        """Copy with some relations replaced; definitions are re-inferred unless given."""
        pw = list(self.power_rhs)
        for i, v in (power_rhs or {}).items():
            pw[i] = v
        cm = dict(self.comm_rhs)
        for k, v in (comm_rhs or {}).items():
            cm[k] = v
        return PcPresentation(self.p, self.n, pw, cm, definitions)


def _definition_candidates(P, i):
    """Relations whose right side ends in exactly ``g_i`` (exponent 1)."""
    out = []
    for rel in P.relations():
        lhs_max = rel[1]
        if lhs_max >= i:
            continue
        v = P.relation_rhs(rel)
        if v[i] != 1 or any(v[i + 1:]):
            continue
        clean = not any(v[:i])
        out.append((rel, clean))
    return out


def infer_definitions_for(P: PcPresentation):
    """Pick a definition for every generator beyond the Frattini generators.

    Preference: right side exactly ``g_i``, then commutators over powers,
    then canonical relation order.
    """
    d = P.d
    defs: List[Optional[Definition]] = [None] * P.n
    for i in range(d, P.n):
        cands = _definition_candidates(P, i)
        if not cands:
            raise PresentationError(f"g{i + 1} has no defining relation")
        cands.sort(key=lambda c: (not c[1], c[0][0] != "comm"))
        rel = cands[0][0]
        defs[i] = Definition("pow", rel[1]) if rel[0] == "pow" else Definition("comm", rel[1], rel[2])
    return tuple(defs)


def defining_relation(defn: Definition):
    if defn.kind == "pow":
        return ("pow", defn.a)
    return ("comm", defn.a, defn.b)


def check_definitions(P: PcPresentation):
    """Validate stored definitions against the relations; raises PresentationError."""
    d = P.d
    for i, defn in enumerate(P.definitions):
        if i < d:
            if defn is not None:
                raise PresentationError(f"g{i + 1} has weight 1 but carries a definition")
            continue
        if defn is None:
            raise PresentationError(f"g{i + 1} lacks a definition")
        rel = defining_relation(defn)
        v = P.relation_rhs(rel)
        if rel[1] >= i or v[i] != 1 or any(v[i + 1:]):
            raise PresentationError(f"definition {defn} does not define g{i + 1}")


def images_from_definitions(P: PcPresentation, gen_images, target: PcPresentation, upto=None):
    """Extend images of the Frattini generators to all generators via definitions.

    ``gen_images`` gives images of ``g_1..g_d`` in ``target``.  Returns the list
    of images of ``g_1..g_upto``.
    """
    upto = P.n if upto is None else upto
    imgs = list(gen_images)
    T = target
    for i in range(len(imgs), upto):
        defn = P.definitions[i]
        if defn.kind == "pow":
            lhs = T.power(imgs[defn.a], P.p)
            rel = ("pow", defn.a)
        else:
            lhs = T.commutator(imgs[defn.a], imgs[defn.b])
            rel = ("comm", defn.a, defn.b)
        w = P.relation_rhs(rel)[:i] + (0,) * (P.n - i)
        if any(w):
            lhs = T.multiply(T.inverse(P.word_value(imgs, w, T)), lhs)
        imgs.append(lhs)
    return imgs


def relation_holds(P, rel, imgs, target):
    T = target
    if rel[0] == "pow":
        lhs = T.power(imgs[rel[1]], P.p)
    else:
        lhs = T.commutator(imgs[rel[1]], imgs[rel[2]])
    return lhs == P.word_value(imgs, P.relation_rhs(rel), T)


def is_homomorphism(P, imgs, target, relations=None):
    """True iff ``g_i -> imgs[i]`` respects every relation of ``P`` (checked by collection)."""
    for rel in relations if relations is not None else P.relations():
        if not relation_holds(P, rel, imgs, target):
            return False
    return True


def non_defining_relations(P):
    defs = {defining_relation(d) for d in P.definitions if d is not None}
    return [r for r in P.relations() if r not in defs]


@dataclass
class ConsistencyFailure:
    test: str
    left: ExponentVector
    right: ExponentVector


def consistency_tests(P: PcPresentation, indices=None):
    """Yield ``(name, left, right)`` for the standard overlap test words.

    Tests: ``(g_k g_j) g_i = g_k (g_j g_i)`` for ``k > j > i``,
    ``(g_j^p) g_i = g_j^(p-1) (g_j g_i)`` and ``g_j (g_i^p) = (g_j g_i) g_i^(p-1)``
    for ``j > i``, and ``(g_i^p) g_i = g_i (g_i^p)``.
    """
    p = P.p
    idx = list(range(P.n)) if indices is None else list(indices)
    mul = P.multiply
    g = P.gen
    for a, k in enumerate(idx):
        for b in range(a):
            j = idx[b]
            for c in range(b):
                i = idx[c]
                if j >= k or i >= j:
                    continue
                yield (f"g{k + 1} g{j + 1} g{i + 1}",
                       mul(mul(g(k), g(j)), g(i)), mul(g(k), mul(g(j), g(i))))
    for b, j in enumerate(idx):
        for c in range(b):
            i = idx[c]
            if i >= j:
                continue
            yield (f"g{j + 1}^p g{i + 1}",
                   mul(P.power_rhs[j], g(i)), mul(g(j, p - 1), mul(g(j), g(i))))
            yield (f"g{j + 1} g{i + 1}^p",
                   mul(g(j), P.power_rhs[i]), mul(mul(g(j), g(i)), g(i, p - 1)))
    for i in idx:
        yield (f"g{i + 1}^(p+1)", mul(P.power_rhs[i], g(i)), mul(g(i), P.power_rhs[i]))


def check_consistency(P: PcPresentation):
    """Run the overlap tests; returns ``(ok, failures)``."""
    failures = [ConsistencyFailure(name, left, right)
                for name, left, right in consistency_tests(P) if left != right]
    return not failures, failures
