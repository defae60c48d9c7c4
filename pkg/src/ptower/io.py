"""Text format for pc presentations.

::

    # comment
    p 3
    ngens 8
    pow 1 : 5 1 6 2          # g1^3 = g5 g6^2
    comm 2 1 : 3 1           # [g2,g1] = g3

Right-hand sides are lists of ``generator exponent`` pairs (1-based).
Relations that are not listed have trivial right-hand side.  Rendering is
deterministic: ``pow`` lines by generator, then ``comm`` lines by ``(j, i)``.
"""

from __future__ import annotations

from pathlib import Path

from .pcp import PcPresentation, PresentationError, check_consistency, check_definitions


def _rhs_text(v):
    return " ".join(f"{k + 1} {e}" for k, e in enumerate(v) if e)


def render(P: PcPresentation, comment=None) -> str:
    lines = []
    if comment:
        lines += [f"# {c}" for c in comment.splitlines()]
    lines += [f"p {P.p}", f"ngens {P.n}"]
    for i, v in enumerate(P.power_rhs):
        if any(v):
            lines.append(f"pow {i + 1} : {_rhs_text(v)}")
    for (j, i) in sorted(P.comm_rhs):
        lines.append(f"comm {j + 1} {i + 1} : {_rhs_text(P.comm_rhs[(j, i)])}")
    return "\n".join(lines) + "\n"


def parse(text: str, *, validate=True) -> PcPresentation:
    """Parse presentation text; with ``validate`` the result is checked for
    consistency and its weights and definitions are recomputed."""
    p = n = None
    pows = {}
    comms = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(":")
        toks = head.split()
        try:
            if toks[0] == "p" and not rest:
                p = int(toks[1])
            elif toks[0] == "ngens" and not rest:
                n = int(toks[1])
            elif toks[0] in ("pow", "comm"):
                if n is None or p is None:
                    raise PresentationError("relations before the p/ngens header")
                nums = [int(t) for t in rest.split()]
                if len(nums) % 2:
                    raise PresentationError("right side must be generator/exponent pairs")
                v = [0] * n
                for g, e in zip(nums[::2], nums[1::2]):
                    if not 1 <= g <= n:
                        raise PresentationError(f"generator {g} out of range")
                    v[g - 1] = (v[g - 1] + e) % p
                if toks[0] == "pow":
                    key = int(toks[1]) - 1
                    if not 0 <= key < n or key in pows:
                        raise PresentationError(f"bad or repeated pow {toks[1]}")
                    pows[key] = tuple(v)
                else:
                    key = (int(toks[1]) - 1, int(toks[2]) - 1)
                    if key in comms:
                        raise PresentationError(f"repeated comm {toks[1]} {toks[2]}")
                    comms[key] = tuple(v)
            else:
                raise PresentationError(f"unknown directive {toks[0]!r}")
        except (IndexError, ValueError) as exc:
            raise PresentationError(f"line {lineno}: {raw.strip()!r}: {exc}") from exc
    if p is None or n is None:
        raise PresentationError("missing p or ngens header")
    power_rhs = [pows.get(i, (0,) * n) for i in range(n)]
    P = PcPresentation(p, n, power_rhs, comms, infer_definitions=False)
    if validate:
        ok, failures = check_consistency(P)
        if not ok:
            raise PresentationError(f"inconsistent presentation: {failures[0].test} fails")
        if not P.is_weighted():
            raise PresentationError("presentation is not weighted (lower exponent-p central series)")
        P = PcPresentation(p, n, power_rhs, comms)
        check_definitions(P)
    return P


def load(path) -> PcPresentation:
    return parse(Path(path).read_text())


def save(P: PcPresentation, path, comment=None):
    Path(path).write_text(render(P, comment))
