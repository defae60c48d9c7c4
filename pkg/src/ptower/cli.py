"""Command line interface.

Exit codes: 0 success, 1 failed check, 2 usage or input error, 3 search
inconclusive (``max_class`` reached with expandable nodes left).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .abelian import abelianization
from .io import load, render
from .isom import fingerprint
from .pcp import PresentationError
from .pga import descendant_classes, p_cover
from .sigma import find_sigma
from .structure import BudgetExceeded, derived_length
from .transfer import compute_tkt, compute_ttt


def _dump(obj):
    print(json.dumps(obj, indent=2, ensure_ascii=False))


def _tkt(G):
    try:
        return str(compute_tkt(G))
    except ValueError:
        return None


def group_summary(G):
    return {
        "order": G.order,
        "log_order": G.n,
        "p": G.p,
        "p_class": G.p_class,
        "abelianization": str(abelianization(G)),
        "derived_length": derived_length(G),
        "ttt": compute_ttt(G).sequence_str(),
        "tkt": _tkt(G),
        "sigma": find_sigma(G) is not None,
    }


def cmd_invariants(args):
    _dump(group_summary(load(args.file)))
    return 0


def cmd_descendants(args):
    G = load(args.file)
    layer = [("", G)]
    out = []
    for k in range(1, args.level + 1):
        nxt = []
        for name, H in layer:
            for j, cls in enumerate(descendant_classes(H), 1):
                nxt.append((f"{name}{'.' if name else ''}{j}", cls.representative))
        layer = nxt
    for name, H in layer:
        entry = {"id": name, "order": H.order, "p_class": H.p_class,
                 "abelianization": str(abelianization(H)), "fingerprint": repr(fingerprint(H))}
        if args.presentations:
            entry["presentation"] = render(H)
        out.append(entry)
    _dump({"level": args.level, "count": len(out), "descendants": out})
    return 0


def cmd_cover(args):
    G = load(args.file)
    cov = p_cover(G)
    _dump({
        "multiplicator_rank": cov.multiplicator_rank,
        "nucleus_rank": cov.nucleus_rank,
        "cover_order": cov.cover.order,
        "terminal": cov.nucleus_rank == 0,
        "cover": render(cov.cover),
    })
    return 0


def cmd_search(args):
    from .search import INCONCLUSIVE, TargetSpec, run_search
    spec = TargetSpec.load(args.spec)
    report = run_search(spec, max_class=args.max_class, audit=args.audit,
                        progress=lambda s: print(s, file=sys.stderr) if args.verbose else None)
    if args.trace:
        Path(args.trace).write_text(report.to_json(with_timing=args.timing) + "\n")
    _dump({
        "status": report.status,
        "level_sizes": {str(k): v for k, v in report.level_sizes().items()},
        "survivors": [{"id": n.id, "order": n.order, "p_class": n.p_class,
                       "presentation": render(n.group)} for n in report.survivors],
    })
    return 3 if report.status == INCONCLUSIVE else 0


def cmd_verify_counts(args):
    from .audit import count_ledger
    lines = count_ledger()
    for line in lines:
        print(line)
    bad = sum(1 for line in lines if not line.ok)
    print(f"{len(lines) - bad}/{len(lines)} checks passed")
    return 1 if bad else 0


def build_parser():
    ap = argparse.ArgumentParser(prog="ptower", description="p-group descendant search tools")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("invariants", help="order, class, abelianization, TTT, TKT, sigma")
    s.add_argument("file")
    s.set_defaults(func=cmd_invariants)

    s = sub.add_parser("descendants", help="immediate (or iterated) descendants")
    s.add_argument("file")
    s.add_argument("--level", type=int, default=1)
    s.add_argument("--presentations", action="store_true")
    s.set_defaults(func=cmd_descendants)

    s = sub.add_parser("cover", help="p-covering group")
    s.add_argument("file")
    s.set_defaults(func=cmd_cover)

    s = sub.add_parser("search", help="pruned descendant-tree search")
    s.add_argument("spec")
    s.add_argument("--max-class", type=int, default=None)
    s.add_argument("--trace", help="write the full report (JSON) here")
    s.add_argument("--audit", action="store_true", help="evaluate every rule on every node")
    s.add_argument("--timing", action="store_true", help="include timings in the trace")
    s.set_defaults(func=cmd_search)

    s = sub.add_parser("verify-paper", help="run the [3,3] search and compare every count")
    s.set_defaults(func=cmd_verify_counts)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (PresentationError, FileNotFoundError, BudgetExceeded, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except AssertionError as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
