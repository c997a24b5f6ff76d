"""Command-line interface.

Commands emit JSON on stdout (JSONL for sweeps).  Exit codes: 0 success,
1 property failure, 2 input error, 3 enumeration bound exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from math import lcm

import numpy as np

from . import bounds
from .classify import (build_graph_cached, graph_to_dot, small_type)
from .errors import (BoundExceeded, DftError, RelationFailed,
                     SymbolSyntaxError, ValidityError)
from .fqm import build_form
from .lifts import isotropic_elements, isotropic_subgroups, lift_span
from .sweep import SweepConfig, run_sweep
from .symbols import parse_symbol
from .verify import run_suite
from .weil import check_relations

EXIT_OK = 0
EXIT_PROPERTY = 1
EXIT_INPUT = 2
EXIT_BOUND = 3


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


def _fail(kind: str, message: str, code: int) -> int:
    _emit({"error": {"type": kind, "message": message}})
    return code


def cmd_info(args) -> int:
    sym = parse_symbol(args.symbol)
    form = build_form(sym)
    info = {
        "symbol": str(sym),
        "order": form.order,
        "level": form.level,
        "signature": form.signature,
        "prime_parts": {str(p): str(sym.prime_part(p)) for p in sym.primes},
        "generators": {
            "orders": list(form.orders),
            "q": [str(x) for x in form.qdiag],
            "gram": [[str(x) for x in row] for row in form.gram],
        },
        "isotropic_elements": len(isotropic_elements(form)),
    }
    if form.order <= bounds.max_enum_order():
        info["isotropic_subgroups"] = len(isotropic_subgroups(form))
    _emit(info)
    return EXIT_OK


def cmd_classify(args) -> int:
    sym = parse_symbol(args.symbol)
    verdict = small_type(sym)
    _emit({
        "symbol": str(sym),
        "small": verdict.small,
        "rule": verdict.rule,
        "per_prime": {str(p): {"small": ok, "rule": rule}
                      for p, (ok, rule) in verdict.per_prime.items()},
    })
    return EXIT_OK


def cmd_image(args) -> int:
    sym = parse_symbol(args.symbol)
    form = build_form(sym)
    span = lift_span(form)
    out = {
        "symbol": str(sym),
        "dim": form.order,
        "rank": span.rank,
        "full_image": span.full,
    }
    two_adic = form.level == 1 or all(
        p == 2 for p in _prime_factors(form.level))
    if two_adic:
        graph = build_graph_cached(form)
        verdicts = np.array([not graph.bipartite[int(c)]
                             for c in graph.component])
        out["graph_agrees"] = bool(np.array_equal(verdicts, span.membership))
    if args.per_element:
        out["members"] = {str(e): bool(span.membership[i])
                          for i, e in enumerate(form.elements)}
    if args.witnesses:
        out["witnesses"] = [list(form.element(int(i)))
                            for i in np.nonzero(~span.membership)[0]]
    _emit(out)
    return EXIT_OK


def _prime_factors(n: int):
    out = set()
    d = 2
    while d * d <= n:
        while n % d == 0:
            out.add(d)
            n //= d
        d += 1
    if n > 1:
        out.add(n)
    return out


def cmd_graph(args) -> int:
    sym = parse_symbol(args.symbol)
    form = build_form(sym)
    graph = build_graph_cached(form)
    dot = graph_to_dot(graph)
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(dot + "\n")
    summary = {
        "symbol": str(sym),
        "vertices": form.order,
        "edges": sum(len(ns) for ns in graph.neighbors) // 2,
        "components": graph.n_components,
        "bipartite_components": sum(graph.bipartite),
        "nonbipartite_components": graph.n_components - sum(graph.bipartite),
    }
    if args.dot:
        summary["dot"] = args.dot
    _emit(summary)
    return EXIT_OK


def cmd_weil(args) -> int:
    sym = parse_symbol(args.symbol)
    form = build_form(sym)
    if not args.check:
        _emit({"symbol": str(sym), "conductor": lcm(8, form.level),
               "signature": form.signature})
        return EXIT_OK
    report = check_relations(form)
    _emit({"symbol": str(sym), "relations": report, "all_pass": True})
    return EXIT_OK


def cmd_sweep(args) -> int:
    primes = tuple(int(p) for p in args.primes.split(","))
    config = SweepConfig(max_order=args.max_order, primes=primes,
                         jobs=args.jobs, out=args.out, resume=args.resume)
    try:
        summary = run_sweep(config, log=lambda m: print(m, file=sys.stderr))
    except ValueError as exc:
        return _fail("ConfigError", str(exc), EXIT_INPUT)
    _emit(summary)
    return EXIT_OK if not summary["disagreements"] else EXIT_PROPERTY


def cmd_verify(args) -> int:
    try:
        results = run_suite(args.suite, log=lambda m: print(m, file=sys.stderr))
    except ValueError as exc:
        return _fail("UnknownSuite", str(exc), EXIT_INPUT)
    _emit({"suite": args.suite,
           "results": [{"name": r.name, "passed": r.passed, "detail": r.detail}
                       for r in results],
           "all_pass": all(r.passed for r in results)})
    return EXIT_OK if all(r.passed for r in results) else EXIT_PROPERTY


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="dft",
        description="discriminant forms, isotropic lifts, Weil representation")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("info", help="order, level, signature, counts")
    p.add_argument("symbol")
    p.set_defaults(fn=cmd_info)

    p = sub.add_parser("classify", help="small-type verdict")
    p.add_argument("symbol")
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("image", help="rank of the span of isotropic lifts")
    p.add_argument("symbol")
    p.add_argument("--per-element", action="store_true")
    p.add_argument("--witnesses", action="store_true")
    p.set_defaults(fn=cmd_image)

    p = sub.add_parser("graph", help="order-2 isotropy graph")
    p.add_argument("symbol")
    p.add_argument("--dot", metavar="PATH")
    p.set_defaults(fn=cmd_graph)

    p = sub.add_parser("weil", help="Weil representation matrices")
    p.add_argument("symbol")
    p.add_argument("--check", action="store_true",
                   help="verify the exact matrix relations")
    p.set_defaults(fn=cmd_weil)

    p = sub.add_parser("classify-sweep",
                       help="verify classifier against the rank oracle")
    p.add_argument("--max-order", type=int, required=True)
    p.add_argument("--primes", required=True, help="comma-separated primes")
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--resume", action="store_true")
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("verify", help="run a named invariant suite")
    p.add_argument("--suite", required=True,
                   choices=["relations", "lemmas", "constructions"])
    p.set_defaults(fn=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (SymbolSyntaxError, ValidityError) as exc:
        return _fail(type(exc).__name__, str(exc), EXIT_INPUT)
    except BoundExceeded as exc:
        return _fail("BoundExceeded", str(exc), EXIT_BOUND)
    except RelationFailed as exc:
        return _fail("RelationFailed",
                     f"{exc} (entry {exc.entry})", EXIT_PROPERTY)
    except DftError as exc:
        return _fail(type(exc).__name__, str(exc), EXIT_PROPERTY)


if __name__ == "__main__":
    sys.exit(main())
