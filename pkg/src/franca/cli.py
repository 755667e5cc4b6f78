"""Command-line entry point: ``franca check|graph|faithful``."""

from __future__ import annotations

import argparse
import json
import sys

from franca.models import Bounds
from franca.parse import ParseError
from franca.typesig import TypeSyntaxError, parse_type

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


def parse_bounds(text: str, budget_ms: int, basetypes: dict = None) -> Bounds:
    """``w=3,e=2`` (type names from the theory file are allowed too)."""
    merged = dict(Bounds().maxima)
    for part in filter(None, (p.strip() for p in (text or "").split(","))):
        name, sep, value = part.partition("=")
        if not sep or not value.strip().isdigit():
            raise ValueError(f"bad bound {part!r}; expected name=number")
        name = name.strip()
        if basetypes and name in basetypes:
            index = basetypes[name].index
        else:
            try:
                index = parse_type(name).index
            except (TypeSyntaxError, AttributeError):
                raise ValueError(f"unknown base type {name!r} in bound") from None
        merged[index] = int(value)
    return Bounds(tuple(sorted(merged.items())), budget_ms)


def _add_common(p):
    p.add_argument("--bound", default="w=3,e=2", help="cardinality bounds, e.g. w=3,e=2")
    p.add_argument("--budget-ms", type=int, default=10_000, help="time budget per check")
    p.add_argument("--json", action="store_true", help="print a JSON report")
    p.add_argument("--deterministic", action="store_true", help="zero out timings for reproducible output")
    p.add_argument("--workers", type=int, default=1, help="accepted for compatibility; checks run in-process")
    p.add_argument("--setaf", action="store_true", help="treat joint attacks collectively in Dung semantics")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="franca", description="Check logic embeddings and argument networks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="run the directives of theory files")
    p.add_argument("files", nargs="+")
    _add_common(p)

    p = sub.add_parser("graph", help="verify the edges of a theory file and export the graph")
    p.add_argument("file")
    p.add_argument("--dot", action="store_true", help="GraphViz output (default JSON)")
    _add_common(p)

    p = sub.add_parser("faithful", help="differential test of a modal embedding")
    p.add_argument("--logic", default="K")
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--atoms", type=int, default=2)
    p.add_argument("--frames", type=int, default=3, help="largest frame size")
    p.add_argument("--json", action="store_true")
    p.add_argument("--budget-ms", type=int, default=60_000)
    return parser


def _load(path):
    from franca.theory import parse_theory

    return parse_theory(path)


def cmd_check(args) -> int:
    from franca.runner import run

    status = EXIT_OK
    reports = []
    for path in args.files:
        tf = _load(path)
        bounds = parse_bounds(args.bound, args.budget_ms, tf.basetypes)
        report = run(tf, bounds, deterministic=args.deterministic, setaf=args.setaf)
        reports.append(report)
        if not report.passed:
            status = EXIT_FAIL
    if args.json:
        out = [r.to_json() for r in reports]
        print(json.dumps(out[0] if len(out) == 1 else out, indent=2, sort_keys=True))
    else:
        print("\n".join(str(r) for r in reports))
    return status


def cmd_graph(args) -> int:
    from franca.runner import elaborate

    tf = _load(args.file)
    ctx = elaborate(tf)
    graph = ctx.graph(parse_bounds(args.bound, args.budget_ms, tf.basetypes))
    if args.dot:
        sys.stdout.write(graph.to_dot())
    else:
        print(json.dumps(graph.to_json(), indent=2, sort_keys=True))
    return EXIT_OK


def cmd_faithful(args) -> int:
    from franca.kripke import faithfulness_corpus_check

    rep = faithfulness_corpus_check(
        logic=args.logic, depth_max=args.depth, atom_count=args.atoms,
        frame_bound=args.frames, budget_ms=args.budget_ms,
    )
    if args.json:
        print(json.dumps(rep.to_json(), indent=2, sort_keys=True))
    else:
        print(f"{rep.logic}: {rep.formulas} formulas, {rep.native_valid} valid, "
              f"{len(rep.discrepancies)} discrepancies, {rep.pointwise_triples} pointwise triples, "
              f"{len(rep.pointwise_failures)} pointwise failures")
        for d in rep.discrepancies[:10]:
            print(f"  {d}")
    return EXIT_OK if rep.ok else EXIT_FAIL


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"check": cmd_check, "graph": cmd_graph, "faithful": cmd_faithful}[args.command]
    try:
        return handler(args)
    except (ParseError, OSError, ValueError) as exc:
        print(f"franca: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except Exception as exc:  # elaboration or engine failure
        print(f"franca: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
