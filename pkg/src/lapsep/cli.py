"""Command-line entry point: ``lapsep analyze|decompose|enumerate|counterexample|table4``."""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

from .criteria import verdict
from .decompose import decompose
from .errors import AssertionFailure, LapsepError
from .harness import (
    FAMILIES,
    analyze_graph,
    counterexample_graph,
    enumerate_records,
    family,
    parse_graph_file,
    records_to_csv,
    records_to_json,
    table4_report,
)
from .linalg import exact_psd_check, partial_transpose_matrix, resolve_tol

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_ASSERT = 3


def _add_selector(sp):
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--file", help="edge-list file")
    src.add_argument("--family", help="one of: " + ", ".join(FAMILIES))
    sp.add_argument("--rows", type=int, help="p, rows of the array (with --family)")
    sp.add_argument("--cols", type=int, help="q, columns of the array (with --family)")
    sp.add_argument("--tol", type=float, default=None, help="numerical tolerance (default $LAPSEP_TOL or 1e-9)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lapsep", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("analyze", help="criteria and measures for one graph")
    _add_selector(sp)
    fmt = sp.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true")
    fmt.add_argument("--csv", action="store_true")

    sp = sub.add_parser("decompose", help="separable decomposition as JSON")
    _add_selector(sp)

    sp = sub.add_parser("enumerate", help="analyze every labeled graph on a small array")
    sp.add_argument("--rows", type=int, required=True)
    sp.add_argument("--cols", type=int, required=True)
    sp.add_argument("--out", help="output path; .json gives a JSON array, anything else CSV")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--tol", type=float, default=None)
    sp.add_argument("--allow-large", action="store_true", help="lift the 15 vertex-pair cap up to 28")

    sp = sub.add_parser("counterexample", help="the 3 x 3 PPT entangled graph")
    sp.add_argument("--json", action="store_true")

    sp = sub.add_parser("table4", help="isomorphism classes on the 2 x 2 array")
    sp.add_argument("--csv", action="store_true")
    return parser


def _select(args):
    if args.file:
        return parse_graph_file(args.file)
    if args.rows is None or args.cols is None:
        raise argparse.ArgumentTypeError("--family needs --rows and --cols")
    return family(args.family, args.rows, args.cols)


def _text_record(rec) -> str:
    lines = [f"graph {rec.id} on {rec.p} x {rec.q}, {len(rec.edges)} edges"]
    for name, value in rec.to_dict().items():
        if name not in ("id", "p", "q", "edges"):
            lines.append(f"  {name:<24}{'-' if value is None else value}")
    return "\n".join(lines) + "\n"


def cmd_analyze(args, out):
    rec = analyze_graph(_select(args), args.tol)
    if args.json:
        out.write(rec.to_json() + "\n")
    elif args.csv:
        out.write(records_to_csv([rec]))
    else:
        out.write(_text_record(rec))


def cmd_decompose(args, out):
    g = _select(args)
    out.write(decompose(g, args.tol).to_json() + "\n")


def cmd_enumerate(args, out):
    records = enumerate_records(args.rows, args.cols, args.workers, args.tol, args.allow_large)
    text = records_to_json(records) if args.out and args.out.endswith(".json") else records_to_csv(records)
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {len(records)} records to {args.out}", file=sys.stderr)
    else:
        out.write(text)


def cmd_counterexample(args, out):
    g = counterexample_graph()
    tol = resolve_tol(None)
    rec = analyze_graph(g, tol)
    report = verdict(g, tol)
    cert = exact_psd_check(partial_transpose_matrix(report.rho, g.p, g.q))
    if args.json:
        doc = rec.to_dict()
        doc["exact_ppt"] = cert.is_psd
        doc["realignment"] = {
            "trace_norm": report.realignment.trace_norm,
            "flags_entangled": report.realignment.flags_entangled,
        }
        out.write(json.dumps(doc) + "\n")
    else:
        out.write(_text_record(rec))
        out.write(f"  {'exact_ppt':<24}{cert.is_psd}\n")
        out.write(f"  {'realignment_flags':<24}{report.realignment.flags_entangled}\n")


def cmd_table4(args, out):
    report = table4_report()
    out.write(report.to_csv() if args.csv else report.to_text())


COMMANDS = {
    "analyze": cmd_analyze,
    "decompose": cmd_decompose,
    "enumerate": cmd_enumerate,
    "counterexample": cmd_counterexample,
    "table4": cmd_table4,
}


def _fail(code: int, exc: BaseException) -> int:
    print(f"lapsep: error[{type(exc).__name__}]: {exc}", file=sys.stderr)
    return code


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    with warnings.catch_warnings():
        warnings.simplefilter("always")
        warnings.showwarning = lambda msg, cat, *a, **k: print(f"lapsep: warning: {msg}", file=sys.stderr)
        try:
            COMMANDS[args.command](args, out)
        except AssertionFailure as exc:
            return _fail(EXIT_ASSERT, exc)
        except (LapsepError, ValueError, OSError, argparse.ArgumentTypeError) as exc:
            return _fail(EXIT_INPUT, exc)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
