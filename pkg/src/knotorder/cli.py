"""Command line interface: ``knotorder {dtable,obstruct,batch}``.

Exit status is 0 when a run completes (an Inconclusive verdict is a
result), 1 for usage or I/O problems and 2 for invalid input data.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import __version__
from .errors import KnotOrderError, ParseError, ValidationError
from .exact import IntMatrix, format_fraction
from .goeritz import GoeritzForm, d_table_from_goeritz, extend_twisted
from .knotdb import (
    BatchEntry, BatchReport, batch_report, batch_to_csv, batch_to_dict, batch_to_text, db_checksum,
    default_db_path, dtable_to_dict, dumps_json, find_record, load_knot_db, resolve_dtable,
)
from .lens import LensSpace, d_table_lens
from .obstruction import obstruct_order

EXIT_OK, EXIT_USAGE, EXIT_INVALID = 0, 1, 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive(text):
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return n


def _even_order(text):
    n = int(text)
    if n < 2 or n % 2:
        raise argparse.ArgumentTypeError(f"order must be an even integer >= 2, got {text}")
    return n


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="knotorder", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"knotorder {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    dt = sub.add_parser("dtable", help="print a table of correction terms")
    dsub = dt.add_subparsers(dest="source", required=True, parser_class=_Parser)
    fmt = dict(choices=["text", "json", "csv"], default="text")

    lens = dsub.add_parser("lens", help="d(-L(p,q), i) from the recursion")
    lens.add_argument("--p", type=_positive, required=True)
    lens.add_argument("--q", type=int, required=True)
    lens.add_argument("--negate", action="store_true", help="reverse the orientation")
    lens.add_argument("--recursion-labels", action="store_true",
                      help="keep the recursion's labels 0..p-1 instead of centering the table")
    lens.add_argument("--format", **fmt)

    gz = dsub.add_parser("goeritz", help="correction terms from a negative-definite Goeritz matrix")
    gz.add_argument("--file", required=True, help="JSON array of integer rows, '-' for stdin")
    gz.add_argument("--twist", type=_positive, help="border the matrix for K negative half-twists")
    gz.add_argument("--raw-labels", action="store_true", help="skip the canonical relabeling")
    gz.add_argument("--format", **fmt)

    def run_opts(sp):
        sp.add_argument("--order", type=_even_order, required=True, metavar="2M")
        sp.add_argument("--db", help="knot database (default: $KNOTORDER_DB or the bundled one)")
        sp.add_argument("--jobs", type=_positive, default=1)
        sp.add_argument("--format", **fmt)
        sp.add_argument("--no-timing", action="store_true", help="omit timing fields")
        sp.add_argument("--exhaustive", action="store_true",
                        help="search every admissible type even after a witness is found")

    ob = sub.add_parser("obstruct", help="run the order obstruction on one knot")
    ob.add_argument("--knot", required=True)
    run_opts(ob)

    bt = sub.add_parser("batch", help="run the order obstruction on many knots")
    bt.add_argument("--knots", help="comma-separated names (default: every knot in the database)")
    run_opts(bt)
    return p


def _emit_table(table, fmt, out):
    if fmt == "json":
        out.write(dumps_json(dtable_to_dict(table)))
    elif fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["element", "d"])
        for i, v in enumerate(table.values):
            w.writerow([" ".join(map(str, table.group.coords(i))), format_fraction(v)])
        out.write(buf.getvalue())
    else:
        out.write(f"# group {table.group}, {len(table)} values\n")
        for i, v in enumerate(table.values):
            out.write(f"{','.join(map(str, table.group.coords(i)))}\t{format_fraction(v)}\n")


def _read_matrix(path):
    try:
        text = sys.stdin.read() if path == "-" else open(path).read()
    except OSError as exc:
        raise _UsageError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        rows = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from exc
    if isinstance(rows, dict):
        rows = rows.get("matrix")
    if (not isinstance(rows, list) or not rows
            or not all(isinstance(r, list) and all(type(x) is int for x in r) for r in rows)):
        raise ParseError("expected a JSON array of integer rows", field="matrix")
    if any(len(r) != len(rows) for r in rows):
        raise ParseError("matrix must be square", field="matrix")
    return IntMatrix(rows)


def _cmd_dtable(args, out):
    if args.source == "lens":
        space = LensSpace(args.p, args.q, -1 if args.negate else 1)
        table = d_table_lens(space, canonical=not args.recursion_labels)
    else:
        m = _read_matrix(args.file)
        if args.twist is not None:
            m = extend_twisted(m, args.twist)
        table = d_table_from_goeritz(GoeritzForm(m), canonical=not args.raw_labels)
    _emit_table(table, args.format, out)


def _records(args):
    try:
        return load_knot_db(args.db), db_checksum(args.db)
    except OSError as exc:
        raise _UsageError(str(exc)) from exc


def _emit_batch(report: BatchReport, args, out):
    timing = not args.no_timing
    if args.format == "json":
        out.write(dumps_json(batch_to_dict(report, timing=timing)))
    elif args.format == "csv":
        out.write(batch_to_csv(report, timing=timing))
    else:
        out.write(batch_to_text(report, timing=timing))


def _cmd_obstruct(args, out):
    records, checksum = _records(args)
    try:
        rec = find_record(records, args.knot)
    except KeyError as exc:
        raise _UsageError(exc.args[0]) from exc
    table = resolve_dtable(rec)
    rep = obstruct_order(table, args.order, knot=rec.name, jobs=args.jobs, exhaustive=args.exhaustive)
    report = BatchReport(args.order, [BatchEntry(rec.name, rep)], checksum=checksum, elapsed=rep.elapsed)
    _emit_batch(report, args, out)


def _cmd_batch(args, out):
    records, checksum = _records(args)
    if args.knots:
        try:
            records = [find_record(records, n.strip()) for n in args.knots.split(",") if n.strip()]
        except KeyError as exc:
            raise _UsageError(exc.args[0]) from exc
    report = batch_report(records, args.order, jobs=args.jobs, exhaustive=args.exhaustive,
                          checksum=checksum)
    _emit_batch(report, args, out)


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    handler = {"dtable": _cmd_dtable, "obstruct": _cmd_obstruct, "batch": _cmd_batch}[args.command]
    try:
        handler(args, out)
    except _UsageError as exc:
        print(f"knotorder: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"knotorder: parse error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ValidationError, KnotOrderError, ValueError) as exc:
        print(f"knotorder: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


__all__ = ["main", "build_parser", "default_db_path"]
