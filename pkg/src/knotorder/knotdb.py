"""Knot database ingestion, table resolution, batch runs and report formats.

Database files are JSON::

    {"format": "knotorder-db/1",
     "knots": [{"name": "8_13", "determinant": 29,
                "presentation": {"type": "lens", "p": 29, "q": 11}}, ...]}

Presentation types are ``lens`` (``p``, ``q``, optional ``orientation``),
``goeritz`` (``matrix``), ``twisted_goeritz`` (``matrix``, ``twists``),
``white_graph`` (``vertices``, ``edges``, optional ``dropped`` and
``ordering``) and ``unavailable``. ``determinant`` may be null only for an
unavailable presentation.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Sequence

from . import __version__
from .dtable import DTable
from .errors import KnotOrderError, ParseError, PresentationUnavailable, ValidationError
from .exact import FiniteAbelianGroup, IntMatrix, format_fraction
from .goeritz import GoeritzForm, WhiteGraph, d_table_from_goeritz, extend_twisted, graph_to_goeritz
from .lens import LensSpace, d_table_lens
from .obstruction import ObstructionReport, ProductGroup, SubgroupWitness, obstruct_order

DB_ENV = "KNOTORDER_DB"
DB_FORMAT = "knotorder-db/1"


# -- presentations ----------------------------------------------------------

@dataclass(frozen=True)
class Lens:
    p: int
    q: int
    orientation: int = 1


@dataclass(frozen=True)
class Goeritz:
    matrix: IntMatrix


@dataclass(frozen=True)
class TwistedGoeritz:
    matrix: IntMatrix
    k: int


@dataclass(frozen=True)
class WhiteGraphPresentation:
    graph: WhiteGraph
    ordering: tuple | None = None


@dataclass(frozen=True)
class Unavailable:
    pass


@dataclass(frozen=True)
class KnotRecord:
    name: str
    determinant: int | None
    presentation: object
    lower_bound: int | None = None


def natural_key(name: str):
    """Sort key that orders ``9_44`` before ``10_10`` and ``10_9`` before ``10_10``."""
    return [(0, int(p), "") if p.isdigit() else (1, 0, p) for p in re.split(r"(\d+)", name) if p]


# -- loading ----------------------------------------------------------------

def default_db_path() -> Path:
    env = os.environ.get(DB_ENV)
    if env:
        return Path(env)
    return Path(str(resources.files("knotorder") / "data" / "knots.json"))


def db_checksum(path=None) -> str:
    path = default_db_path() if path is None else Path(path)
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _record_lines(text: str) -> list:
    """Line number of every ``"name"`` key, in file order."""
    return [text.count("\n", 0, m.start()) + 1 for m in re.finditer(r'"name"\s*:', text)]


def _int(value, fld, line, *, positive=False):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"expected an integer, got {value!r}", line=line, field=fld)
    if positive and value < 1:
        raise ParseError(f"expected a positive integer, got {value}", line=line, field=fld)
    return value


def _matrix(value, fld, line) -> IntMatrix:
    if not isinstance(value, list) or not value or not all(isinstance(r, list) for r in value):
        raise ParseError("matrix must be a non-empty array of arrays", line=line, field=fld)
    n = len(value)
    if any(len(r) != n for r in value):
        raise ParseError("matrix must be square", line=line, field=fld)
    return IntMatrix([[_int(x, fld, line) for x in r] for r in value])


def _presentation(raw, line):
    if not isinstance(raw, dict) or "type" not in raw:
        raise ParseError("presentation must be an object with a 'type'", line=line, field="presentation")
    kind = raw["type"]
    if kind == "lens":
        return Lens(_int(raw.get("p"), "presentation.p", line, positive=True),
                    _int(raw.get("q"), "presentation.q", line),
                    _int(raw.get("orientation", 1), "presentation.orientation", line))
    if kind == "goeritz":
        return Goeritz(_matrix(raw.get("matrix"), "presentation.matrix", line))
    if kind == "twisted_goeritz":
        return TwistedGoeritz(_matrix(raw.get("matrix"), "presentation.matrix", line),
                              _int(raw.get("twists"), "presentation.twists", line))
    if kind == "white_graph":
        edges = raw.get("edges")
        if not isinstance(edges, list) or not all(isinstance(e, list) and len(e) == 2 for e in edges):
            raise ParseError("edges must be an array of vertex pairs", line=line, field="presentation.edges")
        ordering = raw.get("ordering")
        try:
            graph = WhiteGraph(_int(raw.get("vertices"), "presentation.vertices", line, positive=True),
                               tuple(tuple(_int(v, "presentation.edges", line) for v in e) for e in edges),
                               dropped=_int(raw.get("dropped", 0), "presentation.dropped", line))
        except ValueError as exc:
            raise ParseError(str(exc), line=line, field="presentation.edges") from exc
        return WhiteGraphPresentation(graph, None if ordering is None else tuple(ordering))
    if kind == "unavailable":
        return Unavailable()
    raise ParseError(f"unknown presentation type {kind!r}", line=line, field="presentation.type")


def _form(pres) -> GoeritzForm:
    if isinstance(pres, Goeritz):
        return GoeritzForm(pres.matrix)
    if isinstance(pres, TwistedGoeritz):
        return GoeritzForm(extend_twisted(pres.matrix, pres.k))
    return graph_to_goeritz(pres.graph, pres.ordering)


def validate_record(r: KnotRecord, line=None) -> None:
    """Check that the presentation is well formed and matches the determinant."""
    where = f"{r.name}" + (f" (line {line})" if line is not None else "")
    pres = r.presentation
    if isinstance(pres, Unavailable):
        return
    if r.determinant is None:
        raise ValidationError(f"{where}: determinant is required when a presentation is given")
    try:
        if isinstance(pres, Lens):
            order = LensSpace(pres.p, pres.q, pres.orientation).p
        else:
            order = abs(_form(pres).determinant)
    except KnotOrderError as exc:
        raise ValidationError(f"{where}: {exc}") from exc
    except ValueError as exc:
        raise ValidationError(f"{where}: {exc}") from exc
    if order != r.determinant:
        raise ValidationError(f"{where}: presentation has determinant {order}, declared {r.determinant}")


def parse_knot_db(text: str) -> list:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from exc
    if isinstance(raw, dict):
        fmt = raw.get("format", DB_FORMAT)
        if fmt != DB_FORMAT:
            raise ParseError(f"unsupported database format {fmt!r}", field="format")
        raw = raw.get("knots")
    if not isinstance(raw, list):
        raise ParseError("database must hold a list of knots", field="knots")
    lines = _record_lines(text)
    records, seen = [], set()
    for i, entry in enumerate(raw):
        line = lines[i] if i < len(lines) else None
        if not isinstance(entry, dict):
            raise ParseError("knot entry must be an object", line=line)
        name = entry.get("name")
        if not isinstance(name, str) or not name:
            raise ParseError("missing knot name", line=line, field="name")
        if name in seen:
            raise ParseError(f"duplicate knot {name!r}", line=line, field="name")
        seen.add(name)
        det = entry.get("determinant")
        if det is not None:
            det = _int(det, "determinant", line, positive=True)
            if det % 2 == 0:
                raise ValidationError(f"{name} (line {line}): knot determinants are odd, got {det}")
        bound = entry.get("lower_bound")
        if bound is not None:
            bound = _int(bound, "lower_bound", line, positive=True)
        rec = KnotRecord(name, det, _presentation(entry.get("presentation"), line), bound)
        validate_record(rec, line)
        records.append(rec)
    return records


def load_knot_db(path=None) -> list:
    """Read and validate a knot database; ``None`` means the default path.

    The default is ``$KNOTORDER_DB`` when set, else the bundled database.
    """
    path = default_db_path() if path is None else Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise OSError(f"cannot read knot database {path}: {exc.strerror}") from exc
    return parse_knot_db(text)


def find_record(records: Sequence[KnotRecord], name: str) -> KnotRecord:
    for r in records:
        if r.name == name:
            return r
    raise KeyError(f"knot {name!r} is not in the database")


def resolve_dtable(r: KnotRecord) -> DTable:
    """Canonically labeled correction-term table of the knot's double branched cover."""
    pres = r.presentation
    if isinstance(pres, Unavailable):
        raise PresentationUnavailable(f"no presentation recorded for {r.name}")
    if isinstance(pres, Lens):
        table = d_table_lens(LensSpace(pres.p, pres.q, pres.orientation))
    else:
        table = d_table_from_goeritz(_form(pres))
    if r.determinant is not None and table.group.order != r.determinant:
        raise ValidationError(f"{r.name}: table has order {table.group.order}, declared {r.determinant}")
    return table


# -- batch runs ---------------------------------------------------------------

@dataclass
class BatchEntry:
    knot: str
    report: ObstructionReport | None = None
    error: str | None = None
    error_kind: str | None = None


@dataclass
class BatchReport:
    order: int
    entries: list
    version: str = __version__
    checksum: str | None = None
    elapsed: float = 0.0

    def verdicts(self) -> dict:
        return {e.knot: (e.report.verdict if e.report else None) for e in self.entries}


def _run_one(args):
    rec, two_m, jobs, exhaustive = args
    try:
        table = resolve_dtable(rec)
        return BatchEntry(rec.name, obstruct_order(table, two_m, knot=rec.name, jobs=jobs,
                                                   exhaustive=exhaustive))
    except KnotOrderError as exc:
        return BatchEntry(rec.name, error=str(exc), error_kind=type(exc).__name__)


def batch_report(records: Sequence[KnotRecord], two_m: int, *, jobs: int = 1, exhaustive: bool = False,
                 checksum: str | None = None) -> BatchReport:
    """Obstruct every record at order ``two_m``; per-knot failures become entries.

    With ``jobs > 1`` knots are spread over worker processes; a single knot
    gets the whole budget for its own search instead.
    """
    start = time.perf_counter()
    recs = sorted(records, key=lambda r: natural_key(r.name))
    names = [r.name for r in recs]
    if len(set(names)) != len(names):
        raise ValueError("duplicate knot names in batch")
    if jobs > 1 and len(recs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            entries = list(pool.map(_run_one, [(r, two_m, 1, exhaustive) for r in recs]))
    else:
        entries = [_run_one((r, two_m, jobs, exhaustive)) for r in recs]
    return BatchReport(two_m, entries, checksum=checksum, elapsed=time.perf_counter() - start)


# -- serialization ------------------------------------------------------------

def witness_to_dict(w: SubgroupWitness) -> dict:
    return {"base_group": list(w.group.base.invariant_factors),
            "copies": w.group.copies,
            "iso_type": list(w.iso_type.invariant_factors),
            "generators": w.generator_coords()}


def witness_from_dict(d: dict) -> SubgroupWitness:
    pg = ProductGroup(FiniteAbelianGroup(tuple(d["base_group"])), int(d["copies"]))
    gens = [[tuple(c) for c in g] for g in d["generators"]]
    return SubgroupWitness.from_generators(pg, gens, FiniteAbelianGroup(tuple(d["iso_type"])))


def report_to_dict(r: ObstructionReport, *, timing: bool = True) -> dict:
    out = {"knot": r.knot,
           "order": r.order,
           "verdict": r.verdict,
           "reason": r.reason,
           "fast_path": r.fast_path,
           "types_searched": [list(t.invariant_factors) for t in r.types_searched],
           "candidates_examined": r.candidates_examined,
           "passing_counts": [{"type": list(t.invariant_factors), "passing": r.passing_counts[str(t)]}
                              for t in r.types_searched if str(t) in r.passing_counts],
           "witness": witness_to_dict(r.witness) if r.witness is not None else None}
    if timing:
        out["elapsed"] = round(r.elapsed, 6)
    return out


def report_from_dict(d: dict) -> ObstructionReport:
    types = [FiniteAbelianGroup(tuple(t)) for t in d["types_searched"]]
    counts = {str(FiniteAbelianGroup(tuple(c["type"]))): c["passing"] for c in d["passing_counts"]}
    w = d.get("witness")
    return ObstructionReport(knot=d["knot"], order=d["order"], verdict=d["verdict"],
                             witness=witness_from_dict(w) if w else None, reason=d.get("reason"),
                             types_searched=types, candidates_examined=d["candidates_examined"],
                             passing_counts=counts, fast_path=d["fast_path"],
                             elapsed=d.get("elapsed", 0.0))


def batch_to_dict(b: BatchReport, *, timing: bool = True) -> dict:
    entries = []
    for e in b.entries:
        entries.append({"knot": e.knot,
                        "report": report_to_dict(e.report, timing=timing) if e.report else None,
                        "error": None if e.error is None else {"kind": e.error_kind, "message": e.error}})
    out = {"tool": "knotorder", "version": b.version, "database_sha256": b.checksum,
           "order": b.order, "knots": entries}
    if timing:
        out["elapsed"] = round(b.elapsed, 6)
    return out


def batch_from_dict(d: dict) -> BatchReport:
    entries = []
    for e in d["knots"]:
        err = e.get("error")
        entries.append(BatchEntry(e["knot"], report_from_dict(e["report"]) if e["report"] else None,
                                  err["message"] if err else None, err["kind"] if err else None))
    return BatchReport(d["order"], entries, d["version"], d.get("database_sha256"), d.get("elapsed", 0.0))


def dumps_json(obj: dict) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _type_str(factors) -> str:
    return "+".join(f"Z{n}" for n in factors) or "0"


def _gens_str(w: dict | None) -> str:
    if not w:
        return ""
    return ";".join(" ".join(",".join(map(str, c)) for c in g) for g in w["generators"])


_CSV_FIELDS = ["knot", "order", "verdict", "witness_type", "witness_generators",
               "candidates_examined", "passing_counts", "fast_path", "error"]


def batch_to_csv(b: BatchReport, *, timing: bool = True) -> str:
    """One row per knot. Witness generators are ``;``-separated, copies by spaces."""
    buf = io.StringIO()
    fields = _CSV_FIELDS + (["elapsed"] if timing else [])
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for e in batch_to_dict(b, timing=timing)["knots"]:
        r = e["report"] or {}
        w = r.get("witness")
        row = {"knot": e["knot"], "order": b.order, "verdict": r.get("verdict", ""),
               "witness_type": _type_str(w["iso_type"]) if w else "",
               "witness_generators": _gens_str(w),
               "candidates_examined": r.get("candidates_examined", ""),
               "passing_counts": " ".join(f"{_type_str(c['type'])}:{c['passing']}"
                                          for c in r.get("passing_counts", [])),
               "fast_path": r.get("fast_path", ""),
               "error": f"{e['error']['kind']}: {e['error']['message']}" if e["error"] else ""}
        if timing:
            row["elapsed"] = r.get("elapsed", "")
        writer.writerow(row)
    return buf.getvalue()


def batch_to_text(b: BatchReport, *, timing: bool = True) -> str:
    lines = [f"knotorder {b.version}  order {b.order}"]
    if b.checksum:
        lines.append(f"database sha256 {b.checksum}")
    for e in batch_to_dict(b, timing=timing)["knots"]:
        if e["error"]:
            lines.append(f"{e['knot']:<8} error  {e['error']['kind']}: {e['error']['message']}")
            continue
        r = e["report"]
        line = f"{e['knot']:<8} {r['verdict']}"
        if r["fast_path"]:
            line += "  (d(0) != 0)"
        if r["reason"]:
            line += f"  {r['reason']}"
        if r["witness"]:
            w = r["witness"]
            line += f"  witness {_type_str(w['iso_type'])} gens {_gens_str(w)}"
        counts = " ".join(f"{_type_str(c['type'])}:{c['passing']}" for c in r["passing_counts"])
        if counts:
            line += f"  passing {counts}"
        if timing:
            line += f"  {r['elapsed']:.3f}s"
        lines.append(line)
    if timing:
        lines.append(f"total {b.elapsed:.3f}s")
    return "\n".join(lines) + "\n"


def dtable_to_dict(t: DTable) -> dict:
    return {"group": list(t.group.invariant_factors),
            "origin_is_spin": t.origin_is_spin,
            "values": [{"element": list(t.group.coords(i)), "d": format_fraction(v)}
                       for i, v in enumerate(t.values)]}


def dtable_from_dict(d: dict) -> DTable:
    group = FiniteAbelianGroup(tuple(d["group"]))
    vals = {tuple(e["element"]): Fraction(e["d"]) for e in d["values"]}
    t = DTable.from_mapping(group, vals)
    return DTable(t.group, t.values, bool(d.get("origin_is_spin", False)))
