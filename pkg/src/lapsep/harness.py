"""Enumeration, named graph families, isomorphism classes and batch reports."""

from __future__ import annotations

import csv
import functools
import io
import itertools
import json
import math
import re
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .criteria import Verdict, verdict
from .errors import AssertionFailure, OutOfBounds, TooLarge, UnknownFamily
from .graph import (
    ArrayedGraph,
    build_graph,
    classify_edges,
    from_bitmask,
    parse_edge_list,
    to_bitmask,
    vertex_at,
    vertex_pairs,
)
from .linalg import resolve_tol
from .measures import (
    degree_discrepancy_norm,
    ef_from_concurrence,
    logarithmic_negativity,
    wootters_concurrence,
)

DEFAULT_PAIR_CAP = 15  # 2 x 3
MAX_PAIR_CAP = 28  # 8 vertices
CANONICAL_VERTEX_CAP = 6
RECORD_FIELDS = (
    "id", "p", "q", "edges", "degree_criterion", "ppt_min_eig", "realignment_trace_norm",
    "verdict", "concurrence", "concurrence_bound", "ef", "ln", "en", "n1", "n2", "class_id",
)


# ------------------------------------------------------------------ inputs


def parse_graph_file(path) -> ArrayedGraph:
    return parse_edge_list(Path(path).read_text())


def counterexample_graph() -> ArrayedGraph:
    """3 x 3 graph with laplacian [[I4, 0, -I4], [0, 0, 0], [-I4, 0, I4]]; (2,2) is isolated."""
    return build_graph(3, 3, [
        ((1, 1), (2, 3)),
        ((1, 2), (3, 1)),
        ((1, 3), (3, 2)),
        ((2, 1), (3, 3)),
    ])


def _need(p: int, q: int, min_p: int, min_q: int, name: str):
    if p < min_p or q < min_q:
        raise OutOfBounds(f"family {name!r} needs at least a {min_p} x {min_q} array, got {p} x {q}")


def complete_graph(p: int, q: int) -> ArrayedGraph:
    n = p * q
    _need(n, 1, 2, 1, "complete")
    return build_graph(p, q, [(vertex_at(a, q), vertex_at(b, q)) for a, b in vertex_pairs(n)])


def star_graph(p: int, q: int) -> ArrayedGraph:
    _need(p * q, 1, 2, 1, "star")
    return build_graph(p, q, [((1, 1), vertex_at(i, q)) for i in range(2, p * q + 1)])


def crisscross_graph(p: int, q: int) -> ArrayedGraph:
    _need(p, q, 2, 2, "crisscross")
    return build_graph(p, q, [((1, 1), (2, 2)), ((1, 2), (2, 1))])


def tallymark_graph(p: int, q: int, s: int | None = None) -> ArrayedGraph:
    """Cross edges (1, t) - (2, t + 1) for t = 1..s, the last one closing back to column 1."""
    s = q if s is None else s
    if s < 2:
        raise OutOfBounds("a tally-mark needs at least two columns")
    _need(p, q, 2, s, f"tallymark({s})")
    return build_graph(p, q, [((1, t), (2, t % s + 1)) for t in range(1, s + 1)])


def nearest_point_graph(p: int, q: int) -> ArrayedGraph:
    """Lattice graph whose edges have length 1 or sqrt(2)."""
    _need(p * q, 1, 2, 1, "nearest_point_sample")
    edges = []
    for k, l in itertools.product(range(1, p + 1), range(1, q + 1)):
        for dk, dl in ((0, 1), (1, -1), (1, 0), (1, 1)):
            if 1 <= k + dk <= p and 1 <= l + dl <= q:
                edges.append(((k, l), (k + dk, l + dl)))
    return build_graph(p, q, edges)


_FAMILY_RE = re.compile(r"^\s*([a-z_]+)\s*(?:\(\s*(\d+)\s*\)|:?\s*(\d+))?\s*$")


def family(name: str, p: int, q: int) -> ArrayedGraph:
    """Named graph on a p x q array. ``tallymark`` accepts a size: ``tallymark(3)``,
    ``tallymark:3`` or ``tallymark3``; without one it spans all q columns."""
    m = _FAMILY_RE.match(name.lower())
    if not m:
        raise UnknownFamily(f"unknown family {name!r}")
    base, size = m.group(1), m.group(2) or m.group(3)
    if base == "tallymark":
        return tallymark_graph(p, q, int(size) if size else None)
    builders = {
        "complete": complete_graph,
        "star": star_graph,
        "crisscross": crisscross_graph,
        "nearest_point_sample": nearest_point_graph,
    }
    if base not in builders or size is not None:
        raise UnknownFamily(f"unknown family {name!r}")
    return builders[base](p, q)


FAMILIES = ("complete", "star", "crisscross", "tallymark(s)", "nearest_point_sample")


# ------------------------------------------------------- enumeration


def _pair_count(p: int, q: int, allow_large: bool) -> int:
    n = p * q
    pairs = n * (n - 1) // 2
    cap = MAX_PAIR_CAP if allow_large else DEFAULT_PAIR_CAP
    if pairs > cap:
        raise TooLarge(f"{p} x {q} has {pairs} vertex pairs, cap is {cap}")
    if pairs == 0:
        raise OutOfBounds("a single vertex admits no edges")
    return pairs


def enumerate_labeled_graphs(p: int, q: int, allow_large: bool = False):
    """Every non-empty labeled graph on the array, in increasing bitmask order."""
    pairs = _pair_count(p, q, allow_large)
    for mask in range(1, 1 << pairs):
        yield from_bitmask(p, q, mask)


@functools.lru_cache(maxsize=None)
def _permutation_bit_values(n: int) -> np.ndarray:
    """Row i gives, for each pair t, the bit value of pair t's image under permutation i."""
    pairs = vertex_pairs(n)
    bit = {pair: t for t, pair in enumerate(pairs)}
    rows = []
    for perm in itertools.permutations(range(1, n + 1)):
        row = []
        for a, b in pairs:
            x, y = perm[a - 1], perm[b - 1]
            row.append(1 << bit[(x, y) if x < y else (y, x)])
        rows.append(row)
    return np.array(rows, dtype=np.int64)


def canonical_mask(mask: int, n: int, allow_large: bool = False) -> int:
    cap = 8 if allow_large else CANONICAL_VERTEX_CAP
    if n > cap:
        raise TooLarge(f"brute-force canonical form over {n}! permutations refused (cap {cap} vertices)")
    table = _permutation_bit_values(n)
    chosen = [t for t in range(table.shape[1]) if mask >> t & 1]
    return int(table[:, chosen].sum(axis=1).min())


def canonical_form(g: ArrayedGraph, allow_large: bool = False) -> str:
    """Minimum bitmask over all vertex relabelings, as lowercase hex."""
    return format(canonical_mask(to_bitmask(g), g.n, allow_large), "x")


# ------------------------------------------------------------ records


def _fmt(x):
    """Floats rounded to 12 significant digits, then the shortest decimal that round-trips."""
    if x is None:
        return None
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, float):
        return float(f"{x:.12g}")
    return x


@dataclass
class GraphRecord:
    id: str
    p: int
    q: int
    edges: list
    degree_criterion: bool
    ppt_min_eig: float
    realignment_trace_norm: float
    verdict: str
    concurrence: float | None
    concurrence_bound: Fraction
    ef: float | None
    ln: float
    en: float
    n1: int
    n2: int
    class_id: str | None
    decomposition: object | None = field(default=None, repr=False)

    @property
    def graph(self) -> ArrayedGraph:
        return build_graph(self.p, self.q, self.edges)

    def to_dict(self) -> dict:
        out = {}
        for name in RECORD_FIELDS:
            value = getattr(self, name)
            if name == "edges":
                value = [[list(a), list(b)] for a, b in value]
            out[name] = _fmt(value)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def csv_row(self) -> list:
        row = []
        for name, value in self.to_dict().items():
            if name == "edges":
                value = ";".join(f"{a[0]},{a[1]}-{b[0]},{b[1]}" for a, b in value)
            elif value is None:
                value = ""
            elif isinstance(value, bool):
                value = str(value).lower()
            row.append(value)
        return row


def analyze_graph(g: ArrayedGraph, tol: float | None = None, keep_decomposition: bool = False) -> GraphRecord:
    tol = resolve_tol(tol)
    report = verdict(g, tol)
    cls = classify_edges(g)
    conc = ef = None
    if g.p == g.q == 2:
        conc = wootters_concurrence(report.rho, tol)
        ef = ef_from_concurrence(conc)
    return GraphRecord(
        id=format(to_bitmask(g), "x"),
        p=g.p,
        q=g.q,
        edges=list(g.sorted_edges()),
        degree_criterion=report.degree_criterion,
        ppt_min_eig=report.ppt.min_eigenvalue,
        realignment_trace_norm=report.realignment.trace_norm,
        verdict=report.verdict.value,
        concurrence=conc,
        concurrence_bound=Fraction(cls.n2, cls.n1 + cls.n2),
        ef=ef,
        ln=logarithmic_negativity(report.rho, g.p, g.q, tol),
        en=degree_discrepancy_norm(g),
        n1=cls.n1,
        n2=cls.n2,
        class_id=canonical_form(g) if g.n <= CANONICAL_VERTEX_CAP else None,
        decomposition=report.decomposition if keep_decomposition else None,
    )


def records_to_csv(records) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RECORD_FIELDS)
    for r in records:
        writer.writerow(r.csv_row())
    return buf.getvalue()


def records_to_json(records) -> str:
    return "[\n" + ",\n".join(r.to_json() for r in records) + "\n]\n"


# ------------------------------------------------------- parallel map


def _apply_chunk(fn, chunk):
    return [fn(x) for x in chunk]


def parallel_map(fn, items, workers: int = 1, chunks_per_worker: int = 4) -> list:
    """``[fn(x) for x in items]`` spread over processes; output order matches input order.

    Items are cut into contiguous chunks, so a worker handles a range of
    inputs and the results are stitched back together by chunk position.
    """
    items = list(items)
    if workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    size = max(1, math.ceil(len(items) / (workers * chunks_per_worker)))
    chunks = [items[i:i + size] for i in range(0, len(items), size)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(_apply_chunk, [fn] * len(chunks), chunks)
        return [y for part in parts for y in part]


def _analyze_mask(args):
    p, q, mask, tol = args
    return analyze_graph(from_bitmask(p, q, mask), tol)


def enumerate_records(p: int, q: int, workers: int = 1, tol: float | None = None,
                      allow_large: bool = False) -> list[GraphRecord]:
    pairs = _pair_count(p, q, allow_large)
    tol = resolve_tol(tol)
    return parallel_map(_analyze_mask, [(p, q, m, tol) for m in range(1, 1 << pairs)], workers)


# ------------------------------------------------------ 4-vertex table

EXPECTED_ENTANGLED_CONCURRENCES = sorted([
    Fraction(1), Fraction(1, 2), Fraction(1, 3), Fraction(1, 3), Fraction(1, 3), Fraction(1, 4), Fraction(1, 5),
])


@dataclass
class ClassRow:
    class_id: str
    edges: int
    labelings: int
    entangled_labelings: int
    concurrence: float | None
    verdicts: tuple[str, ...]

    @property
    def entangled_capable(self) -> bool:
        return self.entangled_labelings > 0


@dataclass
class Table4Report:
    rows: list[ClassRow]
    labeled_graphs: int
    labeling_independent: dict

    @property
    def class_count(self) -> int:
        return len(self.rows)

    @property
    def entangled_classes(self) -> list[ClassRow]:
        return [r for r in self.rows if r.entangled_capable]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["class_id", "edges", "labelings", "entangled_labelings", "concurrence", "verdicts"])
        for r in self.rows:
            conc = "" if r.concurrence is None else f"{r.concurrence:.12g}"
            writer.writerow([r.class_id, r.edges, r.labelings, r.entangled_labelings, conc, ";".join(r.verdicts)])
        return buf.getvalue()

    def to_text(self) -> str:
        lines = [
            f"{self.labeled_graphs} labeled graphs on 2x2, {self.class_count} isomorphism classes with >= 1 edge",
            f"{len(self.entangled_classes)} classes admit entangled labelings",
            f"{'class':>6} {'m':>2} {'labelings':>9} {'entangled':>9}  concurrence",
        ]
        for r in self.rows:
            conc = "-" if r.concurrence is None else f"{r.concurrence:.12g}"
            lines.append(f"{r.class_id:>6} {r.edges:>2} {r.labelings:>9} {r.entangled_labelings:>9}  {conc}")
        for name, ok in self.labeling_independent.items():
            lines.append(f"{name}: verdict independent of labeling: {ok}")
        return "\n".join(lines) + "\n"


def _check(cond: bool, message: str):
    if not cond:
        raise AssertionFailure(message)


def table4_report(tol: float | None = None) -> Table4Report:
    """Group the 63 labeled 2 x 2 graphs into isomorphism classes and check the
    concurrence of every entangled labeling against 1/m and n2/(n1 + n2)."""
    tol = resolve_tol(tol)
    groups = defaultdict(list)
    for g in enumerate_labeled_graphs(2, 2):
        groups[canonical_form(g)].append(g)

    rows = []
    for cid in sorted(groups, key=lambda c: int(c, 16)):
        members = groups[cid]
        m = len(members[0].edges)
        verdicts = set()
        concs = []
        for g in members:
            rep = verdict(g, tol)
            v = rep.verdict
            verdicts.add(v.value)
            c = wootters_concurrence(rep.rho, tol)
            if v is Verdict.ENTANGLED_NPT:
                cls = classify_edges(g)
                _check(cls.n2 == 1, f"entangled labeling {g!r} has n2 = {cls.n2}")
                bound = cls.n2 / (cls.n1 + cls.n2)
                _check(abs(c - bound) <= tol, f"{g!r}: concurrence {c!r} misses the bound {bound!r}")
                _check(abs(c * m - 1.0) <= tol, f"{g!r}: concurrence {c!r} is not 1/{m}")
                concs.append(c)
            else:
                _check(c <= tol, f"separable labeling {g!r} has concurrence {c!r}")
        if concs:
            _check(max(concs) - min(concs) <= tol, f"class {cid}: concurrences differ across labelings")
        rows.append(ClassRow(cid, m, len(members), len(concs), concs[0] if concs else None,
                             tuple(sorted(verdicts))))

    by_id = {r.class_id: r for r in rows}
    independent = {
        name: len(by_id[canonical_form(builder(2, 2))].verdicts) == 1
        for name, builder in (("complete", complete_graph), ("star", star_graph))
    }
    report = Table4Report(rows, sum(len(v) for v in groups.values()), independent)
    found = sorted(r.concurrence for r in report.entangled_classes)
    _check(len(found) == 7, f"expected 7 entangled-capable classes, found {len(found)}")
    _check(all(abs(a - float(b)) <= tol for a, b in zip(found, EXPECTED_ENTANGLED_CONCURRENCES)),
           f"concurrence multiset {found} differs from the expected one")
    _check(all(report.labeling_independent.values()), "complete or star verdict depends on the labeling")
    return report

