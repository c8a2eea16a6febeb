"""Explicit separable decompositions of graph density matrices.

Every edge contributes trace ``2/d`` to the density matrix, where ``d`` is
the degree sum. Row-local and column-local edges are product projectors
on their own. Cross edges between two rows r1 < r2 are collected in a
q x q 0/1 matrix N (N[j][l] = 1 for the edge {(r1,j),(r2,l)}); the
degree test on a 2 x q array says exactly that N has equal row and column
sums. Such an N splits into directed cycles, and the laplacian of a cycle
i_0 -> i_1 -> ... -> i_{s-1} -> i_0 is

    sum_k 1/s (a_k a_k^*) (x) (v_k v_k^*),
    a_k = |r1> - w^{-k} |r2>,  v_k = sum_t w^{kt} |i_t>,  w = exp(2 pi i / s),

because a_k (x) v_k = sum_t w^{kt} (|r1,i_t> - |r2,i_{t+1}>) and the
phases average out every cross term between distinct edges.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .criteria import RangeProjector, degree_criterion, range_membership
from .errors import (
    AssertionFailure,
    DegenerateCycle,
    DegreeCriterionViolated,
    EdgeNotSeparableLocal,
    NoMatchedEdges,
    NotLineSumSymmetric,
    NotTwoByQ,
)
from .graph import (
    COLUMN_LOCAL,
    CROSS,
    ROW_LOCAL,
    ArrayedGraph,
    Edge,
    build_graph,
    classify_edges,
    density_matrix,
    locality,
    swap_factors,
)
from .linalg import RationalSymmetricMatrix, _as_array, partial_transpose_matrix, resolve_tol


@dataclass(frozen=True)
class PhaseVector:
    """Unit vector whose nonzero entries all have modulus ``1/sqrt(len(entries))``.

    ``entries`` holds ``(index, turn)`` pairs with 0-based index; the entry
    value is ``exp(2 pi i turn) / sqrt(len(entries))``. Turns are exact
    fractions in [0, 1).
    """

    dim: int
    entries: tuple[tuple[int, Fraction], ...]

    @classmethod
    def basis(cls, dim: int, index: int) -> "PhaseVector":
        return cls(dim, ((index, Fraction(0)),))

    def to_numpy(self) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        amp = 1.0 / math.sqrt(len(self.entries))
        for i, turn in self.entries:
            v[i] = amp * _unit(turn)
        return v

    def to_pairs(self) -> list[list[float]]:
        v = self.to_numpy()
        return [[float(z.real), float(z.imag)] for z in v]


def _unit(turn: Fraction) -> complex:
    # exact for the quarter turns, which covers every real-valued term
    quarter = {Fraction(0): 1, Fraction(1, 4): 1j, Fraction(1, 2): -1, Fraction(3, 4): -1j}
    if turn in quarter:
        return complex(quarter[turn])
    angle = 2 * math.pi * float(turn)
    return complex(math.cos(angle), math.sin(angle))


def _turn(x: Fraction) -> Fraction:
    return x - math.floor(x)


@dataclass(frozen=True)
class Provenance:
    """Where a term came from.

    For terms produced on the factor-swapped array, ``factors_swapped`` is
    set; ``edge`` is given in the original coordinates while ``rows`` and
    ``cycle`` keep the swapped frame (rows are original columns).
    """

    kind: str  # "local-edge" | "vertical-edge" | "cycle"
    edge: Edge | None = None
    rows: tuple[int, int] | None = None
    cycle: tuple[int, ...] | None = None
    phase: int | None = None
    factors_swapped: bool = False

    def to_dict(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.edge is not None:
            out["edge"] = [list(self.edge[0]), list(self.edge[1])]
        if self.rows is not None:
            out["rows"] = list(self.rows)
        if self.cycle is not None:
            out["cycle"] = list(self.cycle)
            out["phase"] = self.phase
        if self.factors_swapped:
            out["factors_swapped"] = True
        return out

    def swapped(self) -> "Provenance":
        edge = None if self.edge is None else tuple((v[1], v[0]) for v in self.edge)
        return Provenance(self.kind, edge, self.rows, self.cycle, self.phase, not self.factors_swapped)


@dataclass(frozen=True)
class ProductTerm:
    weight: Fraction
    a: PhaseVector
    b: PhaseVector
    provenance: Provenance

    @property
    def vector(self) -> np.ndarray:
        return np.kron(self.a.to_numpy(), self.b.to_numpy())

    def projector(self) -> np.ndarray:
        v = self.vector
        return np.outer(v, v.conj())

    def swapped(self) -> "ProductTerm":
        return ProductTerm(self.weight, self.b, self.a, self.provenance.swapped())

    def to_dict(self) -> dict:
        return {
            "weight": repr(float(self.weight)),
            "weight_exact": f"{self.weight.numerator}/{self.weight.denominator}",
            "a": self.a.to_pairs(),
            "b": self.b.to_pairs(),
            "provenance": self.provenance.to_dict(),
        }


@dataclass(frozen=True)
class SeparableDecomposition:
    p: int
    q: int
    terms: tuple[ProductTerm, ...]
    reconstruction_residual: float = float("nan")

    @property
    def total_weight(self) -> Fraction:
        return sum((t.weight for t in self.terms), Fraction(0))

    def matrix(self) -> np.ndarray:
        n = self.p * self.q
        out = np.zeros((n, n), dtype=complex)
        for t in self.terms:
            out += float(t.weight) * t.projector()
        return out

    def to_dict(self) -> dict:
        total = self.total_weight
        return {
            "p": self.p,
            "q": self.q,
            "weight_sum": f"{total.numerator}/{total.denominator}",
            "residual": self.reconstruction_residual,
            "terms": [t.to_dict() for t in self.terms],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


# ----------------------------------------------------------------- blocks


@dataclass(frozen=True)
class BlockSplit:
    """Laplacian of a 2 x q graph split as L1 + L2 + L3 (sum is d * rho).

    L1 and L2 carry the edges inside row 1 and row 2; L3 carries every edge
    between the rows and has the block form ``[[X3, X4], [X4^T, X3]]``.
    """

    L1: RationalSymmetricMatrix
    L2: RationalSymmetricMatrix
    L3: RationalSymmetricMatrix
    X1: tuple[tuple[int, ...], ...]
    X2: tuple[tuple[int, ...], ...]
    X3: tuple[tuple[int, ...], ...]
    X4: tuple[tuple[int, ...], ...]
    degree_sum: int


def _edge_laplacian(g_edges, p: int, q: int) -> RationalSymmetricMatrix:
    entries: dict = {}
    for (i, j), (k, l) in g_edges:
        a, b = (i - 1) * q + j - 1, (k - 1) * q + l - 1
        entries[a, a] = entries.get((a, a), 0) + 1
        entries[b, b] = entries.get((b, b), 0) + 1
        key = (a, b) if a > b else (b, a)
        entries[key] = entries.get(key, 0) - 1
    return RationalSymmetricMatrix.from_entries(p * q, entries)


def _block(m: RationalSymmetricMatrix, bi: int, bj: int, q: int) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(int(m[bi * q + s, bj * q + t]) for t in range(q)) for s in range(q))


def split_blocks_2xq(g: ArrayedGraph) -> BlockSplit:
    if g.p != 2:
        raise NotTwoByQ(f"need a 2 x q array, got {g.p} x {g.q}")
    if not degree_criterion(g):
        raise DegreeCriterionViolated("the two cross blocks only agree under the degree test")
    row1 = [e for e in g.edges if e[0][0] == e[1][0] == 1]
    row2 = [e for e in g.edges if e[0][0] == e[1][0] == 2]
    cross = [e for e in g.edges if e[0][0] != e[1][0]]
    L1 = _edge_laplacian(row1, 2, g.q)
    L2 = _edge_laplacian(row2, 2, g.q)
    L3 = _edge_laplacian(cross, 2, g.q)
    X3 = _block(L3, 0, 0, g.q)
    if X3 != _block(L3, 1, 1, g.q):
        raise AssertionFailure("diagonal blocks of the cross part differ despite the degree test")
    return BlockSplit(L1, L2, L3, _block(L1, 0, 0, g.q), _block(L2, 1, 1, g.q), X3,
                      _block(L3, 0, 1, g.q), g.degree_sum)


# -------------------------------------------------------- cross adjacency


@dataclass(frozen=True)
class CrossAdjacency:
    """Cross edges between two rows: ``N[j][l] = 1`` for edge {(r1, j+1), (r2, l+1)}.

    Vertical edges {(r1, j), (r2, j)} are kept apart in ``vertical`` (1-based
    columns) so that N has a zero diagonal.
    """

    rows: tuple[int, int]
    N: tuple[tuple[int, ...], ...]
    vertical: tuple[int, ...]

    @property
    def row_sums(self) -> tuple[int, ...]:
        return tuple(sum(r) for r in self.N)

    @property
    def column_sums(self) -> tuple[int, ...]:
        return tuple(sum(col) for col in zip(*self.N))

    def is_line_sum_symmetric(self) -> bool:
        return self.row_sums == self.column_sums


def cross_adjacency_between(g: ArrayedGraph, r1: int, r2: int) -> CrossAdjacency:
    if r1 > r2:
        r1, r2 = r2, r1
    N = [[0] * g.q for _ in range(g.q)]
    vertical = []
    for a, b in g.edges:
        if {a[0], b[0]} != {r1, r2}:
            continue
        top, bottom = (a, b) if a[0] == r1 else (b, a)
        if top[1] == bottom[1]:
            vertical.append(top[1])
        else:
            N[top[1] - 1][bottom[1] - 1] = 1
    return CrossAdjacency((r1, r2), tuple(tuple(r) for r in N), tuple(sorted(vertical)))


def cross_adjacency(g: ArrayedGraph) -> CrossAdjacency:
    if g.p != 2:
        raise NotTwoByQ(f"need a 2 x q array, got {g.p} x {g.q}")
    return cross_adjacency_between(g, 1, 2)


def cycle_peel(N) -> list[list[int]]:
    """Split a line-sum-symmetric 0/1 matrix with zero diagonal into directed cycles.

    Walks start at the smallest vertex with outgoing arcs left and always
    take the smallest successor; the first repeated vertex closes a cycle,
    which is reported rotated to start at its smallest vertex. Cycles use
    1-based vertices and come out in discovery order.
    """
    if isinstance(N, CrossAdjacency):
        N = N.N
    rows = [list(r) for r in N]
    q = len(rows)
    if any(len(r) != q for r in rows):
        raise NotLineSumSymmetric("matrix is not square")
    if any(x not in (0, 1) for r in rows for x in r):
        raise NotLineSumSymmetric("entries must be 0 or 1")
    if any(rows[i][i] for i in range(q)):
        raise NotLineSumSymmetric("diagonal must be zero")
    if [sum(r) for r in rows] != [sum(c) for c in zip(*rows)]:
        raise NotLineSumSymmetric("row sums differ from column sums")

    cycles = []
    while True:
        start = next((i for i in range(q) if any(rows[i])), None)
        if start is None:
            return cycles
        path = [start]
        position = {start: 0}
        while True:
            u = path[-1]
            v = next((j for j in range(q) if rows[u][j]), None)
            if v is None:  # cannot happen for balanced input
                raise NotLineSumSymmetric(f"walk stuck at vertex {u + 1}")
            if v in position:
                cyc = path[position[v]:]
                for s, t in zip(cyc, cyc[1:] + cyc[:1]):
                    rows[s][t] = 0
                m = cyc.index(min(cyc))
                cycles.append([x + 1 for x in cyc[m:] + cyc[:m]])
                break
            position[v] = len(path)
            path.append(v)


# ------------------------------------------------------------------ terms


def tally_mark_terms(rows: tuple[int, int], cycle: Sequence[int], d: int, p: int, q: int) -> list[ProductTerm]:
    """Product terms for the cross edges {(r1, i_t), (r2, i_{t+1})} of one cycle.

    Each of the ``s`` terms has weight ``2/d``; together they equal the
    cycle's laplacian divided by ``d``.
    """
    s = len(cycle)
    if s < 2 or len(set(cycle)) != s:
        raise DegenerateCycle(f"cycle {list(cycle)} needs at least two distinct columns")
    r1, r2 = rows
    if r1 == r2:
        raise DegenerateCycle("the two rows must differ")
    terms = []
    for k in range(s):
        a = PhaseVector(p, ((r1 - 1, Fraction(0)), (r2 - 1, _turn(Fraction(1, 2) - Fraction(k, s)))))
        b = PhaseVector(q, tuple((col - 1, _turn(Fraction(k * t, s))) for t, col in enumerate(cycle)))
        terms.append(ProductTerm(Fraction(2, d), a, b, Provenance("cycle", rows=(r1, r2), cycle=tuple(cycle), phase=k)))
    return terms


def local_edge_term(edge: Edge, d: int, p: int, q: int) -> ProductTerm:
    """The single product term ``(1/d) * laplacian(edge)`` of a row- or column-local edge."""
    (i, j), (k, l) = edge
    kind = locality(edge)
    if kind == ROW_LOCAL:
        j, l = sorted((j, l))
        a = PhaseVector.basis(p, i - 1)
        b = PhaseVector(q, ((j - 1, Fraction(0)), (l - 1, Fraction(1, 2))))
        tag = "local-edge"
    elif kind == COLUMN_LOCAL:
        i, k = sorted((i, k))
        a = PhaseVector(p, ((i - 1, Fraction(0)), (k - 1, Fraction(1, 2))))
        b = PhaseVector.basis(q, j - 1)
        tag = "vertical-edge"
    else:
        raise EdgeNotSeparableLocal(f"edge {edge} changes both coordinates")
    return ProductTerm(Fraction(2, d), a, b, Provenance(tag, edge=edge))


# ---------------------------------------------------------- decompositions


def _residual(rho, terms: Sequence[ProductTerm], p: int, q: int) -> float:
    dec = SeparableDecomposition(p, q, tuple(terms))
    return float(np.linalg.norm(_as_array(rho) - dec.matrix()))


def _finish(g: ArrayedGraph, terms: list[ProductTerm], tol: float) -> SeparableDecomposition:
    residual = _residual(density_matrix(g), terms, g.p, g.q)
    if residual > tol:
        raise AssertionFailure(f"reconstruction residual {residual:.3e} exceeds {tol:.1e}")
    return SeparableDecomposition(g.p, g.q, tuple(terms), residual)


def _row_pair_terms(g: ArrayedGraph, d: int) -> list[ProductTerm]:
    terms = [local_edge_term(e, d, g.p, g.q) for e in g.sorted_edges() if locality(e) != CROSS]
    for r1 in range(1, g.p + 1):
        for r2 in range(r1 + 1, g.p + 1):
            cross = cross_adjacency_between(g, r1, r2)
            if not cross.is_line_sum_symmetric():
                raise NotLineSumSymmetric(f"cross edges between rows {r1} and {r2} are not line-sum symmetric")
            for cyc in cycle_peel(cross):
                terms.extend(tally_mark_terms((r1, r2), cyc, d, g.p, g.q))
    return terms


def decompose_line_sum(g: ArrayedGraph, tol: float | None = None) -> SeparableDecomposition:
    """Decompose any graph whose cross edges between every pair of rows are line-sum symmetric."""
    tol = resolve_tol(tol)
    return _finish(g, _row_pair_terms(g, g.degree_sum), tol)


def decompose_2xq(g: ArrayedGraph, tol: float | None = None) -> SeparableDecomposition:
    """Separable decomposition of a graph on a 2 x q (or p x 2) array."""
    tol = resolve_tol(tol)
    if g.p != 2:
        if g.q != 2:
            raise NotTwoByQ(f"need a 2 x q or p x 2 array, got {g.p} x {g.q}")
        swapped = decompose_2xq(swap_factors(g), tol)
        return _finish(g, [t.swapped() for t in swapped.terms], tol)
    if not degree_criterion(g):
        raise DegreeCriterionViolated("degree test fails, so no separable decomposition exists")
    return _finish(g, _row_pair_terms(g, g.degree_sum), tol)


def decompose_local(g: ArrayedGraph, tol: float | None = None) -> SeparableDecomposition:
    """Decomposition for a single-row or single-column array, where every edge is local."""
    tol = resolve_tol(tol)
    d = g.degree_sum
    return _finish(g, [local_edge_term(e, d, g.p, g.q) for e in g.sorted_edges()], tol)


def decompose(g: ArrayedGraph, tol: float | None = None) -> SeparableDecomposition:
    """Pick the constructive route that applies to the array shape."""
    if min(g.p, g.q) == 1:
        return decompose_local(g, tol)
    if g.p == 2 or g.q == 2:
        return decompose_2xq(g, tol)
    if not degree_criterion(g):
        raise DegreeCriterionViolated("degree test fails, so no separable decomposition exists")
    return decompose_line_sum(g, tol)


def matched_subgraph(g: ArrayedGraph) -> ArrayedGraph:
    classes = classify_edges(g)
    matched = classes.matched_edges()
    if not matched:
        raise NoMatchedEdges("every edge is unmatched")
    return build_graph(g.p, g.q, matched)


def decompose_matched_subgraph(g: ArrayedGraph, tol: float | None = None) -> SeparableDecomposition:
    """Decompose the density matrix of (V, E1), E1 being the matched edges.

    Matched cross edges come in criss-cross pairs {e, partner(e)}; each
    pair is a two-column cycle on its two rows.
    """
    tol = resolve_tol(tol)
    g1 = matched_subgraph(g)
    d = g1.degree_sum
    classes = classify_edges(g1)
    terms = []
    done = set()
    for e, cls in classes.classes.items():
        if cls.locality != CROSS:
            terms.append(local_edge_term(e, d, g.p, g.q))
            continue
        if e in done:
            continue
        done.update((e, cls.partner))
        (r1, j), (r2, l) = e
        if r1 > r2:
            (r1, j), (r2, l) = (r2, l), (r1, j)
        terms.extend(tally_mark_terms((r1, r2), sorted((j, l)), d, g.p, g.q))
    return _finish(g1, terms, tol)


@dataclass
class Verification:
    residual: float
    tol: float
    weights_nonnegative: bool
    weight_sum_ok: bool
    range_conditions_ok: bool
    failing_terms: list[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (self.residual <= self.tol and self.weights_nonnegative
                and self.weight_sum_ok and self.range_conditions_ok)


def verify_decomposition(rho, dec: SeparableDecomposition, tol: float | None = None) -> Verification:
    """Reconstruct ``rho`` from the terms and check weights and range conditions per term."""
    tol = resolve_tol(tol)
    arr = _as_array(rho)
    residual = float(np.linalg.norm(arr - dec.matrix()))
    weights_ok = all(t.weight >= 0 for t in dec.terms)
    sum_ok = abs(float(dec.total_weight) - 1.0) <= 1e-12
    projectors = (RangeProjector(rho, tol), RangeProjector(partial_transpose_matrix(rho, dec.p, dec.q), tol))
    failing = []
    for idx, t in enumerate(dec.terms):
        m = range_membership(rho, t.a.to_numpy(), t.b.to_numpy(), dec.p, dec.q, tol, projectors=projectors)
        if not (m.in_range_of_rho and m.in_range_of_rho_pt):
            failing.append(idx)
    return Verification(residual, tol, weights_ok, sum_ok, not failing, failing)


__all__ = [
    "BlockSplit",
    "CrossAdjacency",
    "PhaseVector",
    "ProductTerm",
    "Provenance",
    "SeparableDecomposition",
    "Verification",
    "cross_adjacency",
    "cross_adjacency_between",
    "cycle_peel",
    "decompose",
    "decompose_2xq",
    "decompose_line_sum",
    "decompose_local",
    "decompose_matched_subgraph",
    "local_edge_term",
    "matched_subgraph",
    "split_blocks_2xq",
    "tally_mark_terms",
    "verify_decomposition",
]
