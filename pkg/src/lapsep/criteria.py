"""Separability tests for graph density matrices and how they combine."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import AssertionFailure, DimensionMismatch, ZeroVector
from .graph import ArrayedGraph, density_matrix, partial_transpose_graph
from .linalg import (
    RationalSymmetricMatrix,
    _as_array,
    _hermitian_embedding,
    exact_psd_check,
    partial_transpose_matrix,
    realign,
    resolve_tol,
    singular_values,
    symmetric_eigenvalues,
    symmetric_eigh,
)


class Verdict(str, enum.Enum):
    SEPARABLE_CERTIFIED = "SEPARABLE_CERTIFIED"
    ENTANGLED_NPT = "ENTANGLED_NPT"
    ENTANGLED_PPT_REALIGNMENT = "ENTANGLED_PPT_REALIGNMENT"
    UNDECIDED_PPT = "UNDECIDED_PPT"

    def __str__(self) -> str:
        return self.value


def degree_criterion(g: ArrayedGraph) -> bool:
    """True when G and its partial transpose have identical vertex degrees."""
    return g.degrees() == partial_transpose_graph(g).degrees()


@dataclass(frozen=True)
class PPTResult:
    holds: bool
    min_eigenvalue: float
    exact: bool = False


def ppt_criterion(rho, p: int, q: int, tol: float | None = None) -> PPTResult:
    """Check positivity of the partial transpose.

    Floating spectra decide clear cases. If ``rho`` is exact and the
    smallest eigenvalue lies within ``10 * tol`` of zero, the decision is
    handed to :func:`exact_psd_check`.
    """
    tol = resolve_tol(tol)
    pt = partial_transpose_matrix(rho, p, q)
    lam = symmetric_eigenvalues(pt, tol).min
    if isinstance(pt, RationalSymmetricMatrix) and abs(lam) < 10 * tol:
        return PPTResult(exact_psd_check(pt).is_psd, lam, exact=True)
    return PPTResult(lam >= -tol, lam)


@dataclass(frozen=True)
class RealignmentResult:
    trace_norm: float
    flags_entangled: bool


def realignment_criterion(rho, p: int, q: int, tol: float | None = None) -> RealignmentResult:
    """One-sided: a trace norm above ``1 + tol`` proves entanglement, anything else proves nothing."""
    tol = resolve_tol(tol)
    norm = float(np.sum(singular_values(realign(rho, p, q))))
    return RealignmentResult(norm, norm > 1 + tol)


@dataclass(frozen=True)
class LineSumResult:
    blocks_line_sum_symmetric: bool
    nonnegative_row_sums: bool
    nonpositive_off_diagonal: bool

    @property
    def in_s(self) -> bool:
        return self.nonnegative_row_sums and self.nonpositive_off_diagonal

    @property
    def certifies_separable(self) -> bool:
        return self.in_s and self.blocks_line_sum_symmetric


def line_sum_symmetric_blocks(rho, p: int, q: int) -> LineSumResult:
    """Line-sum symmetry of every q x q block, plus membership flags for the
    set of matrices with nonnegative row sums and nonpositive off-diagonals."""
    if not isinstance(rho, RationalSymmetricMatrix):
        rho = RationalSymmetricMatrix.from_dense(_as_array(rho).real.tolist())
    n = rho.n
    if n != p * q:
        raise DimensionMismatch(f"dimension {n} is not {p}*{q}")
    rows = rho.to_rows()
    blocks_ok = all(
        sum(rows[bi * q + t][bj * q : bj * q + q]) == sum(rows[bi * q + u][bj * q + t] for u in range(q))
        for bi in range(p)
        for bj in range(p)
        for t in range(q)
    )
    row_sums_ok = all(sum(r) >= 0 for r in rows)
    off_ok = all(rows[i][j] <= 0 for i in range(n) for j in range(i))
    return LineSumResult(blocks_ok, row_sums_ok, off_ok)


class RangeProjector:
    """Orthogonal projector onto the range of a hermitian matrix.

    Complex vectors are handled through the real embedding
    ``[[Re, -Im], [Im, Re]]``, whose range is the realification of the
    original range.
    """

    def __init__(self, m, tol: float | None = None):
        self.tol = resolve_tol(tol)
        arr = _as_array(m)
        self.complex = bool(np.iscomplexobj(arr) and np.any(arr.imag != 0))
        real = _hermitian_embedding(arr) if self.complex else arr.real
        vals, vecs = symmetric_eigh(real, self.tol)
        self.basis = vecs[:, np.abs(vals) > self.tol]
        self.n = arr.shape[0]

    def residual(self, v: np.ndarray) -> float:
        v = np.asarray(v, dtype=complex)
        norm = float(np.linalg.norm(v))
        if norm == 0.0:
            raise ZeroVector("zero vector has no direction")
        if self.complex:
            cols = np.concatenate([v.real, v.imag])[:, None]
        else:
            cols = np.column_stack([v.real, v.imag])
        r = cols - self.basis @ (self.basis.T @ cols)
        return float(np.linalg.norm(r)) / norm

    def contains(self, v: np.ndarray) -> bool:
        return self.residual(v) <= math.sqrt(self.tol)


@dataclass(frozen=True)
class RangeMembership:
    in_range_of_rho: bool
    in_range_of_rho_pt: bool
    residual_rho: float
    residual_rho_pt: float


def range_membership(rho, x, y, p: int | None = None, q: int | None = None, tol: float | None = None,
                     *, projectors: tuple[RangeProjector, RangeProjector] | None = None) -> RangeMembership:
    """Is ``x (x) y`` in range(rho), and is ``x (x) conj(y)`` in range(rho^Gamma)?

    ``projectors`` lets callers reuse the two eigendecompositions across
    many vectors.
    """
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    if not np.any(x) or not np.any(y):
        raise ZeroVector("x and y must be nonzero")
    p = x.shape[0] if p is None else p
    q = y.shape[0] if q is None else q
    if projectors is None:
        projectors = (RangeProjector(rho, tol), RangeProjector(partial_transpose_matrix(rho, p, q), tol))
    on_rho, on_pt = projectors
    if on_rho.n != p * q:
        raise DimensionMismatch("vector dimensions do not match the matrix")
    r1 = on_rho.residual(np.kron(x, y))
    r2 = on_pt.residual(np.kron(x, y.conj()))
    limit = math.sqrt(on_rho.tol)
    return RangeMembership(r1 <= limit, r2 <= limit, r1, r2)


@dataclass(frozen=True)
class Theorem1Check:
    consistent: bool
    degree: bool
    ppt: bool


def theorem1_check(g: ArrayedGraph, tol: float | None = None) -> Theorem1Check:
    """Compute the degree test and the PPT test independently and compare."""
    deg = degree_criterion(g)
    ppt = ppt_criterion(density_matrix(g), g.p, g.q, tol).holds
    return Theorem1Check(deg == ppt, deg, ppt)


class CriteriaReport:
    """Outcome of :func:`verdict`.

    The realignment and line-sum results are computed on first access when
    the verdict did not need them.
    """

    def __init__(self, graph, rho, tol, degree, ppt, verdict, decomposition=None,
                 realignment=None, line_sum=None):
        self.graph = graph
        self.rho = rho
        self.tol = tol
        self.degree_criterion = degree
        self.ppt = ppt
        self.verdict = verdict
        self.decomposition = decomposition
        self._realignment = realignment
        self._line_sum = line_sum

    @property
    def realignment(self) -> RealignmentResult:
        if self._realignment is None:
            self._realignment = realignment_criterion(self.rho, self.graph.p, self.graph.q, self.tol)
        return self._realignment

    @property
    def line_sum(self) -> LineSumResult:
        if self._line_sum is None:
            self._line_sum = line_sum_symmetric_blocks(self.rho, self.graph.p, self.graph.q)
        return self._line_sum

    @property
    def line_sum_symmetric_blocks(self) -> bool:
        return self.line_sum.blocks_line_sum_symmetric

    def __repr__(self) -> str:
        return f"CriteriaReport({self.graph!r}, verdict={self.verdict})"


def verdict(g: ArrayedGraph, tol: float | None = None) -> CriteriaReport:
    """Run the tests in certificate-first order and classify the graph state.

    Degree test fails -> NPT entangled. Otherwise a 1 x q, p x 1 or 2 x q
    array always yields a separable decomposition. Larger arrays try the
    realignment test, then the line-sum-symmetric block condition (which
    is also decomposed constructively), then give up as undecided.
    """
    from .decompose import decompose, decompose_line_sum

    tol = resolve_tol(tol)
    rho = density_matrix(g)
    deg = degree_criterion(g)
    ppt = ppt_criterion(rho, g.p, g.q, tol)
    if deg != ppt.holds:
        raise AssertionFailure(f"degree test ({deg}) and PPT test ({ppt.holds}) disagree for {g!r}")
    report = CriteriaReport(g, rho, tol, deg, ppt, Verdict.UNDECIDED_PPT)
    if not deg:
        report.verdict = Verdict.ENTANGLED_NPT
    elif min(g.p, g.q) <= 2:
        report.decomposition = decompose(g, tol)
        report.verdict = Verdict.SEPARABLE_CERTIFIED
    elif report.realignment.flags_entangled:
        report.verdict = Verdict.ENTANGLED_PPT_REALIGNMENT
    elif report.line_sum.certifies_separable:
        report.decomposition = decompose_line_sum(g, tol)
        report.verdict = Verdict.SEPARABLE_CERTIFIED
    return report
