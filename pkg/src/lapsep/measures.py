"""Entanglement measures for graph density matrices."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .criteria import ppt_criterion
from .errors import DimensionMismatch, NotNormalized, NotPSD
from .graph import ArrayedGraph, classify_edges, density_matrix, partial_transpose_graph
from .linalg import (
    RationalSymmetricMatrix,
    _as_array,
    _hermitian_embedding,
    exact_psd_check,
    partial_transpose_matrix,
    resolve_tol,
    singular_values,
    symmetric_eigenvalues,
    symmetric_eigh,
)

# sigma_y (x) sigma_y: anti-diagonal (-1, +1, +1, -1) read from the (1,4) corner
SPIN_FLIP = np.array(
    [
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
    ]
)

_RANK_CUTOFF = 1e-13


def pure_concurrence(psi, p: int, q: int) -> float:
    """sqrt(2 (1 - tr rho_A^2)) for a unit vector on the p*q space.

    With psi read as a p x q matrix, 1 - tr rho_A^2 is twice the sum of its
    squared 2 x 2 minors (Cauchy-Binet). Summing the minors avoids the
    cancellation in 1 - purity, which would leave ~1e-8 on product vectors.
    """
    psi = np.asarray(psi, dtype=complex).ravel()
    if psi.shape[0] != p * q:
        raise DimensionMismatch(f"vector of length {psi.shape[0]} is not {p}*{q}")
    if abs(np.linalg.norm(psi) - 1.0) > 1e-12:
        raise NotNormalized("state vector must have unit norm")
    m = psi.reshape(p, q)
    total = 0.0
    for i in range(p):
        for j in range(i + 1, p):
            minors = np.outer(m[i], m[j]) - np.outer(m[j], m[i])
            total += float(np.sum(np.abs(minors) ** 2)) / 2.0  # each k < l pair counted twice
    return math.sqrt(4.0 * total)


def _factor(rho, tol: float) -> np.ndarray:
    """A with rho = A A^*; exact elimination for rational input, Jacobi otherwise."""
    if isinstance(rho, RationalSymmetricMatrix):
        cert = exact_psd_check(rho)
        if not cert.is_psd:
            raise NotPSD("density matrix is not positive semidefinite")
        return cert.factor()
    arr = _as_array(rho)
    if np.iscomplexobj(arr) and np.any(arr.imag != 0):
        vals, vecs = symmetric_eigh(_hermitian_embedding(arr), tol)
        n = arr.shape[0]
        z = vecs[:n] + 1j * vecs[n:]
        # each eigenpair shows up twice in the embedding
        weights = vals / 2.0
    else:
        vals, z = symmetric_eigh(arr.real, tol)
        weights = vals
    if weights.min(initial=0.0) < -tol:
        raise NotPSD(f"density matrix has eigenvalue {weights.min():.3e}")
    keep = weights > _RANK_CUTOFF
    return z[:, keep] * np.sqrt(weights[keep])


def wootters_lambdas(rho, tol: float | None = None) -> np.ndarray:
    """Square roots of the eigenvalues of rho * rho_tilde, descending.

    Computed as the singular values of ``A^T Y A`` where ``rho = A A^*``
    and Y is the spin flip, which avoids square-rooting noisy eigenvalues
    of a non-normal product.
    """
    tol = resolve_tol(tol)
    shape = rho.shape
    if shape != (4, 4):
        raise DimensionMismatch("the closed form needs a 4 x 4 density matrix")
    a = _factor(rho, tol)
    tau = a.T @ SPIN_FLIP @ a
    sv = np.concatenate([singular_values(tau), np.zeros(4)]) if tau.size else np.zeros(4)
    return np.sort(sv)[::-1][:4]


def wootters_concurrence(rho, tol: float | None = None) -> float:
    lam = wootters_lambdas(rho, tol)
    return max(0.0, float(lam[0] - lam[1] - lam[2] - lam[3]))


def concurrence_upper_bound(g: ArrayedGraph) -> Fraction:
    """n2 / (n1 + n2): unmatched edges over all edges."""
    cls = classify_edges(g)
    return Fraction(cls.n2, cls.n1 + cls.n2)


def binary_entropy(x: float, base: float = 2.0) -> float:
    if x <= 0.0 or x >= 1.0:
        return 0.0
    h = -x * math.log(x) - (1.0 - x) * math.log(1.0 - x)
    return h / math.log(base)


def ef_from_concurrence(c: float, base: float = 2.0) -> float:
    c = min(max(c, 0.0), 1.0)
    return binary_entropy(0.5 + 0.5 * math.sqrt(1.0 - c * c), base)


def entanglement_of_formation_4dim(rho, base: float = 2.0, tol: float | None = None) -> float:
    """Entanglement of formation of a 4 x 4 state via its concurrence.

    ``base`` is the logarithm base of the entropy; 2 gives ebits, ``math.e``
    gives nats.
    """
    return ef_from_concurrence(wootters_concurrence(rho, tol), base)


def negativity(rho, p: int, q: int, tol: float | None = None) -> float:
    """Sum of magnitudes of the negative eigenvalues of the partial transpose (0 when PPT)."""
    tol = resolve_tol(tol)
    if ppt_criterion(rho, p, q, tol).holds:
        return 0.0
    vals = symmetric_eigenvalues(partial_transpose_matrix(rho, p, q), tol).eigenvalues
    return float(-sum(v for v in vals if v < 0))


def logarithmic_negativity(rho, p: int, q: int, tol: float | None = None) -> float:
    return math.log2(1.0 + 2.0 * negativity(rho, p, q, tol))


def degree_discrepancy_squared(g: ArrayedGraph) -> Fraction:
    """Exact square of the degree-discrepancy norm."""
    diff = [a - b for a, b in zip(g.degrees(), partial_transpose_graph(g).degrees())]
    return Fraction(sum(x * x for x in diff), g.degree_sum ** 2)


def degree_discrepancy_norm(g: ArrayedGraph) -> float:
    """Frobenius norm of Delta(G) - Delta(G^Gamma), divided by the degree sum."""
    diff = [a - b for a, b in zip(g.degrees(), partial_transpose_graph(g).degrees())]
    return math.sqrt(sum(x * x for x in diff)) / g.degree_sum


def is_maximally_entangled(g: ArrayedGraph, tol: float | None = None) -> bool | None:
    """True/False on a 2 x 2 array; beyond that only the all-unmatched necessary
    condition can rule it out, otherwise ``None`` (unknown)."""
    tol = resolve_tol(tol)
    if g.p == g.q == 2:
        return wootters_concurrence(density_matrix(g), tol) >= 1.0 - tol
    if classify_edges(g).n1 > 0:
        return False
    return None


@dataclass(frozen=True)
class MeasureReport:
    concurrence_exact: float | None
    concurrence_upper_bound: Fraction
    entanglement_of_formation: float | None
    logarithmic_negativity: float
    degree_discrepancy_norm: float
    maximally_entangled: bool | None
    n1: int
    n2: int
    entropy_base: float = 2.0


def measure_report(g: ArrayedGraph, tol: float | None = None, base: float = 2.0) -> MeasureReport:
    tol = resolve_tol(tol)
    rho = density_matrix(g)
    cls = classify_edges(g)
    conc = ef = maxent = None
    if g.p == g.q == 2:
        conc = wootters_concurrence(rho, tol)
        ef = ef_from_concurrence(conc, base)
        maxent = conc >= 1.0 - tol
    elif cls.n1 > 0:
        maxent = False
    return MeasureReport(
        concurrence_exact=conc,
        concurrence_upper_bound=Fraction(cls.n2, cls.n1 + cls.n2),
        entanglement_of_formation=ef,
        logarithmic_negativity=logarithmic_negativity(rho, g.p, g.q, tol),
        degree_discrepancy_norm=degree_discrepancy_norm(g),
        maximally_entangled=maxent,
        n1=cls.n1,
        n2=cls.n2,
        entropy_base=base,
    )
