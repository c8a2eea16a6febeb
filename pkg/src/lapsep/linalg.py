"""Small dense linear algebra, exact and floating.

Exact objects are :class:`RationalSymmetricMatrix` instances holding
``fractions.Fraction`` entries. Floating objects are plain numpy arrays
(real or complex). Spectra and singular values come from Jacobi rotations
applied in round-robin order, so that all disjoint pairs of a round are
rotated by a single orthogonal matrix product.
"""

from __future__ import annotations

import functools
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DimensionMismatch, NotSymmetric

DEFAULT_TOL = 1e-9
JACOBI_THRESHOLD = 1e-13
_SVD_THRESHOLD = 1e-15
_MAX_SWEEPS = 80


def resolve_tol(tol: float | None = None) -> float:
    """Return ``tol``, else ``$LAPSEP_TOL``, else :data:`DEFAULT_TOL`."""
    if tol is None:
        tol = os.environ.get("LAPSEP_TOL") or DEFAULT_TOL
    tol = float(tol)
    if not (math.isfinite(tol) and tol > 0):
        raise ValueError(f"tolerance must be a positive number, got {tol!r}")
    return tol


class RationalSymmetricMatrix:
    """Exact symmetric matrix; only the lower triangle is stored.

    Indices are 0-based. ``M[i, j]`` and ``M[j, i]`` read the same cell.
    """

    __slots__ = ("n", "_lower")

    def __init__(self, n: int, lower: Sequence[Sequence[Fraction]]):
        if n < 1:
            raise DimensionMismatch("dimension must be positive")
        if len(lower) != n or any(len(row) != i + 1 for i, row in enumerate(lower)):
            raise DimensionMismatch("lower triangle has the wrong shape")
        self.n = n
        self._lower = tuple(tuple(x if type(x) is Fraction else Fraction(x) for x in row) for row in lower)

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence]) -> "RationalSymmetricMatrix":
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise DimensionMismatch("matrix is not square")
        full = [[Fraction(x) for x in r] for r in rows]
        for i in range(n):
            for j in range(i):
                if full[i][j] != full[j][i]:
                    raise NotSymmetric(f"entry ({i},{j}) differs from ({j},{i})")
        return cls(n, [full[i][: i + 1] for i in range(n)])

    @classmethod
    def from_entries(cls, n: int, entries: Mapping[tuple[int, int], object]) -> "RationalSymmetricMatrix":
        """Build from a sparse ``{(i, j): value}`` map; (i, j) and (j, i) are the same cell."""
        zero = Fraction(0)
        lower = [[zero] * (i + 1) for i in range(n)]
        for (i, j), value in entries.items():
            if i < j:
                i, j = j, i
            lower[i][j] = Fraction(value)
        return cls(n, lower)

    @classmethod
    def identity(cls, n: int) -> "RationalSymmetricMatrix":
        return cls.from_entries(n, {(i, i): 1 for i in range(n)})

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n, self.n)

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        if i < j:
            i, j = j, i
        return self._lower[i][j]

    def to_rows(self) -> list[list[Fraction]]:
        return [[self[i, j] for j in range(self.n)] for i in range(self.n)]

    def to_numpy(self) -> np.ndarray:
        out = np.empty((self.n, self.n))
        for i, row in enumerate(self._lower):
            for j, x in enumerate(row):
                out[i, j] = out[j, i] = float(x)
        return out

    def __array__(self, dtype=None, copy=None):
        arr = self.to_numpy()
        return arr if dtype is None else arr.astype(dtype)

    def diagonal(self) -> tuple[Fraction, ...]:
        return tuple(self._lower[i][i] for i in range(self.n))

    def trace(self) -> Fraction:
        return sum(self.diagonal(), Fraction(0))

    def scale(self, factor) -> "RationalSymmetricMatrix":
        factor = Fraction(factor)
        return RationalSymmetricMatrix(self.n, [[x * factor if x else x for x in row] for row in self._lower])

    def __add__(self, other: "RationalSymmetricMatrix") -> "RationalSymmetricMatrix":
        if not isinstance(other, RationalSymmetricMatrix):
            return NotImplemented
        if other.n != self.n:
            raise DimensionMismatch("dimensions differ")
        return RationalSymmetricMatrix(
            self.n, [[x + y for x, y in zip(r, s)] for r, s in zip(self._lower, other._lower)]
        )

    def __sub__(self, other: "RationalSymmetricMatrix") -> "RationalSymmetricMatrix":
        if not isinstance(other, RationalSymmetricMatrix):
            return NotImplemented
        return self + other.scale(-1)

    def quadratic_form(self, x: Sequence) -> Fraction:
        x = [Fraction(v) for v in x]
        return sum(
            (self[i, j] * x[i] * x[j] for i in range(self.n) for j in range(self.n) if x[i] and x[j]),
            Fraction(0),
        )

    def matvec(self, x: Sequence) -> list[Fraction]:
        return [sum((self[i, j] * Fraction(x[j]) for j in range(self.n)), Fraction(0)) for i in range(self.n)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalSymmetricMatrix):
            return NotImplemented
        return self._lower == other._lower

    def __hash__(self) -> int:
        return hash(self._lower)

    def __repr__(self) -> str:
        rows = ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self.to_rows())
        return f"RationalSymmetricMatrix([{rows}])"


def _as_array(m) -> np.ndarray:
    if isinstance(m, RationalSymmetricMatrix):
        return m.to_numpy()
    arr = np.asarray(m)
    if arr.dtype.kind not in "fc":
        arr = arr.astype(float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix has non-finite entries")
    return arr


def _check_bipartite(n: int, p: int, q: int) -> None:
    if p < 1 or q < 1 or n != p * q:
        raise DimensionMismatch(f"dimension {n} is not {p}*{q}")


def partial_transpose_matrix(m, p: int, q: int):
    """Transpose every q-by-q block of the p-by-p block grid.

    Returns the same kind of object it was given: a rational matrix stays
    exact, an array stays an array.
    """
    if isinstance(m, RationalSymmetricMatrix):
        _check_bipartite(m.n, p, q)
        # entry ((i,j),(k,l)) <- ((i,l),(k,j)); symmetry is preserved
        entries = {}
        for i in range(p):
            for j in range(q):
                r = i * q + j
                for k in range(p):
                    for l in range(q):
                        c = k * q + l
                        if c <= r:
                            entries[r, c] = m[i * q + l, k * q + j]
        return RationalSymmetricMatrix.from_entries(m.n, entries)
    arr = _as_array(m)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionMismatch("matrix is not square")
    _check_bipartite(arr.shape[0], p, q)
    return arr.reshape(p, q, p, q).transpose(0, 3, 2, 1).reshape(p * q, p * q)


def realign(rho, p: int, q: int) -> np.ndarray:
    """Reshuffle into the p^2 x q^2 matrix with ((i,i'),(j,j')) entry rho[(i,j),(i',j')]."""
    arr = _as_array(rho)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionMismatch("matrix is not square")
    _check_bipartite(arr.shape[0], p, q)
    return arr.reshape(p, q, p, q).transpose(0, 2, 1, 3).reshape(p * p, q * q)


def partial_trace_B(rho, p: int, q: int):
    """Trace out the second (q-dimensional) factor."""
    if isinstance(rho, RationalSymmetricMatrix):
        _check_bipartite(rho.n, p, q)
        entries = {
            (i, k): sum((rho[i * q + j, k * q + j] for j in range(q)), Fraction(0))
            for i in range(p)
            for k in range(i + 1)
        }
        return RationalSymmetricMatrix.from_entries(p, entries)
    arr = _as_array(rho)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionMismatch("matrix is not square")
    _check_bipartite(arr.shape[0], p, q)
    return np.einsum("ijkj->ik", arr.reshape(p, q, p, q))


# ---------------------------------------------------------------- Jacobi


@functools.lru_cache(maxsize=None)
def _round_robin(n: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    """Pairings of 0..n-1 into rounds of disjoint pairs (circle method)."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = []
        for i in range(m // 2):
            a, b = players[i], players[m - 1 - i]
            if a < n and b < n:
                pairs.append((min(a, b), max(a, b)))
        pairs.sort()
        rounds.append((np.array([a for a, _ in pairs]), np.array([b for _, b in pairs])))
        players = [players[0], players[-1], *players[1:-1]]
    return tuple(rounds)


_SMALL = 16


def _jacobi_scalar(a: np.ndarray, want_vectors: bool):
    """Cyclic-by-row Jacobi on Python floats; faster than numpy below ~16 x 16."""
    n = a.shape[0]
    m = a.tolist()
    v = np.eye(n).tolist() if want_vectors else None
    scale = math.sqrt(sum(x * x for row in m for x in row))
    if n == 1 or scale == 0.0:
        return np.array([m[i][i] for i in range(n)]), (np.array(v) if v is not None else None), 0.0
    limit = JACOBI_THRESHOLD * scale
    negligible = 1e-30 * scale
    rng = range(n)
    off = 0.0
    for _ in range(_MAX_SWEEPS):
        off = math.sqrt(sum(m[i][j] * m[i][j] for i in rng for j in rng if i != j))
        if off <= limit:
            break
        for p in range(n - 1):
            mp = m[p]
            for q in range(p + 1, n):
                apq = mp[q]
                if abs(apq) <= negligible:
                    continue
                mq = m[q]
                theta = (mq[q] - mp[p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                for row in m:
                    x, y = row[p], row[q]
                    row[p] = c * x - s * y
                    row[q] = s * x + c * y
                for k in rng:
                    x, y = mp[k], mq[k]
                    mp[k] = c * x - s * y
                    mq[k] = s * x + c * y
                mp[q] = mq[p] = 0.0
                if v is not None:
                    for row in v:
                        x, y = row[p], row[q]
                        row[p] = c * x - s * y
                        row[q] = s * x + c * y
    else:
        off = math.sqrt(sum(m[i][j] * m[i][j] for i in rng for j in rng if i != j))
    return np.array([m[i][i] for i in rng]), (np.array(v) if v is not None else None), off


def _jacobi_symmetric(a: np.ndarray, want_vectors: bool):
    a = np.array(a, dtype=float)
    n = a.shape[0]
    if n <= _SMALL:
        return _jacobi_scalar(a, want_vectors)
    v = np.eye(n) if want_vectors else None
    scale = math.sqrt(float(np.sum(a * a)))
    if scale == 0.0:
        return np.diag(a).copy(), v, 0.0
    rounds = _round_robin(n)
    off = 0.0
    for _ in range(_MAX_SWEEPS):
        off = math.sqrt(max(float(np.sum(a * a) - np.sum(np.diag(a) ** 2)), 0.0))
        if off <= JACOBI_THRESHOLD * scale:
            break
        for P, Q in rounds:
            apq = a[P, Q]
            active = np.abs(apq) > 1e-30 * scale
            if not active.any():
                continue
            safe = np.where(active, apq, 1.0)
            theta = np.clip((a[Q, Q] - a[P, P]) / (2.0 * safe), -1e150, 1e150)
            t = np.where(theta >= 0, 1.0, -1.0) / (np.abs(theta) + np.hypot(theta, 1.0))
            t = np.where(active, t, 0.0)
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            J = np.eye(n)
            J[P, P] = c
            J[Q, Q] = c
            J[P, Q] = s
            J[Q, P] = -s
            a = J.T @ a @ J
            a = 0.5 * (a + a.T)
            if v is not None:
                v = v @ J
    else:
        off = math.sqrt(max(float(np.sum(a * a) - np.sum(np.diag(a) ** 2)), 0.0))
    return np.diag(a).copy(), v, off


def _hermitian_embedding(h: np.ndarray) -> np.ndarray:
    re, im = h.real, h.imag
    return np.block([[re, -im], [im, re]])


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: tuple[float, ...]
    residual: float

    @property
    def min(self) -> float:
        return self.eigenvalues[-1]

    @property
    def max(self) -> float:
        return self.eigenvalues[0]


def _require_hermitian(arr: np.ndarray, tol: float) -> None:
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionMismatch("matrix is not square")
    norm = float(np.linalg.norm(arr))
    if float(np.max(np.abs(arr - arr.conj().T), initial=0.0)) > tol * max(norm, 1.0):
        raise NotSymmetric("matrix is not symmetric/hermitian")


def symmetric_eigenvalues(m, tol: float | None = None) -> Spectrum:
    """All eigenvalues of a real symmetric or complex hermitian matrix, descending."""
    tol = resolve_tol(tol)
    arr = _as_array(m)
    _require_hermitian(arr, tol)
    if np.iscomplexobj(arr) and np.any(arr.imag != 0):
        vals, _, off = _jacobi_symmetric(_hermitian_embedding(arr), want_vectors=False)
        vals = np.sort(vals)[::-1][::2]  # every eigenvalue appears twice
    else:
        vals, _, off = _jacobi_symmetric(arr.real, want_vectors=False)
        vals = np.sort(vals)[::-1]
    return Spectrum(tuple(float(x) for x in vals), off)


def symmetric_eigh(m, tol: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and orthonormal eigenvector columns of a real symmetric matrix."""
    tol = resolve_tol(tol)
    arr = _as_array(m)
    _require_hermitian(arr, tol)
    if np.iscomplexobj(arr):
        if np.any(arr.imag != 0):
            raise NotSymmetric("symmetric_eigh needs a real matrix; embed hermitian input first")
        arr = arr.real
    vals, vecs, _ = _jacobi_symmetric(arr, want_vectors=True)
    order = np.argsort(-vals, kind="stable")
    return vals[order], vecs[:, order]


def _svd_scalar(a: np.ndarray) -> list[float]:
    """One-sided Jacobi on the columns of a real matrix, on Python floats."""
    cols = a.T.tolist()
    n = len(cols)
    for _ in range(_MAX_SWEEPS):
        rotated = False
        for p in range(n - 1):
            up = cols[p]
            for q in range(p + 1, n):
                uq = cols[q]
                alpha = sum(x * x for x in up)
                beta = sum(x * x for x in uq)
                gamma = sum(x * y for x, y in zip(up, uq))
                if abs(gamma) <= _SVD_THRESHOLD * math.sqrt(alpha * beta):
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * gamma)
                t = (1.0 if zeta >= 0 else -1.0) / (abs(zeta) + math.sqrt(1.0 + zeta * zeta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = c * t
                up[:], uq[:] = [c * x - s * y for x, y in zip(up, uq)], [s * x + c * y for x, y in zip(up, uq)]
        if not rotated:
            break
    return [math.sqrt(sum(x * x for x in col)) for col in cols]


def singular_values(m, tol: float | None = None) -> np.ndarray:
    """Singular values, descending, by one-sided (Hestenes) Jacobi on columns."""
    a = _as_array(m)
    if a.ndim != 2:
        raise DimensionMismatch("expected a 2-d matrix")
    if a.size == 0:
        return np.zeros(0)
    if a.shape[0] < a.shape[1]:
        a = a.conj().T
    a = np.array(a, dtype=complex if np.iscomplexobj(a) else float)
    n = a.shape[1]
    if not np.iscomplexobj(a) and n <= _SMALL:
        return np.sort(np.array(_svd_scalar(a)))[::-1]
    if n > 1:
        rounds = _round_robin(n)
        for _ in range(_MAX_SWEEPS):
            rotated = False
            for P, Q in rounds:
                up, uq = a[:, P], a[:, Q]
                alpha = np.sum(np.abs(up) ** 2, axis=0)
                beta = np.sum(np.abs(uq) ** 2, axis=0)
                gamma = np.sum(up.conj() * uq, axis=0)
                g = np.abs(gamma)
                active = g > _SVD_THRESHOLD * np.sqrt(alpha * beta)
                if not active.any():
                    continue
                rotated = True
                g_safe = np.where(active, g, 1.0)
                phase = np.where(active, gamma / g_safe, 1.0)
                zeta = (beta - alpha) / (2.0 * g_safe)
                t = np.where(zeta >= 0, 1.0, -1.0) / (np.abs(zeta) + np.hypot(zeta, 1.0))
                t = np.where(active, t, 0.0)
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                uq = uq * phase.conj()
                a[:, P] = c * up - s * uq
                a[:, Q] = s * up + c * uq
            if not rotated:
                break
    sv = np.sqrt(np.sum(np.abs(a) ** 2, axis=0))
    return np.sort(sv)[::-1]


def trace_norm(m) -> float:
    return float(np.sum(singular_values(m)))


# ------------------------------------------------------- exact PSD check


@dataclass(frozen=True)
class PSDCertificate:
    """Outcome of the exact elimination.

    ``pivots`` lists ``(index, pivot, multipliers)`` in elimination order,
    with ``multipliers`` mapping each index still active at that step to
    its multiplier; together they give ``M = sum_k pivot_k l_k l_k^T``.
    When ``is_psd`` is false, ``witness`` is an exact vector with
    ``witness^T M witness < 0``.
    """

    is_psd: bool
    n: int
    pivots: tuple[tuple[int, Fraction, tuple[tuple[int, Fraction], ...]], ...]
    witness: tuple[Fraction, ...] | None = None

    def __bool__(self) -> bool:
        return self.is_psd

    def factor(self) -> np.ndarray:
        """Floating A with ``A @ A.T == M`` (one column per positive pivot)."""
        if not self.is_psd:
            raise ValueError("no factor for a matrix that is not PSD")
        cols = []
        for k, d, mult in self.pivots:
            col = np.zeros(self.n)
            col[k] = 1.0
            for i, lik in mult:
                col[i] = float(lik)
            cols.append(math.sqrt(d) * col)
        if not cols:
            return np.zeros((self.n, 0))
        return np.column_stack(cols)


def exact_psd_check(m: RationalSymmetricMatrix) -> PSDCertificate:
    """Decide positive semidefiniteness exactly by pivoted rational LDL^T."""
    n = m.n
    a = m.to_rows()
    remaining = list(range(n))
    pivots = []
    z: dict[int, Fraction] | None = None
    while remaining:
        k = max(remaining, key=lambda i: (a[i][i], -i))
        d = a[k][k]
        if d <= 0:
            negative = [i for i in remaining if a[i][i] < 0]
            if negative:
                z = {negative[0]: Fraction(1)}
                break
            for pos, i in enumerate(remaining):
                j = next((j for j in remaining[pos + 1 :] if a[i][j] != 0), None)
                if j is not None:
                    z = {i: Fraction(1), j: Fraction(-1 if a[i][j] > 0 else 1)}
                    break
            break
        remaining.remove(k)
        mult = {i: a[i][k] / d for i in remaining}
        for i in remaining:
            li = mult[i]
            if li == 0:
                continue
            row_i, row_k = a[i], a[k]
            for j in remaining:
                if row_k[j]:
                    row_i[j] -= li * row_k[j]
        pivots.append((k, d, tuple((i, x) for i, x in mult.items() if x != 0)))
    frozen = tuple(pivots)
    if z is None:
        return PSDCertificate(True, n, frozen)
    # lift the Schur-complement witness back through L^T x = (0, z)
    x = dict(z)
    for k, _, mult in reversed(pivots):
        x[k] = -sum((lik * x.get(i, Fraction(0)) for i, lik in mult), Fraction(0))
    return PSDCertificate(False, n, frozen, tuple(x.get(i, Fraction(0)) for i in range(n)))


def frobenius_norm(m) -> float:
    return float(np.linalg.norm(_as_array(m)))


def kron_vectors(parts: Iterable[np.ndarray]) -> np.ndarray:
    out = np.ones(1)
    for v in parts:
        out = np.kron(out, v)
    return out
