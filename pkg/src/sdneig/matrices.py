"""Graph-localized matrices, diagonal preconditioners, and polynomial filters.

A GeoMatrix is a sparse complex matrix tied to a graph; its geodesic-width
is the largest hop distance between the endpoints of any stored nonzero
entry.  The width is what makes the iterations in this package distributable:
applying a matrix of width w only moves information w hops.

The diagonal preconditioners defined here (localized row/column absolute-sum
maxima, their floored variants, and the dominating variants built from a
polynomial filter's absolute coefficients) are what turn plain gradient
descent on ||A x||^2 into an iteration whose spectrum sits in [0, 1].
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatchError,
    InvalidInputError,
    InvalidParameterError,
)
from .graph import Graph

COMMUTE_TOL = 1e-12  # absolute tolerance for shift commutativity / dominance checks


class GeoMatrix:
    """Frozen sparse complex matrix on a graph with cached geodesic-width.

    Construct via :meth:`from_entries` or :meth:`from_dense`.  Explicit zeros
    are dropped at construction, so the cached width reflects true nonzeros.
    Rows and columns are stored sorted ascending; all reductions iterate in
    that order, which keeps centralized and distributed evaluations
    bit-comparable.
    """

    __slots__ = ("g", "width", "_rows", "_cols")

    def __init__(self, g: Graph, rows, cols, width: int):
        self.g = g
        self._rows = rows
        self._cols = cols
        self.width = width

    @classmethod
    def from_entries(cls, g: Graph, entries) -> "GeoMatrix":
        """Build from a mapping (i, j) -> complex value.

        Zero entries are dropped; NaN/Inf components are rejected.
        """
        n = g.n
        rows = [[] for _ in range(n)]
        cols = [[] for _ in range(n)]
        for (i, j), v in entries.items():
            if not (0 <= i < n and 0 <= j < n):
                raise InvalidInputError(f"entry index ({i},{j}) out of range")
            v = complex(v)
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise InvalidInputError(f"non-finite entry at ({i},{j})")
            if v == 0:
                continue
            rows[i].append((j, v))
            cols[j].append((i, v))
        for r in rows:
            r.sort(key=lambda t: t[0])
        for c in cols:
            c.sort(key=lambda t: t[0])
        rows_t = tuple(tuple(r) for r in rows)
        cols_t = tuple(tuple(c) for c in cols)
        width = _geodesic_width_of_rows(rows_t, g)
        return cls(g, rows_t, cols_t, width)

    @classmethod
    def from_dense(cls, g: Graph, dense) -> "GeoMatrix":
        dense = np.asarray(dense)
        if dense.shape != (g.n, g.n):
            raise DimensionMismatchError(f"dense shape {dense.shape} != ({g.n},{g.n})")
        entries = {}
        for i, j in zip(*np.nonzero(dense)):
            entries[(int(i), int(j))] = complex(dense[i, j])
        return cls.from_entries(g, entries)

    @classmethod
    def identity(cls, g: Graph, scale: complex = 1.0) -> "GeoMatrix":
        return cls.from_entries(g, {(i, i): scale for i in range(g.n)})

    @classmethod
    def zero(cls, g: Graph) -> "GeoMatrix":
        return cls.from_entries(g, {})

    @property
    def n(self) -> int:
        return self.g.n

    def row(self, i: int):
        """Stored entries (j, value) of row i, ascending j."""
        return self._rows[i]

    def col(self, j: int):
        """Stored entries (i, value) of column j, ascending i."""
        return self._cols[j]

    def entry(self, i: int, j: int) -> complex:
        for jj, v in self._rows[i]:
            if jj == j:
                return v
        return 0j

    def entries(self) -> dict:
        return {(i, j): v for i in range(self.n) for j, v in self._rows[i]}

    def nnz(self) -> int:
        return sum(len(r) for r in self._rows)

    def matvec(self, x) -> np.ndarray:
        """y(i) = sum_j A(i,j) x(j), summed in ascending j order."""
        x = np.asarray(x)
        if x.shape != (self.n,):
            raise DimensionMismatchError(f"vector length {x.shape} != {self.n}")
        out_dtype = np.result_type(x.dtype, np.complex128)
        y = np.zeros(self.n, dtype=out_dtype)
        for i in range(self.n):
            acc = 0j
            for j, v in self._rows[i]:
                acc = acc + v * x[j]
            y[i] = acc
        return y

    def hermitian_transpose(self) -> "GeoMatrix":
        rows = tuple(tuple((i, v.conjugate()) for i, v in c) for c in self._cols)
        cols = tuple(tuple((j, v.conjugate()) for j, v in r) for r in self._rows)
        return GeoMatrix(self.g, rows, cols, self.width)

    def conjugate(self) -> "GeoMatrix":
        rows = tuple(tuple((j, v.conjugate()) for j, v in r) for r in self._rows)
        cols = tuple(tuple((i, v.conjugate()) for i, v in c) for c in self._cols)
        return GeoMatrix(self.g, rows, cols, self.width)

    def transpose(self) -> "GeoMatrix":
        return GeoMatrix(self.g, self._cols, self._rows, self.width)

    def abs(self) -> "GeoMatrix":
        """Entrywise absolute value (real nonnegative matrix, same support)."""
        rows = tuple(tuple((j, complex(abs(v))) for j, v in r) for r in self._rows)
        cols = tuple(tuple((i, complex(abs(v))) for i, v in c) for c in self._cols)
        return GeoMatrix(self.g, rows, cols, self.width)

    def scaled(self, alpha: complex) -> "GeoMatrix":
        if alpha == 0:
            return GeoMatrix.zero(self.g)
        rows = tuple(tuple((j, alpha * v) for j, v in r) for r in self._rows)
        cols = tuple(tuple((i, alpha * v) for i, v in c) for c in self._cols)
        return GeoMatrix(self.g, rows, cols, self.width)

    def add(self, other: "GeoMatrix") -> "GeoMatrix":
        if other.g is not self.g and other.n != self.n:
            raise DimensionMismatchError("mismatched graphs")
        entries = self.entries()
        for (i, j), v in other.entries().items():
            entries[(i, j)] = entries.get((i, j), 0j) + v
        return GeoMatrix.from_entries(self.g, entries)

    def matmul(self, other: "GeoMatrix") -> "GeoMatrix":
        if other.n != self.n:
            raise DimensionMismatchError("mismatched graphs")
        return GeoMatrix.from_dense(self.g, self.to_dense() @ other.to_dense())

    def power(self, m: int) -> "GeoMatrix":
        if m < 0:
            raise InvalidParameterError("power must be >= 0")
        result = GeoMatrix.identity(self.g)
        for _ in range(m):
            result = result.matmul(self)
        return result

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.n, self.n), dtype=complex)
        for i in range(self.n):
            for j, v in self._rows[i]:
                dense[i, j] = v
        return dense

    def is_hermitian(self, tol: float = COMMUTE_TOL) -> bool:
        d = self.to_dense()
        return bool(np.max(np.abs(d - d.conj().T), initial=0.0) <= tol)

    def is_real(self) -> bool:
        return all(v.imag == 0.0 for r in self._rows for _, v in r)


def _geodesic_width_of_rows(rows, g: Graph) -> int:
    width = 0
    for i, r in enumerate(rows):
        if not r:
            continue
        if all(j == i for j, _ in r):
            continue
        dist = g.bfs_distances(i)
        for j, _ in r:
            if dist[j] > width:
                width = dist[j]
    return width


def geodesic_width(entries, g: Graph) -> int:
    """Largest hop distance rho(i, j) over nonzero entries; 0 if none."""
    rows = [[] for _ in range(g.n)]
    for (i, j), v in entries.items():
        if complex(v) != 0:
            rows[i].append((j, v))
    return _geodesic_width_of_rows(rows, g)


@dataclass(frozen=True)
class DiagonalMatrix:
    """Positive diagonal matrix, stored as its diagonal."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if vals.ndim != 1:
            raise InvalidInputError("diagonal must be a vector")
        if not np.all(np.isfinite(vals)) or np.any(vals <= 0.0):
            raise InvalidInputError("diagonal entries must be finite and positive")

    @property
    def n(self) -> int:
        return len(self.values)

    def apply(self, x) -> np.ndarray:
        return self.values * np.asarray(x)

    def apply_inv(self, x) -> np.ndarray:
        return np.asarray(x) / self.values


def _abs_row_sum(A: GeoMatrix, k: int) -> float:
    s = 0.0
    for _, v in A.row(k):
        s += abs(v)
    return s


def _abs_col_sum(A: GeoMatrix, k: int) -> float:
    s = 0.0
    for _, v in A.col(k):
        s += abs(v)
    return s


def local_sum_bound(A: GeoMatrix, k: int) -> float:
    """max of the absolute row and column sums at vertex k.

    This is the quantity each vertex can compute from its locally stored
    row/column; the preconditioner is its max over width-balls.
    """
    return max(_abs_col_sum(A, k), _abs_row_sum(A, k))


def preconditioner_P(A: GeoMatrix) -> DiagonalMatrix:
    """Localized row/column absolute-sum preconditioner.

    P(i,i) = max over k in the width-ball of i of
             max(column abs sum at k, row abs sum at k).
    For a zero matrix this would be singular, so use a floored variant
    (make_Qc) when zero rows are possible.
    """
    s = [local_sum_bound(A, k) for k in range(A.n)]
    vals = [max(s[k] for k in A.g.ball(i, A.width)) for i in range(A.n)]
    return DiagonalMatrix(np.array(vals))


def preconditioner_P_values(A: GeoMatrix) -> np.ndarray:
    """Diagonal of the preconditioner without the positivity requirement."""
    s = [local_sum_bound(A, k) for k in range(A.n)]
    return np.array([max(s[k] for k in A.g.ball(i, A.width)) for i in range(A.n)])


def schur_norm(A: GeoMatrix) -> float:
    """Largest diagonal entry of the preconditioner; an operator-norm surrogate."""
    return float(np.max(preconditioner_P_values(A), initial=0.0))


def make_Qc(A: GeoMatrix, c: float) -> DiagonalMatrix:
    """Preconditioner diagonal floored at c > 0 (nonsingular by construction)."""
    if c <= 0:
        raise InvalidParameterError("c must be positive")
    return DiagonalMatrix(np.maximum(preconditioner_P_values(A), c))


def make_Qc_sym(A: GeoMatrix, c: float) -> DiagonalMatrix:
    """Row absolute sums floored at c > 0; dominates a PSD matrix diagonally."""
    if c <= 0:
        raise InvalidParameterError("c must be positive")
    sums = np.array([_abs_row_sum(A, i) for i in range(A.n)])
    return DiagonalMatrix(np.maximum(sums, c))


def normalized_laplacian(g: Graph) -> GeoMatrix:
    """Symmetric normalized Laplacian I - D^{-1/2} A D^{-1/2} (width 1)."""
    entries = {(i, i): 1.0 + 0j for i in range(g.n)}
    for i in range(g.n):
        di = len(g.adjacency[i])
        for j in g.adjacency[i]:
            dj = len(g.adjacency[j])
            entries[(i, j)] = -1.0 / math.sqrt(di * dj)
    return GeoMatrix.from_entries(g, entries)


def spline_filter(g: Graph, m: int) -> GeoMatrix:
    """Lowpass spline filter (I - L_sym/2)^m; PSD with top eigenvalue 1."""
    if m < 1:
        raise InvalidParameterError("spline order must be >= 1")
    base = GeoMatrix.identity(g).add(normalized_laplacian(g).scaled(-0.5))
    result = base
    for _ in range(m - 1):
        result = result.matmul(base)
    return result


def spline_poly_coeffs(m: int) -> np.ndarray:
    """Coefficients of (1 - t/2)^m, so spline_filter == poly in L_sym."""
    return np.array([math.comb(m, l) * (-0.5) ** l for l in range(m + 1)], dtype=complex)


def hyperlink_matrix(g: Graph) -> GeoMatrix:
    """Left-stochastic hyperlink matrix W(i,j) = 1/deg(j) on edges."""
    entries = {}
    for j in range(g.n):
        dj = len(g.adjacency[j])
        for i in g.adjacency[j]:
            entries[(i, j)] = 1.0 / dj
    return GeoMatrix.from_entries(g, entries)


@dataclass(frozen=True)
class PolyFilter:
    """Multivariate polynomial in commuting graph shifts.

    coeffs is a dense tensor indexed by (l_1, ..., l_d) with shape
    (L_1+1, ..., L_d+1); shifts are GeoMatrices of width <= 1.  Pairwise
    commutativity is checked at construction.
    """

    shifts: tuple
    coeffs: np.ndarray
    check_commute: bool = field(default=True, compare=False)

    def __post_init__(self):
        shifts = tuple(self.shifts)
        object.__setattr__(self, "shifts", shifts)
        coeffs = np.asarray(self.coeffs, dtype=complex)
        object.__setattr__(self, "coeffs", coeffs)
        if len(shifts) == 0:
            raise InvalidInputError("at least one shift required")
        if coeffs.ndim != len(shifts):
            raise InvalidInputError("coefficient tensor rank must equal shift count")
        if not np.all(np.isfinite(coeffs)):
            raise InvalidInputError("non-finite coefficient")
        n = shifts[0].n
        for S in shifts:
            if S.n != n:
                raise DimensionMismatchError("shifts live on different graphs")
            if S.width > 1:
                raise InvalidInputError(f"shift has width {S.width} > 1")
        if self.check_commute:
            dense = [S.to_dense() for S in shifts]
            for a in range(len(dense)):
                for b in range(a + 1, len(dense)):
                    gap = np.max(np.abs(dense[a] @ dense[b] - dense[b] @ dense[a]))
                    if gap > COMMUTE_TOL:
                        raise InvalidInputError(
                            f"shifts {a} and {b} do not commute (max deviation {gap:.3e})"
                        )

    @property
    def g(self) -> Graph:
        return self.shifts[0].g

    @property
    def degrees(self) -> tuple:
        return tuple(d - 1 for d in self.coeffs.shape)

    @property
    def total_degree(self) -> int:
        return sum(self.degrees)

    def adjoint_filter(self) -> "PolyFilter":
        """Filter evaluating the Hermitian transpose of this filter's matrix.

        The shift list is reversed and each shift Hermitian-transposed, so
        the identity holds exactly even if the shifts do not commute (the
        absolute-value shifts of a commuting family generally do not).
        """
        d = len(self.shifts)
        return PolyFilter(
            shifts=tuple(S.hermitian_transpose() for S in reversed(self.shifts)),
            coeffs=np.transpose(self.coeffs.conj(), axes=tuple(reversed(range(d)))),
            check_commute=False,
        )

    def abs_filter(self) -> "PolyFilter":
        """Filter with |coefficients| and entrywise-|shifts| (dominates this one)."""
        return PolyFilter(
            shifts=tuple(S.abs() for S in self.shifts),
            coeffs=np.abs(self.coeffs).astype(complex),
            check_commute=False,
        )


def monomial_schedule(degrees):
    """Lexicographic multi-index order with predecessor links.

    Yields (index, predecessor, shift_k) triples covering every nonzero
    multi-index.  The predecessor lowers the lowest-index nonzero degree, so
    the recursion v_idx = S_k v_pred reproduces the fixed product order
    S_1^{l_1} ... S_d^{l_d} exactly, which matters when the shifts involved
    (e.g. absolute values of a commuting family) do not themselves commute.
    """
    sched = []
    for idx in itertools.product(*[range(L + 1) for L in degrees]):
        if all(l == 0 for l in idx):
            continue
        k = min(kk for kk, l in enumerate(idx) if l > 0)
        pred = tuple(l - 1 if kk == k else l for kk, l in enumerate(idx))
        sched.append((idx, pred, k))
    return sched


def poly_apply_vectors(shift_matvecs, coeffs: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Apply a polynomial filter to a vector by monomial-lattice recursion.

    shift_matvecs[k] maps a vector to S_k times it.  Both the centralized
    and the distributed filter realizations funnel through the same
    schedule and accumulation order, making them bit-comparable.
    """
    degrees = tuple(d - 1 for d in coeffs.shape)
    zero = (0,) * len(degrees)
    v = {zero: x}
    y = coeffs[zero] * x
    for idx, pred, k in monomial_schedule(degrees):
        v[idx] = shift_matvecs[k](v[pred])
        if coeffs[idx] != 0:
            y = y + coeffs[idx] * v[idx]
    return y


def poly_to_matrix(f: PolyFilter) -> GeoMatrix:
    """Dense-in-support evaluation of the filter polynomial as a GeoMatrix."""
    degrees = f.degrees
    n = f.g.n
    powers = []
    for S, L in zip(f.shifts, degrees):
        p = [np.eye(n, dtype=complex)]
        d = S.to_dense()
        for _ in range(L):
            p.append(p[-1] @ d)
        powers.append(p)
    acc = np.zeros((n, n), dtype=complex)
    for idx in itertools.product(*[range(L + 1) for L in degrees]):
        c = f.coeffs[idx]
        if c == 0:
            continue
        mono = powers[0][idx[0]]
        for k in range(1, len(degrees)):
            if idx[k] > 0:
                mono = mono @ powers[k][idx[k]]
        acc = acc + c * mono
    return GeoMatrix.from_dense(f.g, acc)


def abs_poly_matrix(f: PolyFilter) -> GeoMatrix:
    """Entrywise-nonnegative dominating matrix built from |h| and |S_k|."""
    return poly_to_matrix(f.abs_filter())


def _abs_filter_vertex_sums(f: PolyFilter):
    """Row sums (a1) and column sums (a2) of the dominating matrix.

    Both are computed by applying the absolute filter (and its adjoint) to
    the all-one vector through the shared monomial recursion, which is the
    exact arithmetic the one-hop distributed construction performs.
    """
    ones = np.ones(f.g.n)
    fa = f.abs_filter()
    a1 = poly_apply_vectors([S.matvec for S in fa.shifts], fa.coeffs, ones)
    fat = fa.adjoint_filter()
    a2 = poly_apply_vectors([S.matvec for S in fat.shifts], fat.coeffs, ones)
    return a1.real, a2.real


def hat_Q(f: PolyFilter, c: float) -> DiagonalMatrix:
    """Dominating preconditioner for a polynomial filter.

    Per-vertex max of dominating row/column sums and c, then a max over the
    ball of radius equal to the filter's total degree.
    """
    if c <= 0:
        raise InvalidParameterError("c must be positive")
    a1, a2 = _abs_filter_vertex_sums(f)
    q0 = np.maximum(np.maximum(a1, a2), c)
    L = f.total_degree
    vals = np.array([max(q0[j] for j in f.g.ball(i, L)) for i in range(f.g.n)])
    return DiagonalMatrix(vals)


def hat_Q_sym(f: PolyFilter, c: float) -> DiagonalMatrix:
    """Symmetric-variant dominating preconditioner: max(row sum of hat A, c)."""
    if c <= 0:
        raise InvalidParameterError("c must be positive")
    a1, _ = _abs_filter_vertex_sums(f)
    return DiagonalMatrix(np.maximum(a1, c))
