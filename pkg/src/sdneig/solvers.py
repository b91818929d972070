"""Centralized reference iterations, eigen-oracle, convergence limits, metrics.

The two iterations mirror the distributed runtime step for step (same
per-entry folding of the preconditioner, same ascending-index reductions),
so cross-checks between the two are tight.  The dense Hermitian
eigendecomposition is the independent oracle for everything spectral: limit
vectors, convergence rates, and containment checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatchError,
    InvalidInputError,
)
from .matrices import DiagonalMatrix, GeoMatrix

EIGENVALUE_ONE_BAND = 1e-9  # eigenvalues above 1 - band count as the limit eigenspace
BREAKDOWN_NORM = 1e-30
LOG_CLAMP = 16.0


@dataclass
class Trajectory:
    """Iterate sequence x_0..x_M with the algorithm tag and its parameters."""

    iterates: list
    tag: str
    params: dict = field(default_factory=dict)

    @property
    def steps(self) -> int:
        return len(self.iterates) - 1

    def final(self) -> np.ndarray:
        return self.iterates[-1]


@dataclass
class EigenDecomposition:
    """Orthonormal eigenpairs of a Hermitian matrix, eigenvalues ascending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns


def _folded_pgda_operator(A: GeoMatrix, Q: DiagonalMatrix) -> GeoMatrix:
    """Matrix with entries Q(i,i)^-2 conj(A(j,i)); the second half of a step."""
    q2 = Q.values**2
    entries = {}
    for i in range(A.n):
        qi = 1.0 / q2[i]
        for j, v in A.col(i):
            entries[(i, j)] = qi * v.conjugate()
    return GeoMatrix.from_entries(A.g, entries)


def pgda_centralized(A: GeoMatrix, Q: DiagonalMatrix, x0, M: int) -> Trajectory:
    """Preconditioned gradient descent x_{n+1} = (I - Q^{-2} A* A) x_n.

    Evaluated as two sparse applications per step with the preconditioner
    folded into the second factor, matching the distributed realization.
    """
    x0 = np.asarray(x0, dtype=complex)
    if x0.shape != (A.n,):
        raise DimensionMismatchError("initial vector length mismatch")
    if Q.n != A.n:
        raise DimensionMismatchError("preconditioner size mismatch")
    At = _folded_pgda_operator(A, Q)
    x = x0.copy()
    iterates = [x.copy()]
    for _ in range(M):
        t = A.matvec(x)
        x = x - At.matvec(t)
        iterates.append(x.copy())
    return Trajectory(iterates=iterates, tag="pgda", params={"M": M})


def spgda_centralized(A: GeoMatrix, Qsym: DiagonalMatrix, x0, M: int) -> Trajectory:
    """Symmetric variant x_{n+1} = (I - Qsym^{-1} A) x_n for PSD A."""
    x0 = np.asarray(x0, dtype=complex)
    if x0.shape != (A.n,):
        raise DimensionMismatchError("initial vector length mismatch")
    if Qsym.n != A.n:
        raise DimensionMismatchError("preconditioner size mismatch")
    entries = {}
    for i in range(A.n):
        qi = 1.0 / Qsym.values[i]
        for j, v in A.row(i):
            entries[(i, j)] = qi * v
    At = GeoMatrix.from_entries(A.g, entries)
    x = x0.copy()
    iterates = [x.copy()]
    for _ in range(M):
        x = x - At.matvec(x)
        iterates.append(x.copy())
    return Trajectory(iterates=iterates, tag="spgda", params={"M": M})


def shift_for_eigenvalue(H: GeoMatrix, lam: complex, sign: int = +1) -> GeoMatrix:
    """H - lam*I for sign=+1, lam*I - H for sign=-1 (width recomputed)."""
    if sign not in (+1, -1):
        raise InvalidInputError("sign must be +1 or -1")
    entries = H.entries()
    for i in range(H.n):
        entries[(i, i)] = entries.get((i, i), 0j) - lam
    if sign == -1:
        entries = {k: -v for k, v in entries.items()}
    return GeoMatrix.from_entries(H.g, entries)


def extremal_shift(H: GeoMatrix, which: str, lam_ext: float) -> GeoMatrix:
    """PSD shift of a Hermitian matrix: H - lam_min*I or lam_max*I - H."""
    if not H.is_hermitian():
        raise InvalidInputError("extremal shift requires a Hermitian matrix")
    if which == "min":
        return shift_for_eigenvalue(H, lam_ext, +1)
    if which == "max":
        return shift_for_eigenvalue(H, lam_ext, -1)
    raise InvalidInputError(f"which must be 'min' or 'max', got {which!r}")


def power_iteration(H: GeoMatrix, x0, M: int) -> Trajectory:
    """Normalized power iteration; flags breakdown when H x vanishes."""
    x = np.asarray(x0, dtype=complex)
    if x.shape != (H.n,):
        raise DimensionMismatchError("initial vector length mismatch")
    norm = np.linalg.norm(x)
    if norm == 0.0:
        raise InvalidInputError("power iteration needs a nonzero initial vector")
    Hd = H.to_dense()
    iterates = [x / norm]
    breakdown = None
    for n in range(M):
        y = Hd @ iterates[-1]
        norm = np.linalg.norm(y)
        if norm < BREAKDOWN_NORM:
            breakdown = n + 1
            iterates.append(iterates[-1].copy())
            break
        iterates.append(y / norm)
    return Trajectory(iterates=iterates, tag="power", params={"M": M, "breakdown": breakdown})


def dense_hermitian_eig(B, tol: float = 1e-12, max_sweeps: int = 100) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Sweeps unitary 2x2 rotations over all off-diagonal positions until the
    largest off-diagonal magnitude falls below tol times the matrix scale.
    """
    B = np.asarray(B, dtype=complex)
    n = B.shape[0]
    if B.shape != (n, n):
        raise InvalidInputError("matrix must be square")
    scale = max(1.0, float(np.max(np.abs(B), initial=0.0)))
    if np.max(np.abs(B - B.conj().T), initial=0.0) > 1e-12 * scale:
        raise InvalidInputError("matrix is not Hermitian within tolerance")
    A = (B + B.conj().T) / 2.0
    V = np.eye(n, dtype=complex)
    thresh = tol * scale
    for _ in range(max_sweeps):
        off = 0.0
        for p in range(n - 1):
            row = np.abs(A[p, p + 1 :])
            if row.size:
                off = max(off, float(row.max()))
        if off <= thresh:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= thresh * 1e-2:
                    continue
                app = A[p, p].real
                aqq = A[q, q].real
                phase = apq / abs(apq)
                tau = (aqq - app) / (2.0 * abs(apq))
                if tau >= 0:
                    t = -1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = 1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                # unitary U = [[c, -s*phase], [s*conj(phase), c]] acting on (p, q)
                col_p = A[:, p].copy()
                col_q = A[:, q].copy()
                A[:, p] = c * col_p + s * np.conj(phase) * col_q
                A[:, q] = -s * phase * col_p + c * col_q
                row_p = A[p, :].copy()
                row_q = A[q, :].copy()
                A[p, :] = c * row_p + s * phase * row_q
                A[q, :] = -s * np.conj(phase) * row_p + c * row_q
                A[p, q] = 0.0
                A[q, p] = 0.0
                col_p = V[:, p].copy()
                col_q = V[:, q].copy()
                V[:, p] = c * col_p + s * np.conj(phase) * col_q
                V[:, q] = -s * phase * col_p + c * col_q
    else:
        raise InvalidInputError("Jacobi iteration failed to converge")
    eigenvalues = np.real(np.diag(A))
    order = np.argsort(eigenvalues, kind="stable")
    return EigenDecomposition(eigenvalues=eigenvalues[order], eigenvectors=V[:, order])


def _projected_limit(Bsym: np.ndarray, w0: np.ndarray):
    """Limit of B^n w0 and the decay rate, via the eigen-oracle.

    Returns (limit in transformed coordinates, rate r).
    """
    dec = dense_hermitian_eig(Bsym)
    coeffs = dec.eigenvectors.conj().T @ w0
    keep = dec.eigenvalues > 1.0 - EIGENVALUE_ONE_BAND
    limit = dec.eigenvectors[:, keep] @ coeffs[keep]
    rest = dec.eigenvalues[~keep]
    r = float(np.max(rest, initial=0.0))
    return limit, max(r, 0.0)


def theorem1_limit(A: GeoMatrix, Q: DiagonalMatrix, x0):
    """Limit vector u and rate r of the preconditioned descent iteration.

    Builds B = I - Q^{-1} A* A Q^{-1}, projects Q x0 onto its eigenspace at
    eigenvalue one, and maps back through Q^{-1}.  r is the largest
    eigenvalue strictly below the eigenvalue-one band (0 if none).
    """
    x0 = np.asarray(x0, dtype=complex)
    Ad = A.to_dense()
    qi = 1.0 / Q.values
    Bsym = np.eye(A.n) - qi[:, None] * (Ad.conj().T @ Ad) * qi[None, :]
    limit, r = _projected_limit(Bsym, Q.values * x0)
    return limit / Q.values, r


def theorem2_limit(A: GeoMatrix, Qsym: DiagonalMatrix, x0):
    """Limit and rate for the symmetric iteration on a PSD matrix."""
    x0 = np.asarray(x0, dtype=complex)
    Ad = A.to_dense()
    qh = np.sqrt(Qsym.values)
    Bsym = np.eye(A.n) - (Ad / qh[:, None]) / qh[None, :]
    limit, r = _projected_limit(Bsym, qh * x0)
    return limit / qh, r


def rate_bound_check(traj: Trajectory, A: GeoMatrix, Q: DiagonalMatrix):
    """Verify ||Q(x_n - u)|| <= ||Q x_0|| r^n along a recorded trajectory.

    Returns (ok, margins) where margins[n] = bound_n - error_n (all should
    be >= 0 up to the stated slack).
    """
    u, r = theorem1_limit(A, Q, traj.iterates[0])
    q = Q.values
    lead = np.linalg.norm(q * traj.iterates[0])
    ok = True
    margins = []
    for n, x in enumerate(traj.iterates):
        err = np.linalg.norm(q * (x - u))
        bound = lead * r**n * (1.0 + 1e-9) + 1e-12
        margins.append(bound - err)
        if err > bound:
            ok = False
    return ok, np.array(margins)


def _clamped_log10(value: float) -> float:
    if value <= 0.0:
        return -LOG_CLAMP
    return float(np.clip(math.log10(value), -LOG_CLAMP, LOG_CLAMP))


def align_phase(reference: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Multiply reference by the unimodular scalar best matching target."""
    z = np.vdot(reference, target)  # conj(reference) . target
    if abs(z) == 0.0:
        return reference
    return (z / abs(z)) * reference


def metrics_ce_nr(traj: Trajectory, u, A: GeoMatrix):
    """Per-iteration convergence error and normalized residue (log10).

    CE(n) compares the normalized iterate with the phase-aligned normalized
    limit; NR(n) is the residual of the normalized iterate under A.  Both
    are clamped to +-16.  CE is NaN when the limit is zero or the iterate
    norm underflows (NR is still produced when possible).
    """
    u = np.asarray(u, dtype=complex)
    unorm = np.linalg.norm(u)
    ut = u / unorm if unorm > BREAKDOWN_NORM else None
    out = []
    for n, x in enumerate(traj.iterates):
        xnorm = np.linalg.norm(x)
        if xnorm <= BREAKDOWN_NORM:
            out.append((n, math.nan, math.nan))
            continue
        xt = x / xnorm
        nr = _clamped_log10(float(np.linalg.norm(A.matvec(xt))))
        if ut is None:
            ce = math.nan
        else:
            ce = _clamped_log10(float(np.linalg.norm(xt - align_phase(ut, xt))))
        out.append((n, ce, nr))
    return out
