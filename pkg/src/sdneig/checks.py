"""Seeded random instances and property suites.

The suites here back the `check` CLI command: each one runs a named family
of invariants on freshly generated seeded instances and reports a
machine-readable pass/fail record with margins.
"""

from __future__ import annotations

import numpy as np

from . import matrices as mat
from . import solvers as sol
from .errors import InvalidParameterError
from .graph import Graph, random_geometric_graph
from .matrices import GeoMatrix, PolyFilter
from .rng import STREAM_CHECK, substream
from .runtime import NetworkSim, construct_hatQ_distributed, run_pgda, run_spgda

SUITES = ("oracle", "theorem1", "theorem2", "alg4", "equivalence")


def random_connected_graph(n: int, seed: int) -> Graph:
    return random_geometric_graph(n, seed)


def random_geo_matrix(g: Graph, omega: int, seed: int, complex_entries: bool = True) -> GeoMatrix:
    """Random matrix supported on pairs within hop distance omega."""
    stream = substream(seed, STREAM_CHECK, index=1)
    entries = {}
    for i in range(g.n):
        for j in g.ball(i, omega):
            if stream.uniform() < 0.3:
                continue
            re = stream.uniform() - 0.5
            im = stream.uniform() - 0.5
            entries[(i, j)] = complex(re, im if complex_entries else 0.0)
    return GeoMatrix.from_entries(g, entries)


def random_psd_matrix(g: Graph, seed: int) -> GeoMatrix:
    """Random PSD Hermitian matrix of width <= 2 (Gram matrix of a width-1 factor)."""
    C = random_geo_matrix(g, 1, seed)
    dense = C.to_dense()
    gram = dense.conj().T @ dense
    gram = (gram + gram.conj().T) / 2.0
    return GeoMatrix.from_dense(g, gram)


def random_polyfilter(g: Graph, seed: int, d: int = 2, max_degree: int = 2) -> PolyFilter:
    """Random commuting-shift filter; shifts are degree-1 polynomials of L_sym."""
    stream = substream(seed, STREAM_CHECK, index=2)
    L = mat.normalized_laplacian(g)
    eye = GeoMatrix.identity(g)
    shifts = []
    for _ in range(d):
        alpha = stream.uniform() - 0.5
        beta = stream.uniform() - 0.5
        shifts.append(eye.scaled(alpha).add(L.scaled(beta)))
    degrees = tuple(1 + stream.integer(max_degree) for _ in range(d))
    coeffs = np.empty(tuple(Lk + 1 for Lk in degrees), dtype=complex)
    flat = coeffs.reshape(-1)
    for k in range(flat.size):
        flat[k] = complex(stream.uniform() - 0.5, stream.uniform() - 0.5)
    return PolyFilter(shifts=tuple(shifts), coeffs=coeffs)


def random_initial(n: int, seed: int, trial: int = 0) -> np.ndarray:
    return substream(seed, STREAM_CHECK, index=100 + trial).uniforms(n)


def _case(name, seed, margin, ok):
    return {"property": name, "seed": seed, "margin": float(margin), "ok": bool(ok)}


def suite_oracle(seed: int = 0, cases: int = 20) -> dict:
    """Eigendecomposition invariants on random Hermitian matrices."""
    results = []
    stream = substream(seed, STREAM_CHECK, index=3)
    for k in range(cases):
        n = 4 + stream.integer(29)
        raw = np.array(
            [[complex(stream.uniform() - 0.5, stream.uniform() - 0.5) for _ in range(n)]
             for _ in range(n)]
        )
        B = (raw + raw.conj().T) / 2.0
        dec = sol.dense_hermitian_eig(B)
        V, ev = dec.eigenvectors, dec.eigenvalues
        scale = max(1.0, float(np.max(np.abs(B))))
        resid = float(np.max(np.abs(V @ np.diag(ev) @ V.conj().T - B))) / scale
        orth = float(np.max(np.abs(V.conj().T @ V - np.eye(n))))
        results.append(_case("reconstruction", seed + k, 1e-9 - resid, resid <= 1e-9))
        results.append(_case("orthonormality", seed + k, 1e-9 - orth, orth <= 1e-9))
    return _report("oracle", results)


def suite_theorem1(seed: int = 0, cases: int = 20) -> dict:
    """Rate bound and kernel property of the descent limit."""
    results = []
    for k in range(cases):
        g = random_connected_graph(12 + (k % 3) * 10, seed + k)
        A = random_geo_matrix(g, 1 + k % 2, seed + k)
        Q = mat.make_Qc(A, 0.01)
        x0 = random_initial(g.n, seed + k)
        traj = sol.pgda_centralized(A, Q, x0, 200)
        ok, margins = sol.rate_bound_check(traj, A, Q)
        results.append(_case("rate_bound", seed + k, float(np.min(margins)), ok))
        u, _ = sol.theorem1_limit(A, Q, x0)
        unorm = float(np.linalg.norm(u))
        if unorm > 0:
            resid = float(np.linalg.norm(A.matvec(u))) / (mat.schur_norm(A) * unorm)
            results.append(_case("limit_in_kernel", seed + k, 1e-8 - resid, resid <= 1e-8))
    return _report("theorem1", results)


def suite_theorem2(seed: int = 0, cases: int = 20) -> dict:
    """Spectral containment and convergence for the symmetric iteration."""
    results = []
    for k in range(cases):
        g = random_connected_graph(12 + (k % 3) * 10, seed + k)
        A = random_psd_matrix(g, seed + k)
        Qs = mat.make_Qc_sym(A, 0.01)
        qh = np.sqrt(Qs.values)
        Ad = A.to_dense()
        Bsym = np.eye(A.n) - (Ad / qh[:, None]) / qh[None, :]
        ev = sol.dense_hermitian_eig(Bsym).eigenvalues
        lo, hi = float(np.min(ev)), float(np.max(ev))
        inside = lo >= -1e-12 and hi <= 1.0 + 1e-12
        results.append(_case("unit_interval", seed + k, min(lo + 1e-12, 1.0 + 1e-12 - hi), inside))
        x0 = random_initial(g.n, seed + k)
        u, r = sol.theorem2_limit(A, Qs, x0)
        traj = sol.spgda_centralized(A, Qs, x0, 150)
        lead = float(np.linalg.norm(qh * x0))
        ok = True
        worst = np.inf
        for n, x in enumerate(traj.iterates):
            err = float(np.linalg.norm(qh * (x - u)))
            bound = lead * r**n * (1.0 + 1e-9) + 1e-12
            worst = min(worst, bound - err)
            if err > bound:
                ok = False
        results.append(_case("rate_bound_sym", seed + k, worst, ok))
    return _report("theorem2", results)


def suite_alg4(seed: int = 0, cases: int = 20) -> dict:
    """Distributed dominating-preconditioner construction vs centralized."""
    results = []
    for k in range(cases):
        g = random_connected_graph(10 + (k % 3) * 8, seed + k)
        f = random_polyfilter(g, seed + k)
        sim = NetworkSim(g, 1)
        qd, qsd = construct_hatQ_distributed(sim, f, 0.01)
        qc = mat.hat_Q(f, 0.01)
        qsc = mat.hat_Q_sym(f, 0.01)
        exact = np.array_equal(qd.values, qc.values) and np.array_equal(qsd.values, qsc.values)
        results.append(_case("hatQ_bitwise", seed + k, 0.0 if exact else -1.0, exact))
        A = mat.poly_to_matrix(f)
        Ahat = mat.abs_poly_matrix(f)
        gap = float(np.min(Ahat.to_dense().real - np.abs(A.to_dense())))
        results.append(_case("dominance", seed + k, gap + mat.COMMUTE_TOL, gap >= -mat.COMMUTE_TOL))
    return _report("alg4", results)


def suite_equivalence(seed: int = 0, cases: int = 20) -> dict:
    """Distributed trajectories match the centralized iterations."""
    results = []
    for k in range(cases):
        g = random_connected_graph(8 + (k % 3) * 8, seed + k)
        omega = 1 + k % 2
        H = random_geo_matrix(g, omega, seed + k)
        stream = substream(seed + k, STREAM_CHECK, index=4)
        lam = complex(stream.uniform() - 0.5, stream.uniform() - 0.5)
        A = sol.shift_for_eigenvalue(H, lam, +1)
        Q = mat.make_Qc(A, 0.01)
        x0 = random_initial(g.n, seed + k)
        sim = NetworkSim(g, max(1, H.width))
        traj_d = run_pgda(sim, H, lam, Q, x0, 100)
        traj_c = sol.pgda_centralized(A, Q, x0, 100)
        rel = _max_relative_gap(traj_d, traj_c.iterates)
        results.append(_case("pgda_equivalence", seed + k, 1e-10 - rel, rel <= 1e-10))
        Apsd = random_psd_matrix(g, seed + k)
        Qs = mat.make_Qc_sym(Apsd, 0.01)
        sim2 = NetworkSim(g, max(1, Apsd.width))
        traj_ds = run_spgda(sim2, Apsd, Qs, x0, 100)
        traj_cs = sol.spgda_centralized(Apsd, Qs, x0, 100)
        rel = _max_relative_gap(traj_ds, traj_cs.iterates)
        results.append(_case("spgda_equivalence", seed + k, 1e-10 - rel, rel <= 1e-10))
    return _report("equivalence", results)


def _max_relative_gap(seq_a, seq_b) -> float:
    worst = 0.0
    for a, b in zip(seq_a, seq_b):
        scale = max(float(np.linalg.norm(b)), 1e-30)
        worst = max(worst, float(np.linalg.norm(np.asarray(a) - b)) / scale)
    return worst


def _report(suite: str, cases) -> dict:
    return {"suite": suite, "passed": all(c["ok"] for c in cases), "cases": cases}


def run_suite(name: str, seed: int = 0) -> dict:
    funcs = {
        "oracle": suite_oracle,
        "theorem1": suite_theorem1,
        "theorem2": suite_theorem2,
        "alg4": suite_alg4,
        "equivalence": suite_equivalence,
    }
    if name not in funcs:
        raise InvalidParameterError(f"unknown suite {name!r}; choose from {SUITES}")
    return funcs[name](seed=seed)
