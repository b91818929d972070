import math

import numpy as np
import pytest

from sdneig import matrices as mat
from sdneig import solvers as sol
from sdneig.checks import (
    random_connected_graph,
    random_geo_matrix,
    random_initial,
    random_psd_matrix,
)
from sdneig.errors import InvalidInputError
from sdneig.graph import path_graph
from sdneig.matrices import GeoMatrix


def test_jacobi_oracle_invariants():
    rng = np.random.default_rng(0)
    for _ in range(10):
        n = int(rng.integers(2, 24))
        raw = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        B = (raw + raw.conj().T) / 2.0
        dec = sol.dense_hermitian_eig(B)
        V, ev = dec.eigenvectors, dec.eigenvalues
        assert np.all(np.diff(ev) >= 0.0)
        scale = max(1.0, float(np.max(np.abs(B))))
        assert np.max(np.abs(V @ np.diag(ev) @ V.conj().T - B)) <= 1e-9 * scale
        assert np.max(np.abs(V.conj().T @ V - np.eye(n))) <= 1e-9
        # cross-check against numpy's LAPACK-backed eigenvalues
        assert np.max(np.abs(ev - np.linalg.eigvalsh(B))) <= 1e-9 * scale


def test_jacobi_rejects_non_hermitian():
    with pytest.raises(InvalidInputError):
        sol.dense_hermitian_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_shift_for_eigenvalue():
    g = path_graph(3)
    H = GeoMatrix.from_entries(g, {(0, 0): 2.0, (0, 1): 1.0})
    A = sol.shift_for_eigenvalue(H, 2.0, +1)
    assert np.allclose(A.to_dense(), [[0, 1, 0], [0, -2, 0], [0, 0, -2]])
    B = sol.shift_for_eigenvalue(H, 2.0, -1)
    assert np.allclose(B.to_dense(), -A.to_dense())


def test_extremal_shift_is_psd():
    for seed in range(4):
        g = random_connected_graph(16, seed)
        H = mat.spline_filter(g, 2)
        A = sol.extremal_shift(H, "max", 1.0)
        ev = np.linalg.eigvalsh(A.to_dense())
        assert ev.min() >= -1e-10


def test_pgda_iteration_matches_formula():
    for seed in range(5):
        g = random_connected_graph(12, seed)
        A = random_geo_matrix(g, 1, seed)
        Q = mat.make_Qc(A, 0.01)
        x0 = random_initial(g.n, seed)
        traj = sol.pgda_centralized(A, Q, x0, 30)
        Ad = A.to_dense()
        B = np.eye(g.n) - np.diag(1.0 / Q.values**2) @ Ad.conj().T @ Ad
        x = x0.astype(complex)
        for n, xi in enumerate(traj.iterates):
            assert np.linalg.norm(xi - x) <= 1e-12 * max(1.0, np.linalg.norm(x))
            x = B @ x


def test_spgda_iteration_matches_formula():
    for seed in range(5):
        g = random_connected_graph(12, seed)
        A = random_psd_matrix(g, seed)
        Q = mat.make_Qc_sym(A, 0.01)
        x0 = random_initial(g.n, seed)
        traj = sol.spgda_centralized(A, Q, x0, 30)
        B = np.eye(g.n) - np.diag(1.0 / Q.values) @ A.to_dense()
        x = x0.astype(complex)
        for xi in traj.iterates:
            assert np.linalg.norm(xi - x) <= 1e-12 * max(1.0, np.linalg.norm(x))
            x = B @ x


def test_theorem1_limit_and_rate():
    for seed in range(5):
        g = random_connected_graph(14, seed)
        A = random_geo_matrix(g, 1, seed)
        Q = mat.make_Qc(A, 0.01)
        x0 = random_initial(g.n, seed)
        u, r = sol.theorem1_limit(A, Q, x0)
        assert 0.0 <= r < 1.0
        # the limit lies in the kernel of A
        if np.linalg.norm(u) > 0:
            resid = np.linalg.norm(A.matvec(u))
            assert resid <= 1e-8 * mat.schur_norm(A) * np.linalg.norm(u)
        traj = sol.pgda_centralized(A, Q, x0, 400)
        gap = np.linalg.norm(traj.final() - u)
        assert gap <= max(1e-6, 2.0 * np.linalg.norm(Q.values * x0) * r**400)


def test_rate_bound_check_passes():
    for seed in range(5):
        g = random_connected_graph(14, seed)
        A = random_geo_matrix(g, 1, seed)
        Q = mat.make_Qc(A, 0.01)
        x0 = random_initial(g.n, seed)
        traj = sol.pgda_centralized(A, Q, x0, 200)
        ok, margins = sol.rate_bound_check(traj, A, Q)
        assert ok
        assert margins.min() >= 0.0


def test_theorem2_limit_kernel():
    for seed in range(5):
        g = random_connected_graph(14, seed)
        A = random_psd_matrix(g, seed)
        Q = mat.make_Qc_sym(A, 0.01)
        x0 = random_initial(g.n, seed)
        u, r = sol.theorem2_limit(A, Q, x0)
        assert 0.0 <= r < 1.0
        traj = sol.spgda_centralized(A, Q, x0, 600)
        assert np.linalg.norm(traj.final() - u) <= max(1e-6, 10.0 * r**600)


def test_power_iteration_converges_to_top_eigenvector():
    g = random_connected_graph(20, 1)
    H = mat.spline_filter(g, 2)
    x0 = random_initial(g.n, 1)
    traj = sol.power_iteration(H, x0, 2000)
    x = traj.final()
    assert abs(np.linalg.norm(x) - 1.0) <= 1e-12
    Hx = H.to_dense() @ x
    lam = np.vdot(x, Hx).real
    assert abs(lam - 1.0) <= 1e-6
    assert np.linalg.norm(Hx - lam * x) <= 1e-6


def test_power_iteration_breakdown_flag():
    g = path_graph(2)
    N = GeoMatrix.from_entries(g, {(0, 1): 1.0})  # nilpotent
    traj = sol.power_iteration(N, np.array([0.0, 1.0]), 5)
    assert traj.params["breakdown"] is not None


def test_align_phase():
    ref = np.array([1.0 + 0j, 0.0])
    target = np.array([1j, 0.0])
    aligned = sol.align_phase(ref, target)
    assert np.allclose(aligned, target)
    # orthogonal target leaves the reference unchanged
    assert np.allclose(sol.align_phase(ref, np.array([0.0, 1.0 + 0j])), ref)


def test_metrics_ce_nr_values():
    g = random_connected_graph(10, 2)
    A = random_psd_matrix(g, 2)
    Q = mat.make_Qc_sym(A, 0.01)
    x0 = random_initial(g.n, 2)
    traj = sol.spgda_centralized(A, Q, x0, 50)
    u, _ = sol.theorem2_limit(A, Q, x0)
    rows = sol.metrics_ce_nr(traj, u, A)
    assert [n for n, _, _ in rows] == list(range(51))
    for n, ce, nr in rows:
        x = traj.iterates[n]
        xt = x / np.linalg.norm(x)
        expect_nr = np.log10(np.linalg.norm(A.matvec(xt)))
        assert math.isclose(nr, max(min(expect_nr, 16.0), -16.0), abs_tol=1e-12)
        assert -16.0 <= ce <= 16.0
    # CE decreases overall
    assert rows[-1][1] < rows[0][1]


def test_metrics_zero_limit_gives_nan_ce():
    g = path_graph(3)
    A = mat.normalized_laplacian(g)
    traj = sol.Trajectory(iterates=[np.ones(3, dtype=complex)], tag="t")
    rows = sol.metrics_ce_nr(traj, np.zeros(3), A)
    assert math.isnan(rows[0][1])
    assert not math.isnan(rows[0][2])
