"""Seeded multi-trial experiment harness.

Runs the configured descent algorithms and baselines on one problem
instance, averages per-iteration convergence metrics over trials, and
writes a CSV curve file.  Iterations here use the dense centralized form
of each algorithm (the distributed runtime is validated against it
step-for-step by the equivalence suite); communication cost is reported
analytically from the graph and the algorithm's round structure.

All trials for one algorithm are batched as columns of a single matrix, so
a run is deterministic for a fixed config regardless of trial count or
BLAS threading.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

from . import matrices as mat
from . import solvers as sol
from .errors import InvalidInputError, InvalidParameterError
from .graph import Graph, load_graph, random_geometric_graph
from .matrices import DiagonalMatrix, GeoMatrix, PolyFilter
from .rng import STREAM_INITIAL, substream

ALGORITHMS = ("pgda", "spgda", "pgda1h", "spgda1h", "gdaschur", "sgdaschur", "power")
REFERENCE_RUN_FACTOR = 4  # the reference limit is the end of a 4x longer run


@dataclass
class ExperimentConfig:
    """Validated mirror of the JSON run configuration."""

    graph: dict
    filter: dict
    eigenvalue: dict
    algorithms: list
    c: float
    M: int
    trials: int
    seed: int
    out: str

    def __post_init__(self):
        if self.c <= 0:
            raise InvalidParameterError("c must be positive")
        if self.M < 1:
            raise InvalidParameterError("M must be >= 1")
        if self.trials < 1:
            raise InvalidParameterError("trials must be >= 1")
        if not self.algorithms:
            raise InvalidParameterError("at least one algorithm required")
        for a in self.algorithms:
            if a not in ALGORITHMS:
                raise InvalidParameterError(f"unknown algorithm {a!r}")

    @classmethod
    def from_json(cls, obj: dict) -> "ExperimentConfig":
        try:
            return cls(
                graph=obj["graph"],
                filter=obj["filter"],
                eigenvalue=obj.get("eigenvalue", {"extremal": "max", "value": 1.0}),
                algorithms=list(obj["algorithms"]),
                c=float(obj.get("c", 0.01)),
                M=int(obj["M"]),
                trials=int(obj.get("trials", 50)),
                seed=int(obj.get("seed", 0)),
                out=str(obj.get("out", "curves.csv")),
            )
        except KeyError as exc:
            raise InvalidParameterError(f"missing config field {exc}") from exc

    @classmethod
    def load(cls, path: str) -> "ExperimentConfig":
        with open(path) as f:
            return cls.from_json(json.load(f))


@dataclass
class CurveSet:
    """Per-algorithm averaged metric series (length M+1 each)."""

    series: dict = field(default_factory=dict)  # algo -> (ce_means, nr_means)
    summary: list = field(default_factory=list)  # human-readable summary lines


def load_matrix(path: str, g: Graph) -> GeoMatrix:
    """Matrix file: JSON {"n": int, "triplets": [[i, j, re, im], ...]}."""
    with open(path) as f:
        obj = json.load(f)
    if int(obj["n"]) != g.n:
        raise InvalidInputError("matrix size does not match the graph")
    entries = {}
    for i, j, re, im in obj["triplets"]:
        entries[(int(i), int(j))] = complex(re, im)
    return GeoMatrix.from_entries(g, entries)


def load_polyfilter(path: str, g: Graph) -> PolyFilter:
    """Filter file: {"degrees": [...], "coeffs": [[re, im], ...] (C order),
    "shifts": [triplet-list, ...]}."""
    with open(path) as f:
        obj = json.load(f)
    shifts = []
    for trips in obj["shifts"]:
        entries = {(int(i), int(j)): complex(re, im) for i, j, re, im in trips}
        shifts.append(GeoMatrix.from_entries(g, entries))
    shape = tuple(int(L) + 1 for L in obj["degrees"])
    coeffs = np.array([complex(re, im) for re, im in obj["coeffs"]]).reshape(shape)
    return PolyFilter(shifts=tuple(shifts), coeffs=coeffs)


@dataclass
class Problem:
    """Materialized experiment instance."""

    g: Graph
    H: GeoMatrix
    A: GeoMatrix
    lam: complex
    sign: int  # +1: A = H - lam I; -1: A = lam I - H
    f_A: PolyFilter | None  # polynomial representation of A, when available


def _build_graph(spec: dict) -> Graph:
    if "file" in spec:
        return load_graph(spec["file"])
    if "n" in spec and "seed" in spec:
        return random_geometric_graph(int(spec["n"]), int(spec["seed"]))
    raise InvalidParameterError("graph spec needs either 'file' or 'n'+'seed'")


def _as_complex(value) -> complex:
    if isinstance(value, (list, tuple)):
        return complex(value[0], value[1])
    return complex(value)


def build_problem(cfg: ExperimentConfig) -> Problem:
    g = _build_graph(cfg.graph)
    kind = cfg.filter.get("kind")
    f_H = None
    if kind == "spline":
        m = int(cfg.filter["m"])
        H = mat.spline_filter(g, m)
        f_H = PolyFilter(shifts=(mat.normalized_laplacian(g),),
                         coeffs=mat.spline_poly_coeffs(m))
    elif kind == "laplacian":
        H = mat.normalized_laplacian(g)
    elif kind == "hyperlink":
        H = mat.hyperlink_matrix(g)
    elif kind == "matrix":
        H = load_matrix(cfg.filter["path"], g)
    elif kind == "polyfilter":
        f_H = load_polyfilter(cfg.filter["path"], g)
        H = mat.poly_to_matrix(f_H)
    else:
        raise InvalidParameterError(f"unknown filter kind {kind!r}")
    if f_H is None and H.width <= 1:
        # any width-1 matrix is itself a graph shift
        f_H = PolyFilter(shifts=(H,), coeffs=np.array([0.0, 1.0], dtype=complex))

    ev = cfg.eigenvalue
    if "extremal" in ev:
        which = ev["extremal"]
        lam = _as_complex(ev["value"])
        sign = -1 if which == "max" else +1
        if which not in ("min", "max"):
            raise InvalidParameterError("extremal selector must be 'min' or 'max'")
    else:
        lam = _as_complex(ev["value"])
        sign = +1
    A = sol.shift_for_eigenvalue(H, lam, sign)

    f_A = None
    if f_H is not None:
        coeffs = f_H.coeffs.copy()
        zero = (0,) * coeffs.ndim
        coeffs[zero] -= lam
        if sign == -1:
            coeffs = -coeffs
        f_A = PolyFilter(shifts=f_H.shifts, coeffs=coeffs,
                         check_commute=f_H.check_commute)
    return Problem(g=g, H=H, A=A, lam=lam, sign=sign, f_A=f_A)


def preconditioner_for(algo: str, problem: Problem, c: float) -> DiagonalMatrix | None:
    A, f = problem.A, problem.f_A
    if algo == "pgda":
        return mat.make_Qc(A, c)
    if algo == "spgda":
        return mat.make_Qc_sym(A, c)
    if algo == "gdaschur":
        return mat.make_Qc(A, mat.schur_norm(A))
    if algo == "sgdaschur":
        return mat.make_Qc_sym(A, mat.schur_norm(A))
    if algo in ("pgda1h", "spgda1h"):
        if f is None:
            raise InvalidParameterError(
                f"{algo} needs a polynomial filter representation (width-1 shifts)"
            )
        return mat.hat_Q(f, c) if algo == "pgda1h" else mat.hat_Q_sym(f, c)
    if algo == "power":
        return None
    raise InvalidParameterError(f"unknown algorithm {algo!r}")


def _family(algo: str) -> str:
    if algo in ("pgda", "pgda1h", "gdaschur"):
        return "pgda"
    if algo in ("spgda", "spgda1h", "sgdaschur"):
        return "spgda"
    return "power"


def _column_norms(X: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(np.abs(X) ** 2, axis=0))


def _clamped_log10_cols(norms: np.ndarray) -> np.ndarray:
    out = np.full(norms.shape, -sol.LOG_CLAMP)
    pos = norms > 0.0
    out[pos] = np.clip(np.log10(norms[pos]), -sol.LOG_CLAMP, sol.LOG_CLAMP)
    return out


def _matrix_power_apply(B: np.ndarray, exponent: int, X: np.ndarray,
                        renormalize: bool = False) -> np.ndarray:
    """B^exponent @ X by binary exponentiation on the matrix.

    With renormalize=True only the column directions survive (used for the
    power-iteration reference, where the iterate is normalized anyway).
    """
    acc = None
    base = B.copy()
    e = exponent
    while e > 0:
        if e & 1:
            acc = base.copy() if acc is None else acc @ base
            if renormalize:
                acc /= np.max(np.abs(acc))
        base = base @ base
        if renormalize:
            base /= np.max(np.abs(base))
        e >>= 1
    if acc is None:
        return X.copy()
    return acc @ X


def _reference_limits(family: str, Hd, Ad, At, q, X0, M: int) -> np.ndarray:
    """End point of a REFERENCE_RUN_FACTOR x longer run, per trial column."""
    steps = REFERENCE_RUN_FACTOR * M
    if family == "pgda":
        B = np.eye(Ad.shape[0], dtype=Ad.dtype) - (At @ Ad) / (q * q)[:, None]
        return _matrix_power_apply(B, steps, X0)
    if family == "spgda":
        B = np.eye(Ad.shape[0], dtype=Ad.dtype) - Ad / q[:, None]
        return _matrix_power_apply(B, steps, X0)
    return _matrix_power_apply(Hd, steps, X0, renormalize=True)


def _run_batch(algo: str, Hd, Ad, q, X0, lam, M: int):
    """Iterate one algorithm on all trial columns, collecting mean CE/NR."""
    family = _family(algo)
    At = Ad.conj().T
    U = _reference_limits(family, Hd, Ad, At, q, X0, M)
    unorms = _column_norms(U)
    safe = unorms > sol.BREAKDOWN_NORM
    Ut = np.where(safe[None, :], U / np.where(safe, unorms, 1.0)[None, :], np.nan)

    X = X0.copy()
    ce_means = np.empty(M + 1)
    nr_means = np.empty(M + 1)
    for n in range(M + 1):
        xnorms = _column_norms(X)
        Xt = X / xnorms[None, :]
        if family == "power":
            Y = Hd @ X
            R = lam * Xt - (Y / xnorms[None, :])
            nr_cols = _column_norms(R)
        else:
            Y = Ad @ X
            nr_cols = _column_norms(Y) / xnorms
        # phase-align the reference to each trial column before differencing
        z = np.sum(Ut.conj() * Xt, axis=0)
        zmag = np.abs(z)
        phase = np.where(zmag > 0.0, z / np.where(zmag > 0.0, zmag, 1.0), 1.0)
        ce_cols = _column_norms(Xt - phase[None, :] * Ut)
        ce_means[n] = float(np.mean(_clamped_log10_cols(ce_cols)))
        nr_means[n] = float(np.mean(_clamped_log10_cols(nr_cols)))
        if n < M:
            if family == "pgda":
                X = X - (At @ Y) / (q * q)[:, None]
            elif family == "spgda":
                X = X - Y / q[:, None]
            else:
                ynorms = _column_norms(Y)
                X = Y / np.where(ynorms > sol.BREAKDOWN_NORM, ynorms, 1.0)[None, :]
    return ce_means, nr_means


def _communication_summary(algo: str, problem: Problem) -> str:
    g = problem.g
    if algo in ("gdaschur", "sgdaschur", "power"):
        return f"{algo}: centralized baseline, no vertex-level message exchange"
    if algo in ("pgda", "spgda"):
        omega = problem.A.width
        msgs = sum(len(g.ball(i, omega)) - 1 for i in range(g.n))
        rounds = 2 if algo == "pgda" else 1
        return (f"{algo}: {rounds} exchange round(s)/iteration at radius {omega}, "
                f"{msgs} messages/round")
    f = problem.f_A
    applications = int(np.prod([L + 1 for L in f.degrees])) - 1
    rounds = 2 * applications if algo == "pgda1h" else applications
    msgs = sum(len(g.ball(i, 1)) - 1 for i in range(g.n))
    return (f"{algo}: {rounds} one-hop exchange round(s)/iteration, "
            f"{msgs} messages/round")


def run_curves(cfg: ExperimentConfig, problem: Problem | None = None) -> CurveSet:
    """Run every configured algorithm over the shared per-trial initials."""
    if problem is None:
        problem = build_problem(cfg)
    # one shared initial vector per trial across all algorithms
    X0_cols = [substream(cfg.seed, STREAM_INITIAL, t).uniforms(problem.g.n)
               for t in range(cfg.trials)]
    X0 = np.stack(X0_cols, axis=1)

    use_real = (problem.H.is_real() and problem.A.is_real()
                and problem.lam.imag == 0.0)
    Hd = problem.H.to_dense()
    Ad = problem.A.to_dense()
    if use_real:
        Hd = Hd.real.copy()
        Ad = Ad.real.copy()
        lam = problem.lam.real
    else:
        X0 = X0.astype(complex)
        lam = problem.lam

    curves = CurveSet()
    for algo in cfg.algorithms:
        start = time.perf_counter()
        Q = preconditioner_for(algo, problem, cfg.c)
        q = Q.values if Q is not None else None
        ce, nr = _run_batch(algo, Hd, Ad, q, X0, lam, cfg.M)
        curves.series[algo] = (ce, nr)
        elapsed = time.perf_counter() - start
        curves.summary.append(f"{algo}: wall {elapsed:.2f}s")
        curves.summary.append(_communication_summary(algo, problem))
    return curves


def curves_to_csv(curves: CurveSet, algorithms) -> str:
    lines = ["algo,n,ce,nr"]
    for algo in algorithms:
        ce, nr = curves.series[algo]
        for n in range(len(ce)):
            lines.append(f"{algo},{n},{float(ce[n])!r},{float(nr[n])!r}")
    return "\n".join(lines) + "\n"


def cmd_gen(n: int, seed: int, out: str) -> dict:
    """Generate a geometric graph and write the JSON graph file."""
    from .graph import save_graph

    g = random_geometric_graph(n, seed)
    save_graph(g, out)
    mean_degree = 2.0 * g.edge_count() / g.n
    return {"n": g.n, "edges": g.edge_count(), "mean_degree": mean_degree, "out": out}


def cmd_run(cfg: ExperimentConfig) -> dict:
    """Run the experiment, write the CSV (and a timing sidecar), report paths."""
    curves = run_curves(cfg)
    csv_text = curves_to_csv(curves, cfg.algorithms)
    with open(cfg.out, "w") as f:
        f.write(csv_text)
    # wall times vary run to run; they live next to the CSV, not inside it,
    # so identical configs produce byte-identical curve files
    summary_path = cfg.out + ".summary.txt"
    with open(summary_path, "w") as f:
        f.write("\n".join(curves.summary) + "\n")
    return {"out": cfg.out, "summary": summary_path}
