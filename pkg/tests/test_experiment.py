import csv
import json

import numpy as np
import pytest

from sdneig import matrices as mat
from sdneig.cli import main as cli_main
from sdneig.errors import InvalidParameterError
from sdneig.experiment import (
    ALGORITHMS,
    ExperimentConfig,
    build_problem,
    cmd_run,
    curves_to_csv,
    run_curves,
)
from sdneig.rng import STREAM_INITIAL, substream


def small_config(**overrides):
    base = dict(
        graph={"n": 24, "seed": 1},
        filter={"kind": "spline", "m": 2},
        eigenvalue={"extremal": "max", "value": 1.0},
        algorithms=["spgda", "power"],
        c=0.01,
        M=20,
        trials=2,
        seed=5,
        out="curves.csv",
    )
    base.update(overrides)
    return ExperimentConfig(**base)


def test_config_validation():
    with pytest.raises(InvalidParameterError):
        small_config(c=0.0)
    with pytest.raises(InvalidParameterError):
        small_config(M=0)
    with pytest.raises(InvalidParameterError):
        small_config(trials=0)
    with pytest.raises(InvalidParameterError):
        small_config(algorithms=[])
    with pytest.raises(InvalidParameterError):
        small_config(algorithms=["nonsense"])


def test_config_from_json_defaults():
    cfg = ExperimentConfig.from_json(
        {"graph": {"n": 8, "seed": 0}, "filter": {"kind": "laplacian"},
         "algorithms": ["pgda"], "M": 3}
    )
    assert cfg.c == 0.01
    assert cfg.trials == 50
    assert cfg.eigenvalue == {"extremal": "max", "value": 1.0}
    with pytest.raises(InvalidParameterError):
        ExperimentConfig.from_json({"algorithms": ["pgda"], "M": 3})


def test_build_problem_spline_shift():
    cfg = small_config()
    problem = build_problem(cfg)
    # extremal max at 1 gives A = I - H, PSD
    expect = np.eye(problem.g.n) - mat.spline_filter(problem.g, 2).to_dense()
    assert np.allclose(problem.A.to_dense(), expect)
    assert problem.f_A is not None
    assert np.allclose(mat.poly_to_matrix(problem.f_A).to_dense(), expect)


def test_spgda_curve_matches_hand_computation():
    cfg = small_config(algorithms=["spgda"], M=12, trials=2)
    curves = run_curves(cfg)
    ce, nr = curves.series["spgda"]
    problem = build_problem(cfg)
    Ad = problem.A.to_dense().real
    q = mat.make_Qc_sym(problem.A, cfg.c).values
    B = np.eye(problem.g.n) - Ad / q[:, None]
    nr_expect = np.zeros(cfg.M + 1)
    ce_expect = np.zeros(cfg.M + 1)
    for t in range(cfg.trials):
        x = substream(cfg.seed, STREAM_INITIAL, t).uniforms(problem.g.n)
        u = np.linalg.matrix_power(B, 4 * cfg.M) @ x
        ut = u / np.linalg.norm(u)
        for n in range(cfg.M + 1):
            xt = x / np.linalg.norm(x)
            nr_expect[n] += np.log10(np.linalg.norm(Ad @ xt)) / cfg.trials
            z = np.vdot(ut, xt)
            aligned = (z / abs(z)) * ut
            ce_expect[n] += np.log10(np.linalg.norm(xt - aligned)) / cfg.trials
            x = B @ x
    assert np.max(np.abs(nr - nr_expect)) <= 1e-9
    assert np.max(np.abs(ce - ce_expect)) <= 1e-9


def test_csv_schema_and_float_round_trip(tmp_path):
    cfg = small_config(out=str(tmp_path / "c.csv"), M=5)
    cmd_run(cfg)
    with open(cfg.out) as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["algo", "n", "ce", "nr"]
    assert len(rows) == 1 + len(cfg.algorithms) * (cfg.M + 1)
    for algo, n, ce, nr in rows[1:]:
        assert algo in ALGORITHMS
        assert 0 <= int(n) <= cfg.M
        float(ce), float(nr)  # repr round-trips as finite floats here
    # the wall-clock summary lives in a sidecar, not in the CSV
    assert "wall" in open(cfg.out + ".summary.txt").read()


def test_run_deterministic_across_repeats(tmp_path):
    a = small_config(out=str(tmp_path / "a.csv"), M=8)
    b = small_config(out=str(tmp_path / "b.csv"), M=8)
    cmd_run(a)
    cmd_run(b)
    assert open(a.out, "rb").read() == open(b.out, "rb").read()


def test_single_trial_minimal_run():
    cfg = small_config(trials=1, M=1, algorithms=list(ALGORITHMS))
    curves = run_curves(cfg)
    for algo in ALGORITHMS:
        ce, nr = curves.series[algo]
        assert len(ce) == 2 and len(nr) == 2
        assert np.all(np.isfinite(nr))


def test_all_algorithms_reduce_residual():
    cfg = small_config(algorithms=list(ALGORITHMS), M=400, trials=2)
    curves = run_curves(cfg)
    for algo in ALGORITHMS:
        _, nr = curves.series[algo]
        assert nr[-1] < nr[0], algo


def test_curves_to_csv_header_exact():
    cfg = small_config(M=2)
    curves = run_curves(cfg)
    text = curves_to_csv(curves, cfg.algorithms)
    assert text.splitlines()[0] == "algo,n,ce,nr"


def test_cli_gen_run_check(tmp_path):
    gpath = str(tmp_path / "g.json")
    assert cli_main(["gen", "--n", "30", "--seed", "4", "--out", gpath]) == 0
    cfg_path = str(tmp_path / "cfg.json")
    out_path = str(tmp_path / "out.csv")
    with open(cfg_path, "w") as f:
        json.dump({"graph": {"file": gpath}, "filter": {"kind": "spline", "m": 2},
                   "algorithms": ["spgda"], "M": 5, "trials": 2, "seed": 0,
                   "out": out_path}, f)
    assert cli_main(["run", "--config", cfg_path]) == 0
    with open(out_path) as f:
        assert f.readline().strip() == "algo,n,ce,nr"
    assert cli_main(["check", "--suite", "alg4", "--seed", "1"]) == 0


def test_cli_validation_exit_codes(tmp_path):
    assert cli_main(["check", "--suite", "bogus"]) == 1
    assert cli_main(["run", "--config", str(tmp_path / "missing.json")]) == 1
    bad = str(tmp_path / "bad.json")
    with open(bad, "w") as f:
        json.dump({"graph": {"n": 8, "seed": 0}, "filter": {"kind": "spline", "m": 2},
                   "algorithms": ["warp-drive"], "M": 5}, f)
    assert cli_main(["run", "--config", bad]) == 1


def test_cli_trials_and_out_override(tmp_path):
    cfg_path = str(tmp_path / "cfg.json")
    with open(cfg_path, "w") as f:
        json.dump({"graph": {"n": 16, "seed": 0}, "filter": {"kind": "laplacian"},
                   "eigenvalue": {"value": 0.0}, "algorithms": ["pgda"],
                   "M": 4, "trials": 9, "seed": 0, "out": str(tmp_path / "x.csv")}, f)
    out2 = str(tmp_path / "y.csv")
    assert cli_main(["run", "--config", cfg_path, "--trials", "2", "--out", out2]) == 0
    with open(out2) as f:
        rows = list(csv.reader(f))
    assert len(rows) == 1 + 5  # header + M+1 rows for the single algorithm
