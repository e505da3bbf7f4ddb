import json

import numpy as np
import pytest

from vqalab.analytic import second_moment_z_site
from vqalab.experiments import (
    COLUMNS,
    ConfigError,
    ExperimentConfig,
    SpsaSettings,
    format_value,
    input_state,
    rows_to_csv,
    run_experiment,
    spsa_maximize,
    validate_config,
)

BASE_VARIANCE = {
    "experiment": "variance",
    "seed": 9,
    "ansatz": {"kind": "mps", "k": 2, "subcircuit_depth": 2},
    "n_list": [4],
    "observables": ["global0", "local-avg"],
    "samples": 50,
}


def cfg_of(**overrides):
    raw = dict(BASE_VARIANCE)
    raw.update(overrides)
    return ExperimentConfig.from_dict(raw)


def test_config_validation_accepts_base():
    validate_config(BASE_VARIANCE)


def test_config_validation_field_messages():
    bad = dict(BASE_VARIANCE, samples=-3)
    with pytest.raises(ConfigError, match="samples"):
        validate_config(bad)
    with pytest.raises(ConfigError, match="experiment"):
        validate_config({"experiment": "nope", "seed": 1})
    with pytest.raises(ConfigError, match="[Aa]dditional"):
        validate_config(dict(BASE_VARIANCE, bogus_field=1))


def test_config_file_round_trip(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(BASE_VARIANCE))
    cfg = ExperimentConfig.from_file(str(path))
    assert cfg.experiment == "variance"
    bad = tmp_path / "broken.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError, match="JSON"):
        ExperimentConfig.from_file(str(bad))


def test_format_value_round_trip_floats():
    assert format_value(0.1) == "0.1"
    assert format_value(True) == "true"
    assert format_value(None) == ""
    assert format_value(np.float64(1 / 3)) == repr(1 / 3)


def test_variance_rows_and_se():
    rows, columns = run_experiment(cfg_of())
    assert columns == COLUMNS["variance"]
    assert len(rows) == 2 * 3  # two observables x {mean, second_moment, variance}
    for row in rows:
        if row["statistic"] in ("mean", "second_moment"):
            assert row["se"] > 0
        assert 0.0 <= row["value"] <= 1.0


def test_variance_zero_samples_header_only():
    rows, columns = run_experiment(cfg_of(samples=0))
    assert rows == []
    csv = rows_to_csv(rows, columns)
    assert csv == ",".join(columns) + "\n"


def test_variance_determinism_and_threads():
    r1, cols = run_experiment(cfg_of())
    r2, _ = run_experiment(cfg_of())
    assert rows_to_csv(r1, cols) == rows_to_csv(r2, cols)
    r4, _ = run_experiment(cfg_of(), threads=2)
    assert rows_to_csv(r4, cols) == rows_to_csv(r1, cols)
    r3, _ = run_experiment(cfg_of(seed=10))
    assert rows_to_csv(r3, cols) != rows_to_csv(r1, cols)


def test_variance_decomposition_invariant():
    # direct Var(f_local-avg) == (1/4n^2) sum_i (second moment of f_z:i),
    # both sides estimated, within 3 SE, for the product input |0...0>.
    # depth 8: per-site moments need a good per-window design; at depth 4
    # the per-site biases are visible individually (they cancel in the sum)
    n = 5
    raw = dict(
        BASE_VARIANCE,
        ansatz={"kind": "mps", "k": 2, "subcircuit_depth": 8},
        n_list=[n],
        observables=["local-avg"] + [f"z:{i + 1}" for i in range(n)],
        samples=3000,
    )
    rows, _ = run_experiment(ExperimentConfig.from_dict(raw))
    direct = next(
        r for r in rows if r["observable"] == "local-avg" and r["statistic"] == "variance"
    )
    comp_val = 0.0
    comp_se_sq = 0.0
    for i in range(n):
        row = next(
            r
            for r in rows
            if r["observable"] == f"z:{i + 1}" and r["statistic"] == "second_moment"
        )
        comp_val += row["value"] / (4 * n * n)
        comp_se_sq += (row["se"] / (4 * n * n)) ** 2
    tol = 3 * np.sqrt(direct["se"] ** 2 + comp_se_sq)
    assert abs(direct["value"] - comp_val) <= tol
    # and each componentwise second moment sits near its 2-design value
    for i in range(n):
        row = next(
            r
            for r in rows
            if r["observable"] == f"z:{i + 1}" and r["statistic"] == "second_moment"
        )
        assert abs(row["value"] - second_moment_z_site(n, 2, i)) <= 4 * row["se"]


def test_grad_variance_rows():
    raw = {
        "experiment": "grad-variance",
        "seed": 3,
        "ansatz": {"kind": "mps", "k": 2, "subcircuit_depth": 1},
        "n_list": [4],
        "observables": ["global0"],
        "samples": 60,
        "grad_params": 5,
    }
    rows, columns = run_experiment(ExperimentConfig.from_dict(raw))
    assert columns == COLUMNS["grad-variance"]
    per_index = [r for r in rows if r["param_index"] >= 0 and r["statistic"] == "grad_variance"]
    assert len(per_index) == 5
    agg = [r for r in rows if r["param_index"] == -1]
    assert len(agg) == 1
    assert agg[0]["value"] == pytest.approx(np.mean([r["value"] for r in per_index]))


def test_spsa_maximizes_simple_quadratic():
    rng = np.random.default_rng(2)
    target = np.array([0.6, -0.4, 1.1])

    def objective(x):
        return -float(np.sum((x - target) ** 2))

    settings = SpsaSettings(a=0.05, c=0.1, iterations=400, schedule="constant")
    out = spsa_maximize(objective, np.zeros(3), settings, rng)
    assert np.max(np.abs(out - target)) < 0.15


def test_learn_single_iteration_row_count():
    raw = {
        "experiment": "learn",
        "seed": 5,
        "ansatz": {"kind": "mps", "n": 4, "k": 2, "subcircuit_depth": 1},
        "observables": ["local-avg"],
        "spsa": {"iterations": 1, "seeds": 3},
    }
    rows, columns = run_experiment(ExperimentConfig.from_dict(raw))
    assert columns == COLUMNS["learn"]
    assert len(rows) == 3
    assert sorted(r["seed"] for r in rows) == [0, 1, 2]
    assert all(r["iteration"] == 1 for r in rows)
    assert all(0.0 <= r["infidelity"] <= 1.0 for r in rows)


def test_cknorm_identity_ansatz_exact_one():
    raw = {
        "experiment": "cknorm",
        "seed": 7,
        "ansatz": {"kind": "hea", "depth": 0},
        "n_list": [4],
        "observables": ["z:4"],
        "samples": 4,
        "path": "dense",
    }
    rows, _ = run_experiment(ExperimentConfig.from_dict(raw))
    assert rows[0]["value"] == pytest.approx(1.0, abs=1e-12)
    assert rows[0]["se"] == 0.0


def test_cknorm_mps_and_dense_paths_agree():
    base = {
        "experiment": "cknorm",
        "seed": 17,
        "ansatz": {"kind": "mps", "k": 2, "subcircuit_depth": 2},
        "n_list": [5],
        "observables": ["proj0:5"],
        "samples": 6,
    }
    mps_rows, _ = run_experiment(ExperimentConfig.from_dict(dict(base, path="mps")))
    dense_rows, _ = run_experiment(ExperimentConfig.from_dict(dict(base, path="dense")))
    assert mps_rows[0]["value"] == pytest.approx(dense_rows[0]["value"], abs=1e-9)


def test_pauli_dist_rows_and_normalization():
    raw = {
        "experiment": "pauli-dist",
        "seed": 13,
        "ansatz": {"kind": "mps", "k": 2, "subcircuit_depth": 2},
        "n_list": [4],
        "observables": ["proj0:4"],
        "samples": 3,
    }
    rows, columns = run_experiment(ExperimentConfig.from_dict(raw))
    assert columns == COLUMNS["pauli-dist"]
    samples = [r for r in rows if r["statistic"] == "sample"]
    assert len(samples) == 3 * 4  # samples x Z_i family
    assert all(0.0 <= r["probability"] <= 1.0 for r in samples)
    medians = [r for r in rows if r["statistic"] == "median"]
    assert len(medians) == 4
    quartiles = [r for r in rows if r["statistic"] in ("q25", "q75")]
    assert len(quartiles) == 8


def test_input_state_specs():
    rng = np.random.default_rng(0)
    assert abs(input_state("zero", 3, rng).amps[0]) == 1.0
    hea = input_state("random-hea:2", 4, rng)
    assert abs(np.linalg.norm(hea.amps) - 1) < 1e-10
    prod = input_state("product:random", 3, rng)
    assert abs(np.linalg.norm(prod.amps) - 1) < 1e-10
    fixed = input_state("product:" + ",".join(["0", "0"] * 3), 3, rng)
    assert abs(fixed.amps[0] - 1.0) < 1e-12
    with pytest.raises(ConfigError):
        input_state("bogus", 3, rng)
    with pytest.raises(ConfigError):
        input_state("product:1,2,3", 3, rng)


def test_verify_norm_suite_passes():
    raw = {
        "experiment": "verify",
        "seed": 23,
        "suite": "norm",
        "ansatz": {"kind": "mps", "k": 2, "subcircuit_depth": 2},
        "verify": {"n": 4, "pairs": 3, "theta_samples": 6},
    }
    rows, columns = run_experiment(ExperimentConfig.from_dict(raw))
    assert columns == COLUMNS["verify"]
    assert len(rows) == 9
    assert all(r["pass"] for r in rows)


def test_verify_design_suite_passes():
    raw = {
        "experiment": "verify",
        "seed": 29,
        "suite": "design",
        "verify": {"widths": [2], "depths": [4], "trials": 8000},
    }
    rows, _ = run_experiment(ExperimentConfig.from_dict(raw))
    assert len(rows) == 8  # 4 probes x 2 moments
    assert all(r["pass"] for r in rows)


def test_verify_analytic_suite_passes():
    raw = {
        "experiment": "verify",
        "seed": 31,
        "suite": "analytic",
        "verify": {
            "samples": 60000,
            "tuples": 2,
            "global_cases": [[3, 2]],
            "local_cases": [[4, 2]],
        },
    }
    rows, _ = run_experiment(ExperimentConfig.from_dict(raw))
    assert len(rows) == 3
    assert all(r["pass"] for r in rows), rows
