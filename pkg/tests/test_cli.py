import json

from vqalab import cli


def write_cfg(tmp_path, payload, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


VARIANCE_CFG = {
    "experiment": "variance",
    "seed": 4,
    "ansatz": {"kind": "mps", "k": 2, "subcircuit_depth": 1},
    "n_list": [3],
    "observables": ["global0"],
    "samples": 20,
}


def test_cli_variance_end_to_end(tmp_path):
    cfg = write_cfg(tmp_path, VARIANCE_CFG)
    out = tmp_path / "out.csv"
    assert cli.main(["variance", "--config", cfg, "--out", str(out)]) == 0
    text = out.read_text(encoding="utf-8")
    lines = text.split("\n")
    assert lines[0] == "experiment,n,k,observable,statistic,value,se,samples,seed"
    assert len(lines) == 1 + 3 + 1  # header + rows + trailing newline
    assert text.endswith("\n") and "\r" not in text


def test_cli_byte_identical_reruns(tmp_path):
    cfg = write_cfg(tmp_path, VARIANCE_CFG)
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(["variance", "--config", cfg, "--out", str(out1)]) == 0
    assert cli.main(["variance", "--config", cfg, "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_cli_seed_override_changes_output(tmp_path):
    cfg = write_cfg(tmp_path, VARIANCE_CFG)
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    cli.main(["variance", "--config", cfg, "--out", str(out1)])
    cli.main(["variance", "--config", cfg, "--out", str(out2), "--seed", "99"])
    assert out1.read_bytes() != out2.read_bytes()


def test_cli_config_error_exit_code(tmp_path, capsys):
    cfg = write_cfg(tmp_path, dict(VARIANCE_CFG, samples=-1))
    assert cli.main(["variance", "--config", cfg, "--out", str(tmp_path / "x.csv")]) == 1
    assert "samples" in capsys.readouterr().err


def test_cli_missing_config_exit_code(tmp_path):
    assert (
        cli.main(["variance", "--config", str(tmp_path / "nope.json"), "--out", "x.csv"]) == 1
    )


def test_cli_subcommand_mismatch(tmp_path, capsys):
    cfg = write_cfg(tmp_path, VARIANCE_CFG)
    assert cli.main(["learn", "--config", cfg, "--out", str(tmp_path / "x.csv")]) == 1
    assert "does not match" in capsys.readouterr().err


def test_cli_verify_pass_exit_zero(tmp_path):
    cfg = write_cfg(
        tmp_path,
        {
            "experiment": "verify",
            "seed": 2,
            "suite": "norm",
            "ansatz": {"kind": "mps", "k": 2, "subcircuit_depth": 1},
            "verify": {"n": 3, "pairs": 2, "theta_samples": 5},
        },
    )
    out = tmp_path / "verify.csv"
    assert cli.main(["verify", "--config", cfg, "--out", str(out)]) == 0
    assert out.read_text().startswith("suite,test_id,")


def test_cli_verify_failure_exit_two(tmp_path, monkeypatch, capsys):
    from vqalab import experiments

    def fake_run(cfg, threads=1):
        rows = [{"suite": "norm", "test_id": "t", "pass": False}]
        return rows, experiments.COLUMNS["verify"]

    monkeypatch.setattr(cli, "run_experiment", fake_run)
    cfg = write_cfg(
        tmp_path,
        {"experiment": "verify", "seed": 2, "suite": "norm"},
    )
    assert cli.main(["verify", "--config", cfg, "--out", str(tmp_path / "v.csv")]) == 2
    assert "failed" in capsys.readouterr().err


def test_cli_threads_flag_deterministic(tmp_path):
    cfg = write_cfg(tmp_path, dict(VARIANCE_CFG, n_list=[3, 4]))
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    cli.main(["variance", "--config", cfg, "--out", str(out1), "--threads", "1"])
    cli.main(["variance", "--config", cfg, "--out", str(out2), "--threads", "2"])
    assert out1.read_bytes() == out2.read_bytes()
