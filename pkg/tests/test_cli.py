import json

import numpy as np
import pytest

from blocksweep.harness import csvio
from blocksweep.harness.cli import main


@pytest.fixture
def tiny_config_path(tmp_path):
    raw = {
        "problem": {
            "kind": "diagonal_affine",
            "gains": [0.5, -0.25],
            "offsets": [[1.0], [-2.0]],
        },
        "sweeping": {"kind": "uniform"},
        "schedules": {
            "relaxation": {"kind": "constant", "value": 1.0},
            "error_budget": {"kind": "constant", "value": 0.0},
        },
        "errors": {"kind": "none"},
        "experiment": {
            "horizon": 6,
            "runs": 40,
            "seed": 5,
            "weights": "inverse_marginals",
            "x0": {"kind": "explicit", "blocks": [[3.0], [1.0]]},
        },
    }
    path = tmp_path / "tiny.json"
    path.write_text(json.dumps(raw))
    return path


def test_run_writes_estimate_trajectory_and_figure(tiny_config_path, tmp_path, capsys):
    out = tmp_path / "out"
    code = main(["run", "--config", str(tiny_config_path), "--out", str(out)])
    assert code == 0
    assert (out / "estimate.csv").exists()
    assert (out / "trajectory.csv").exists()
    assert (out / "run.svg").stat().st_size > 0
    cols = csvio.read_columns(out / "estimate.csv")
    assert cols["n"].size == 7


def test_bound_subcommand(tiny_config_path, tmp_path):
    out = tmp_path / "out"
    code = main(["bound", "--config", str(tiny_config_path), "--out", str(out)])
    assert code == 0
    cols = csvio.read_columns(out / "bound.csv")
    assert set(cols) == {"n", "chi_n", "eta_bar_n", "vartheta_bar_n", "bound"}
    assert (out / "bound.svg").stat().st_size > 0


def test_check_passes_on_valid_config(tiny_config_path, tmp_path, capsys):
    out = tmp_path / "out"
    code = main(["check", "--config", str(tiny_config_path), "--out", str(out)])
    assert code == 0
    assert "dominance PASS" in capsys.readouterr().out
    assert (out / "check.csv").exists()
    assert (out / "check.svg").exists()


def test_check_exit_code_one_on_failure(tiny_config_path, tmp_path, monkeypatch):
    import blocksweep.harness.cli as cli_mod

    real = cli_mod.check_dominance

    def corrupted(estimate, bound, slack=3.0):
        report = real(estimate, bound, slack=slack)
        object.__setattr__(report, "passed", False)
        return report

    monkeypatch.setattr(cli_mod, "check_dominance", corrupted)
    code = main(["check", "--config", str(tiny_config_path), "--out", str(tmp_path / "o")])
    assert code == 1


def test_oracle_subcommand(tiny_config_path, tmp_path):
    out = tmp_path / "out"
    code = main(["oracle", "--config", str(tiny_config_path), "--out", str(out),
                 "--horizon", "4"])
    assert code == 0
    cols = csvio.read_columns(out / "oracle.csv")
    assert np.all(cols["se_sq_error"] == 0.0)


def test_figure1_subcommand(tmp_path):
    out = tmp_path / "out"
    code = main(["figure1", "--out", str(out), "--chi", "0.2,0.6", "--pcount", "25"])
    assert code == 0
    cols = csvio.read_columns(out / "figure1.csv")
    assert set(np.unique(cols["chi"])) == {0.2, 0.6}
    assert (out / "figure1.svg").stat().st_size > 0


def test_ratefit_subcommand(tiny_config_path, tmp_path, capsys):
    out = tmp_path / "out"
    code = main(["ratefit", "--config", str(tiny_config_path), "--out", str(out),
                 "--horizon", "60", "--window", "5:50"])
    assert code == 0
    assert "fitted per-iteration ratio" in capsys.readouterr().out
    assert (out / "ratefit.csv").exists()
    assert (out / "ratefit.svg").exists()


def test_config_errors_exit_two(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"problem": {}, "extra": 1}))
    assert main(["run", "--config", str(bad), "--out", str(tmp_path / "o")]) == 2
    missing = tmp_path / "missing.json"
    assert main(["run", "--config", str(missing), "--out", str(tmp_path / "o")]) == 2


def test_certification_errors_exit_two(tmp_path):
    # perturbation budget without a summability certificate fails at bound time
    config = {
        "problem": {"kind": "diagonal_affine", "gains": [0.5], "offsets": [[1.0]]},
        "sweeping": {"kind": "all_blocks"},
        "schedules": {
            "relaxation": {"kind": "constant", "value": 1.0},
            "error_budget": {"kind": "constant", "value": 0.5},
        },
        "errors": {"kind": "ball"},
        "experiment": {
            "horizon": 5, "runs": 3, "seed": 1,
            "weights": "inverse_marginals",
            "x0": {"kind": "explicit", "blocks": [[2.0]]},
        },
    }
    path = tmp_path / "c.json"
    path.write_text(json.dumps(config))
    assert main(["bound", "--config", str(path), "--out", str(tmp_path / "o")]) == 2


def test_benchmark_configs_run_through_cli(config_dir, tmp_path):
    code = main(["oracle", "--config", str(config_dir / "exact2.json"),
                 "--out", str(tmp_path / "o")])
    assert code == 0
