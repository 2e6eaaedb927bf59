import json

import pytest

from pfb.cli import main


def test_bench_multilayer(tmp_path, capsys):
    assert main(["bench", "multilayer", "--output", str(tmp_path)]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["passed"] is True
    names = sorted(p.name for p in tmp_path.iterdir())
    for f in ("run.log", "spec.json", "summary.json", "flow_rt0.vtk", "flow_vms.vtk",
              "concentration_rt0.vtk", "series_rt0.csv", "series_vms.csv"):
        assert f in names


def test_unknown_subcommand(capsys):
    assert main(["frobnicate"]) == 2
    assert "invalid choice" in capsys.readouterr().err


def test_check_config(data_dir, capsys):
    assert main(["check", str(data_dir / "multilayer_config.json")]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out == {"valid": True, "name": "multilayer", "formulations": ["rt0"]}


def test_check_reports_config_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"problem": {"benchmark": "multilayer"}, "formulaton": "rt0"}')
    assert main(["check", str(bad)]) == 2
    assert "$.formulaton" in capsys.readouterr().err


def test_run_config(data_dir, tmp_path, capsys):
    assert main(["run", str(data_dir / "multilayer_config.json"), "--output", str(tmp_path)]) == 0
    assert (tmp_path / "series_rt0.csv").exists()
    assert not (tmp_path / "series_vms.csv").exists()


def test_converge_small(tmp_path, capsys):
    code = main(["converge", "rt0", "--levels", "4", "8", "--output", str(tmp_path)])
    out = json.loads(capsys.readouterr().out)
    assert out["formulation"] == "rt0" and len(out["velocity_errors"]) == 2
    assert code in (0, 1)
    assert (tmp_path / "convergence_rt0.json").exists()


def test_help_exits_cleanly(capsys):
    assert main(["--help"]) == 0
