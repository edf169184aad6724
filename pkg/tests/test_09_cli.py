"""
Tests for the command-line interface.

These tests ensure that:
1. Every subcommand runs and writes its JSON document.
2. Exit codes separate passing runs, failed theorems, bad input and internal errors.
"""

import json
import sys
from pathlib import Path
from unittest.mock import patch

import numpy as np
import pytest
from harmonic_bimodules.cli import EXIT_CONFIG, EXIT_INTERNAL, EXIT_OK, EXIT_THEOREM_FAILED
from harmonic_bimodules.cli import main as cli_main
from harmonic_bimodules.exceptions import CrossCheckException
from harmonic_bimodules.models.group import FiniteGroup
from harmonic_bimodules.models.report import ReportBuilder
from harmonic_bimodules.workbench import Workbench

DUMPED = Path(__file__).parent / "dumped_workbenches"


def _run(args):
    with patch.object(sys, "argv", ["harmonic-cli"] + args):
        return cli_main()


def test_groups(capsys) -> None:
    assert _run(["groups"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "S3" in out
    assert "non-abelian" in out
    assert len(out.strip().splitlines()) == 13


def test_groups_respects_cap(capsys) -> None:
    assert _run(["--workbench", str(DUMPED / "small_cap.json"), "groups"]) == EXIT_OK
    assert "Q8" in capsys.readouterr().out


def test_export(tmp_path) -> None:
    out = tmp_path / "q8.json"
    assert _run(["export", "--group", "Q8", "--out", str(out)]) == EXIT_OK
    group = FiniteGroup.load_from_file(out)
    assert group.order == 8
    assert not group.is_abelian()


def test_verify_writes_document(tmp_path, capsys) -> None:
    out = tmp_path / "reports" / "z4.json"
    code = _run(["verify", "--theorem", "main-duality", "--group", "Z4", "--trials", "2", "--seed", "3", "--out", str(out)])
    assert code == EXIT_OK
    document = json.loads(out.read_text(encoding="utf-8"))
    assert set(document) == {"run_config", "workbench", "reports"}
    assert len(document["reports"]) == 2
    assert all(r["pass"] for r in document["reports"])
    assert document["run_config"]["seed"] == 3
    assert "2/2 reports passed." in capsys.readouterr().out


def test_verify_exhaustive(capsys) -> None:
    code = _run(["verify", "--theorem", "je-perp", "--group", "S3", "--ideals", "exhaustive-JE"])
    assert code == EXIT_OK
    assert "12/12 reports passed." in capsys.readouterr().out


def test_verify_multiple_groups(capsys) -> None:
    code = _run(["verify", "--theorem", "inclusion", "--group", "Z3", "--group", "klein4", "--trials", "1", "--jobs", "2"])
    assert code == EXIT_OK
    out = capsys.readouterr().out
    assert "Z3" in out and "klein4" in out


def test_compute_harmonic(tmp_path, capsys) -> None:
    out = tmp_path / "h.json"
    code = _run(["compute", "harmonic", "--group", "Z5", "--measure", "uniform", "--out", str(out)])
    assert code == EXIT_OK
    document = json.loads(out.read_text(encoding="utf-8"))
    assert document["result"]["subspace"]["dim"] == 1
    assert "dim 1" in capsys.readouterr().out


def test_compute_with_ideal_file(tmp_path) -> None:
    ideal = tmp_path / "ideal.json"
    ideal.write_text(json.dumps({"type": "J_E", "s": [1, 1, 0]}), encoding="utf-8")
    out = tmp_path / "ran.json"
    assert _run(["compute", "ran", "--group", "S3", "--ideal", str(ideal), "--out", str(out)]) == EXIT_OK
    document = json.loads(out.read_text(encoding="utf-8"))
    assert document["result"]["ideal"]["dim"] == 2


@pytest.mark.parametrize(
    "args",
    [
        ["verify", "--theorem", "theorem21", "--group", "S3"],
        ["verify", "--group", "nonsense"],
        ["verify", "--group", "S5"],
        ["verify", "--group", "Z4", "--jobs", "0"],
        ["verify", "--group", "Z4", "--ideals", "missing.json"],
        ["compute", "irreps", "--group", "S3", "--group", "Z4"],
        ["--workbench", str(DUMPED / "nonsense_backend.json"), "groups"],
    ],
)
def test_config_errors(args, capsys) -> None:
    assert _run(args) == EXIT_CONFIG
    assert "Invalid configuration" in capsys.readouterr().err


def test_bad_group_file(tmp_path) -> None:
    path = tmp_path / "broken.json"
    path.write_text('{"table": [[0, 0], [1, 0]]}', encoding="utf-8")
    assert _run(["verify", "--theorem", "inclusion", "--group", str(path)]) == EXIT_CONFIG


def test_argparse_errors() -> None:
    with pytest.raises(SystemExit):
        _run(["verify"])
    with pytest.raises(SystemExit):
        _run(["verify", "--group", "Z4", "--theorem", "fermat"])


def test_failed_theorem_exit_code(capsys) -> None:
    failing = ReportBuilder("inclusion", "Z2", {}, 1e-8).check("forced", False).build()
    with patch.object(Workbench, "verify", return_value=[failing]):
        assert _run(["verify", "--group", "Z2"]) == EXIT_THEOREM_FAILED
    assert "0/1 reports passed." in capsys.readouterr().out


def test_internal_error_exit_code(capsys) -> None:
    with patch.object(Workbench, "verify", side_effect=CrossCheckException("kernels disagree")):
        assert _run(["verify", "--group", "Z2"]) == EXIT_INTERNAL
    assert "Internal error" in capsys.readouterr().err


def test_internal_linear_algebra_error(capsys) -> None:
    with patch.object(Workbench, "verify", side_effect=np.linalg.LinAlgError("SVD did not converge")):
        assert _run(["verify", "--group", "Z2"]) == EXIT_INTERNAL
    assert "Internal error" in capsys.readouterr().err


def test_verify_all_on_trivial_group(capsys) -> None:
    assert _run(["verify", "--theorem", "all", "--group", "trivial"]) == EXIT_OK
    assert "reports passed." in capsys.readouterr().out


def test_cross_iso_output_is_reproducible(tmp_path) -> None:
    out = tmp_path / "z4.json"
    args = ["verify", "--theorem", "cross-iso", "--group", "Z4", "--measure", "uniform", "--seed", "7", "--out", str(out)]
    contents = []
    for _ in range(2):
        assert _run(args) == EXIT_OK
        contents.append(out.read_bytes())
    assert contents[0] == contents[1]
    document = json.loads(contents[0])
    assert [r["runtime_ms"] for r in document["reports"]] == [None]
