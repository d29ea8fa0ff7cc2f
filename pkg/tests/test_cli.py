# -*- coding: utf-8 -*-
import json
import os

import pytest

from pyisea.cli import EXIT_FAILED, EXIT_INPUT, EXIT_OK, main
from pyisea.scenario.script import BUNDLED_DIR
from pyisea.version import __version__

APU_BLOCK_POLICIES = os.path.join(BUNDLED_DIR, "apu_block.policies.json")


def test_list(capsys):
    assert main(["list"]) == EXIT_OK
    names = capsys.readouterr().out.split()
    assert "apu_block" in names and "system" not in names


def test_version(capsys):
    with pytest.raises(SystemExit) as info:
        main(["--version"])
    assert info.value.code == 0
    assert __version__ in capsys.readouterr().out


def test_run_writes_trace(tmp_path, capsys):
    trace = tmp_path / "apu_block.jsonl"
    assert main(["run", "apu_block", "--trace", str(trace)]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("scenario apu_block")
    assert "0 failed" in out
    lines = trace.read_text().splitlines()
    assert any('"cause":"ApuDeny"' in line for line in lines)


def test_run_failure_exit_code(capsys):
    assert main(["run", "isolation", "--cycle-limit", "10"]) == EXIT_FAILED
    assert "FAIL quiescent before cycle limit" in capsys.readouterr().out


def test_run_unknown_scenario(capsys):
    assert main(["run", "nope"]) == EXIT_INPUT
    assert "isea-sim: error:" in capsys.readouterr().err


def test_check_policies(capsys):
    assert main(["check-policies", APU_BLOCK_POLICIES]) == EXIT_OK
    out = capsys.readouterr().out
    assert "0 errors" in out
    assert "depends on match mode" in out


def test_check_policies_with_errors(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"apu": [
        {"master": 200, "addr": "0x20000000", "mask": "0xFF",
         "perm": "rw"}]}))
    assert main(["check-policies", str(path)]) == EXIT_FAILED
    assert "1 errors, 0 warnings" in capsys.readouterr().out


def test_compile_policies(tmp_path):
    out = tmp_path / "prs.json"
    assert main(["compile-policies", APU_BLOCK_POLICIES, "-o",
                 str(out)]) == EXIT_OK
    document = json.loads(out.read_text())
    prs = {entry["slave"]: entry for entry in document["prs"]}
    assert len(prs[1]["apu"]) == 3
    assert document["config"]["match_mode"] == "masked"


def test_compile_refuses_invalid_policies(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"apu": [
        {"master": 1, "range": ["0x40000004", "0x40000013"],
         "perm": "rw"}]}))
    assert main(["compile-policies", str(path)]) == EXIT_FAILED
    assert "covering pair" in capsys.readouterr().err


def test_unreadable_inputs(tmp_path):
    assert main(["check-policies", str(tmp_path / "missing.json")]) \
        == EXIT_INPUT
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert main(["check-policies", str(bad)]) == EXIT_INPUT
    assert main(["fuzz", "--n", "10", "--config", str(bad)]) == EXIT_INPUT


def test_fuzz(tmp_path, capsys):
    report = tmp_path / "fuzz.json"
    assert main(["fuzz", "--seed", "3", "--n", "200", "--match-mode",
                 "range", "--report", str(report)]) == EXIT_OK
    printed = json.loads(capsys.readouterr().out)
    assert printed == json.loads(report.read_text())
    assert printed["violations"] == []
    assert printed["counters"]["transactions"] == 200
