# -*- coding: utf-8 -*-
import pickle

import pytest

from conftest import read, write
from pyisea.utils import format_hex, load_system_with_pickle, parse_int, \
    save_system_with_pickle


@pytest.mark.parametrize("value, expected", [
    (17, 17), ("17", 17), ("0x11", 17), ("0X4002_0000", 0x40020000),
    (" 0xff ", 255), ("-0x1", -1)])
def test_parse_int(value, expected):
    assert parse_int(value) == expected


@pytest.mark.parametrize("value", [True, "0xZZ", "ten", None, 1.5])
def test_parse_int_rejects(value):
    with pytest.raises(ValueError, match="addr"):
        parse_int(value, "addr")


def test_format_hex():
    assert format_hex(0xBADBEEF) == "0x0BADBEEF"
    assert format_hex(0x3, 2) == "0x03"


def test_snapshot_resumes_identically(guarded_system, tmp_path):
    for master, request in ((2, write(0x2001FFE8, 0x0BADBEEF)),
                            (2, read(0x40020004)),
                            (1, read(0x40020070)),
                            (3, read(0xF0000000))):
        guarded_system.issue(master, request)
    guarded_system.step()
    guarded_system.step()
    path = str(tmp_path / "mid_run.pkl")
    save_system_with_pickle(path, guarded_system)
    resumed = load_system_with_pickle(path)
    guarded_system.run()
    resumed.run()
    assert resumed.cycle == guarded_system.cycle
    assert resumed.trace.to_jsonl() == guarded_system.trace.to_jsonl()
    assert resumed.supervisor.received == guarded_system.supervisor.received


def test_snapshot_needs_pkl_extension(system, tmp_path):
    with pytest.raises(ValueError):
        save_system_with_pickle(str(tmp_path / "snapshot.bin"), system)
    with pytest.raises(ValueError):
        load_system_with_pickle(str(tmp_path / "snapshot.bin"))


def test_snapshot_must_hold_a_system(tmp_path):
    path = tmp_path / "other.pkl"
    path.write_bytes(pickle.dumps({"cycle": 3}))
    with pytest.raises(ValueError, match="not a System"):
        load_system_with_pickle(str(path))
    path.write_bytes(b"")
    with pytest.raises(ValueError, match="not a simulation snapshot"):
        load_system_with_pickle(str(path))
