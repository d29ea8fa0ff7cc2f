# -*- coding: utf-8 -*-
import pytest

from conftest import EXFIL_DPU, install, read, transfer, write
from pyisea.bus.transmon import Cause, InterruptRecord, SecurityEvent
from pyisea.config import SystemConfig
from pyisea.exceptions import CapacityError, ImageFormatError, \
    PrivilegeError
from pyisea.memory.ecc import EccMode
from pyisea.memory.image import read_image_file
from pyisea.policy.core import AccessKind, ApuPolicy, Permission, \
    PolicyRegisterSpace
from pyisea.supervisor import IsolateMaster, ViolationLedger
from pyisea.system import System

RW = Permission.READ_WRITE
M3_REGION = ApuPolicy(3, 0x40000000, 0xFF, RW)
M4_REGION = ApuPolicy(4, 0x40001000, 0xFF, RW)


def event(master, cause=Cause.APU_DENY):
    return SecurityEvent(0, master, 1, 0x40000000, AccessKind.READ, cause)


def test_ledger_counts_blameable_causes_only():
    ledger = ViolationLedger(3)
    assert ledger.record(5, Cause.APU_DENY) == 1
    assert ledger.record(5, Cause.ECC_FAULT) == 1
    assert ledger.record(5, Cause.STRAY) == 2
    assert ledger.as_dict() == {5: {"ApuDeny": 1, "EccFault": 1,
                                    "Stray": 1}}
    ledger.reset()
    assert ledger.blocked(5) == 0


def test_threshold_triggers_one_isolation(system):
    actions = [system.supervisor.on_interrupt(InterruptRecord(i, event(3)))
               for i in range(4)]
    assert actions == [[], [], [IsolateMaster(3)], [IsolateMaster(3)]]
    system.supervisor.isolate_master(3)
    assert system.supervisor.on_interrupt(
        InterruptRecord(4, event(3))) == []


def test_interrupt_sequence_must_be_gapless(system):
    system.supervisor.on_interrupt(InterruptRecord(0, event(3)))
    with pytest.raises(AssertionError):
        system.supervisor.on_interrupt(InterruptRecord(2, event(3)))


def test_privileged_masters_are_never_booked(system):
    handle = transfer(system, 0xFF, read(0xF0000000))
    assert handle.cause is Cause.STRAY
    assert system.supervisor.received == 1
    assert system.supervisor.ledger.as_dict() == {}
    with pytest.raises(PrivilegeError):
        system.supervisor.isolate_master(0xFF)
    with pytest.raises(PrivilegeError):
        system.supervisor.isolate_master(0x00)


def test_repeat_offender_is_isolated(system):
    install(system, apu=[M3_REGION, M4_REGION])
    causes = [transfer(system, 3, read(addr)).cause
              for addr in (0x40001000, 0x40001004, 0x40001008, 0x40000000)]
    assert causes == [Cause.APU_DENY] * 3 + [Cause.STRAY]
    assert system.supervisor.isolated == {3}
    assert system.transmons[1].prs.apu_policies == (M4_REGION,)
    assert transfer(system, 4, write(0x40001000, 0x44)).response.ok
    isolate = [e for e in system.trace.of_kind("SUPERVISOR")
               if e["action"] == "ISOLATE"]
    assert len(isolate) == 1 and isolate[0]["master"] == 3


def test_zero_threshold_never_isolates():
    system = System(SystemConfig(isolation_threshold=0))
    install(system, apu=[M3_REGION])
    for _ in range(5):
        transfer(system, 3, read(0x40001000))
    assert not system.supervisor.isolated
    assert transfer(system, 3, read(0x40000000)).response.ok


def test_isolation_keeps_dpu_policies(system):
    install(system, apu=[ApuPolicy(2, 0x20000000, 0xFFF, RW)],
            dpu=[EXFIL_DPU])
    system.supervisor.isolate_master(2)
    assert system.transmons[0].prs.apu_policies == ()
    assert system.transmons[0].prs.dpu_policies == (EXFIL_DPU,)


def test_reinstall_keeps_isolated_master_out(system):
    install(system, apu=[M3_REGION, M4_REGION])
    for addr in (0x40001000, 0x40001004, 0x40001008):
        transfer(system, 3, read(addr))
    assert system.supervisor.isolated == {3}
    install(system, apu=[M3_REGION, M4_REGION])
    assert system.transmons[1].prs.apu_policies == (M4_REGION,)
    assert transfer(system, 3, read(0x40000000)).cause is Cause.STRAY
    system.supervisor.teardown_epoch([])
    install(system, apu=[M3_REGION, M4_REGION])
    assert transfer(system, 3, read(0x40000000)).response.ok


def many(count, master=1, base=0x40000000):
    return [ApuPolicy(master, base + 0x100 * i, 0xFF, RW)
            for i in range(count)]


@pytest.mark.parametrize("capacity", [16, 32, 64, 128])
def test_install_up_to_capacity(capacity):
    system = System(SystemConfig(apu_capacity=capacity,
                                 dpu_capacity=capacity))
    system.install_policies({1: PolicyRegisterSpace(
        many(capacity), apu_capacity=capacity)})
    assert len(system.transmons[1].prs.apu_policies) == capacity


@pytest.mark.parametrize("capacity", [16, 32, 64, 128])
def test_install_beyond_capacity_is_atomic(capacity):
    system = System(SystemConfig(apu_capacity=capacity,
                                 dpu_capacity=capacity))
    before = PolicyRegisterSpace(many(1, master=2, base=0x20000000),
                                 apu_capacity=capacity)
    system.install_policies({0: before})
    with pytest.raises(CapacityError) as info:
        system.install_policies({
            0: PolicyRegisterSpace(apu_capacity=capacity),
            1: PolicyRegisterSpace(many(capacity + 1), apu_capacity=256)})
    assert info.value.slave == 1
    assert info.value.count == capacity + 1
    assert system.transmons[0].prs.apu_policies == before.apu_policies
    assert system.transmons[1].prs.apu_policies == ()


def test_install_on_unknown_slave(system):
    with pytest.raises(ValueError):
        system.install_policies({9: PolicyRegisterSpace()})


def test_load_image_from_file(system, tmp_path):
    path = tmp_path / "input.img"
    path.write_text("40000000: DEADBEEF\n40000004: 00000001\n")
    assert system.supervisor.load_image(str(path)) == []
    assert system.peek(0x40000000) == 0xDEADBEEF
    assert system.peek(0x40000004) == 0x1
    assert system.trace.of_kind("SUPERVISOR")[-1]["action"] == "LOAD_IMAGE"


def test_malformed_image_writes_nothing(system, tmp_path):
    path = tmp_path / "bad.img"
    path.write_text("40000000: DEADBEEF\n40000004 00000001\n")
    with pytest.raises(ImageFormatError):
        system.supervisor.load_image(str(path))
    assert system.peek(0x40000000) == 0
    assert system.cycle == 0


def test_unmapped_image_words_are_reported(system):
    failed = system.supervisor.load_image([(0x40000000, 0x1),
                                           (0xF0000000, 0x2)])
    assert failed == [0xF0000000]


def test_dump_results(system, tmp_path):
    system.supervisor.load_image([(0x60000000, 0x40000000),
                                  (0x60000008, 0x3)])
    path = str(tmp_path / "dump.img")
    report = system.supervisor.dump_results([(0x60000000, 0x10)], path)
    assert report.ok
    assert report.words == [(0x60000000, 0x40000000), (0x60000004, 0x0),
                            (0x60000008, 0x3), (0x6000000C, 0x0)]
    assert read_image_file(path) == report.words


def test_dump_lists_tainted_granules():
    system = System(SystemConfig(ecc_enabled=True,
                                 ecc_mode=EccMode.DETECT_DOUBLE))
    system.supervisor.load_image([(0x20000044, 0x7)])
    system.inject_fault(0, 0x44, [5])
    report = system.supervisor.dump_results([(0x20000000, 0x80)])
    assert report.unreadable == [0x20000040]
    # 0x40 is read before 0x44 faults; the rest of the granule is poisoned
    assert len(report.words) == 0x40 // 4 + 1
    assert report.words[-1] == (0x20000040, 0x0)


def test_application_epoch_lifecycle(system):
    install(system, apu=[M3_REGION])
    assert system.supervisor.load_image([(0x40000000, 0xABCD)]) == []
    assert transfer(system, 3, read(0x40000000)).response.rdata == 0xABCD
    assert transfer(system, 3, write(0x40000004, 0x1234)).response.ok
    transfer(system, 3, read(0x40001000))
    report = system.supervisor.dump_results([(0x40000000, 0x8)])
    assert report.words == [(0x40000000, 0xABCD), (0x40000004, 0x1234)]

    cycle, grants = system.cycle, len(system.trace.of_kind("GRANT"))
    system.supervisor.teardown_epoch([(0x40000000, 0x100)])
    assert system.supervisor.epoch == 1
    # zeroed out of band
    assert system.cycle == cycle
    assert len(system.trace.of_kind("GRANT")) == grants
    assert system.supervisor.ledger.as_dict() == {}
    assert all(not t.prs.apu_policies and not t.prs.dpu_policies
               for t in system.transmons.values())
    assert not system.read_region(0x40000000, 0x100).any()

    # next epoch: a new owner finds nothing of the old application
    install(system, apu=[M4_REGION, ApuPolicy(4, 0x40000000, 0xFF, RW)])
    assert transfer(system, 4, read(0x40000000)).response.rdata == 0
    assert transfer(system, 3, read(0x40000000)).cause is Cause.APU_DENY
    actions = [e["action"] for e in system.trace.of_kind("SUPERVISOR")]
    assert actions == ["INSTALL", "LOAD_IMAGE", "DUMP", "TEARDOWN",
                       "INSTALL"]
