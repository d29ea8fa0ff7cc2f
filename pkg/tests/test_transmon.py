# -*- coding: utf-8 -*-
from conftest import EXFIL_DPU, FFT_APU, SEMAPHORE_DPU, install, read, \
    transfer, write
from pyisea.bus.transfer import BusTransaction, Hresp
from pyisea.bus.transmon import Cause, DataVerdict, SafEntry
from pyisea.policy.core import AccessKind, ApuPolicy, Permission


def txn(master, addr, kind=AccessKind.READ, wdata=None, tid=0):
    return BusTransaction(tid, master, None, addr, addr & 0xFFFFF, kind,
                          wdata, 0, 1)


def test_apu_denial_with_other_owner(guarded_system):
    verdict = guarded_system.transmons[1].on_address_phase(
        txn(2, 0x40020070, AccessKind.WRITE, 0x2))
    assert not verdict.proceed
    assert verdict.cause is Cause.APU_DENY


def test_stray_without_any_owner(system):
    install(system, apu=FFT_APU)
    verdict = system.transmons[1].on_address_phase(txn(2, 0x40020070))
    assert verdict.cause is Cause.STRAY


def test_scoped_write_is_registered_in_saf(guarded_system):
    transmon = guarded_system.transmons[0]
    t = txn(2, 0x2001FFE8, AccessKind.WRITE, 0x0BADBEEF, tid=7)
    verdict = transmon.on_address_phase(t)
    assert verdict.proceed and verdict.dpu_scoped
    assert 7 in transmon.saf
    assert transmon.on_data_phase(transmon.saf[7], t.wdata) \
        is DataVerdict.DENY_DPU
    assert 7 not in transmon.saf


def test_reads_are_never_dpu_scoped(guarded_system):
    verdict = guarded_system.transmons[0].on_address_phase(txn(2, 0x2001FFE8))
    assert verdict.proceed and not verdict.dpu_scoped


def test_privileged_masters_bypass_checks(guarded_system):
    transmon = guarded_system.transmons[0]
    for master in (0x00, 0xFF):
        verdict = transmon.on_address_phase(
            txn(master, 0x2001FFE8, AccessKind.WRITE, 0x0BADBEEF))
        assert verdict.proceed and not verdict.dpu_scoped
    handle = transfer(guarded_system, 0xFF, write(0x2001FFE8, 0x0BADBEEF))
    assert handle.response.ok
    assert guarded_system.peek(0x2001FFE8) == 0x0BADBEEF


def test_data_phase_forwards_other_values(guarded_system):
    t = txn(2, 0x2001FFE8, AccessKind.WRITE, 0x12345678)
    assert guarded_system.transmons[0].on_data_phase(SafEntry(t, 0), t.wdata) \
        is DataVerdict.FORWARD


def test_blocked_transfer_raises_one_interrupt(guarded_system):
    transmon = guarded_system.transmons[1]
    t = txn(2, 0x40020070, AccessKind.WRITE, 0x2)
    response, event, interrupt = transmon.respond_and_report(
        t, transmon.on_address_phase(t), 4)
    assert response.hresp is Hresp.ERROR and response.rdata is None
    assert response.completion_cycle == 4
    assert event.cause is Cause.APU_DENY and event.wdata == 0x2
    assert interrupt.seq == 0 and interrupt.event == event
    assert guarded_system.interrupts.pending == [interrupt]


def test_allowed_transfer_raises_none(guarded_system):
    transmon = guarded_system.transmons[1]
    t = txn(2, 0x40020004)
    response, event, interrupt = transmon.respond_and_report(
        t, transmon.on_address_phase(t), 1)
    assert response.ok and event.cause is Cause.NONE and interrupt is None


def test_dropped_write_leaves_memory_untouched(guarded_system):
    guarded_system.supervisor.load_image([(0x2001FFE8, 0x00C0FFEE)])
    handle = transfer(guarded_system, 2, write(0x2001FFE8, 0x0BADBEEF))
    assert handle.cause is Cause.DPU_DENY
    assert guarded_system.peek(0x2001FFE8) == 0x00C0FFEE


def test_denied_read_returns_no_data(guarded_system):
    guarded_system.supervisor.load_image([(0x40020070, 0x0000CAFE)])
    handle = transfer(guarded_system, 2, read(0x40020070))
    assert handle.response.bus_view() == ("ERROR", None)


def test_latency_does_not_depend_on_verdict(guarded_system):
    allowed_read = transfer(guarded_system, 2, read(0x40020004))
    denied_read = transfer(guarded_system, 2, read(0x40020070))
    stray_read = transfer(guarded_system, 2, read(0x40030000))
    assert allowed_read.service_latency == denied_read.service_latency \
        == stray_read.service_latency == 1
    allowed_write = transfer(guarded_system, 2, write(0x2001FFEC, 0x1))
    denied_write = transfer(guarded_system, 2, write(0x2001FFEC, 0x0BADBEEF))
    assert allowed_write.service_latency == denied_write.service_latency == 2
    assert allowed_write.response.ok and not denied_write.response.ok


def test_semaphore_guard_on_srs(system):
    install(system,
            apu=[ApuPolicy(m, 0x5000009C, 0x3, Permission.READ_WRITE)
                 for m in (1, 2)],
            dpu=[SEMAPHORE_DPU])
    taken = transfer(system, 1, write(0x5000009C, 0x1))
    stolen = transfer(system, 2, write(0x5000009C, 0x10))
    assert taken.response.ok
    assert stolen.cause is Cause.DPU_DENY
    assert system.peek(0x5000009C) == 0x1
    assert transfer(system, 2, write(0x5000009C, 0x11)).response.ok
    assert system.storage[4].registers[39] == 0x11


def test_interrupts_are_numbered_without_gaps(guarded_system):
    for addr in (0x40020070, 0x40030000, 0xF0000000):
        guarded_system.issue(2, read(addr))
    guarded_system.run()
    interrupts = guarded_system.trace.of_kind("INTERRUPT")
    assert [e["seq"] for e in interrupts] == [0, 1, 2]
    assert [e["cause"] for e in interrupts] == ["ApuDeny", "Stray", "Stray"]
    assert guarded_system.supervisor.received == 3
    assert guarded_system.blocked_events == 3


def test_security_lines_only_for_blocked_transfers(guarded_system):
    transfer(guarded_system, 2, read(0x40020004))
    assert not guarded_system.trace.of_kind("SECURITY")
    transfer(guarded_system, 2, write(0x2001FFE8, 0x0BADBEEF))
    security = guarded_system.trace.of_kind("SECURITY")
    assert len(security) == 1
    assert security[0].fields == {"master": 2, "slave": 0,
                                  "addr": 0x2001FFE8, "access": "write",
                                  "cause": "DpuDeny", "wdata": 0x0BADBEEF}


def test_dpu_policy_of_other_master_does_not_scope(system):
    install(system, apu=[ApuPolicy(1, 0x20000000, 0xFFFFF,
                                   Permission.READ_WRITE)],
            dpu=[EXFIL_DPU])
    handle = transfer(system, 1, write(0x2001FFE8, 0x0BADBEEF))
    assert handle.response.ok and handle.service_latency == 1
