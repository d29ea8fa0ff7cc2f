# -*- coding: utf-8 -*-
"""
Author: PyISEA Team
================================
Cycle-stepped AHB-Lite-style interconnect.

Every master sits behind a bus interface (BI) that stamps its hard-coded ID on
outgoing transfers. Each slave has its own round-robin arbiter, so the fabric
behaves as a crossbar: masters targeting different slaves never stall each
other.

Timing of a transfer granted at cycle c:

    c       address phase, APU check
    c + 1   data phase; completion unless DPU-scoped
    c + 2   completion of a DPU-scoped write (held in the SAF)

The hold stretches only the scoped write itself. The slave keeps granting
address phases; the held write is released at the start of c + 2, before the
data phase of the transfer granted at c + 1, so that transfer sees the write.

A decode miss is answered by a default slave with the same timing as an APU
denial.
"""
import logging
from collections import deque
from dataclasses import dataclass
from typing import Deque, Dict, Iterable, List, Optional, Tuple

from pyisea.bus.transfer import BusRequest, BusResponse, BusTransaction, \
    PendingTransfer
from pyisea.bus.transmon import AddressVerdict, Cause, DataVerdict, \
    InterruptLine, Report, SafEntry, SecurityEvent, Transmon, complete
from pyisea.config import MemoryMap, SystemConfig
from pyisea.trace import Trace

logger = logging.getLogger(__name__)

WORD_ALIGN = ~0x3 & 0xFFFFFFFF


def decode(addr: int, memory_map: MemoryMap) -> Optional[Tuple[int, int]]:
    """
    HSEL decode.

    Args:
        addr (int): HADDR.
        memory_map (MemoryMap): System memory map.

    Returns:
        Tuple[int, int]: (slave id, offset within the slave), or None on a
            decode miss.
    """
    region = memory_map.region_for(addr)
    if region is None:
        return None
    return region.slave_id, addr - region.base


def arbitrate(candidates: Iterable[int], last_grant: int,
              privileged: Iterable[int] = ()) -> Optional[int]:
    """
    Picks the master granted a slave's address phase this cycle.

    Privileged masters win outright, lowest ID first. Everyone else is served
    round-robin: the lowest ID above `last_grant`, wrapping around.

    Args:
        candidates (Iterable[int]): Masters with a pending address phase.
        last_grant (int): Last non-privileged master granted this slave.
        privileged (Iterable[int], optional): Privileged master IDs.

    Returns:
        int: Granted master, None when nobody is pending.
    """
    pending = sorted(set(candidates))
    if not pending:
        return None
    privileged = set(privileged)
    first = [m for m in pending if m in privileged]
    if first:
        return first[0]
    later = [m for m in pending if m > last_grant]
    return later[0] if later else pending[0]


class BusInterface:
    """
    Port of one master. Holds the master's queue of requests and lets one of
    them onto the bus at a time; whatever ID the script claims, the fabric only
    ever sees `master_id`.
    """

    def __init__(self, master_id: int):
        self.master_id = master_id
        self.queue: Deque[PendingTransfer] = deque()
        self.in_flight: Optional[PendingTransfer] = None
        self.ready_cycle = 0
        self.responses: List[BusResponse] = []
        self.issued = 0

    def issue(self, request: BusRequest) -> PendingTransfer:
        pending = PendingTransfer(self.master_id, request, self.issued)
        self.issued += 1
        self.queue.append(pending)
        return pending

    @property
    def idle(self) -> bool:
        return self.in_flight is None and not self.queue

    def head(self, cycle: int) -> Optional[PendingTransfer]:
        """The request allowed to start an address phase at `cycle`."""
        if self.in_flight is not None or not self.queue:
            return None
        pending = self.queue[0]
        if max(pending.request.issue_cycle, self.ready_cycle) > cycle:
            return None
        if pending.eligible_cycle is None:
            pending.eligible_cycle = cycle
        return pending


@dataclass
class _Stage:
    """In-flight state of one slave's pipeline."""
    data: Optional[Tuple[PendingTransfer, AddressVerdict]] = None
    held: Optional[Tuple[PendingTransfer, DataVerdict]] = None
    last_grant: int = -1


class BusFabric:
    """
    The interconnect: bus interfaces, decoders, per-slave arbiters and the
    TRANSMONs attached to every slave.

    Args:
        config (SystemConfig): System configuration.
        transmons (Dict[int, Transmon]): TRANSMON per slave id.
        interrupts (InterruptLine): Interrupt path to PROC-0.
        trace (Trace): Run trace.
    """

    def __init__(self, config: SystemConfig, transmons: Dict[int, Transmon],
                 interrupts: InterruptLine, trace: Trace):
        self.config = config
        self.transmons = transmons
        self.interrupts = interrupts
        self.trace = trace
        self.cycle = 0
        self.next_tid = 0
        self.ports = {m: BusInterface(m) for m in config.all_master_ids}
        self.stages = {sid: _Stage() for sid in sorted(transmons)}
        self.misses: List[PendingTransfer] = []
        self.completed = 0

    def port(self, master: int) -> BusInterface:
        try:
            return self.ports[master]
        except KeyError:
            raise ValueError(f"no bus interface for master {master:#x}") \
                from None

    def issue(self, master: int, request: BusRequest) -> PendingTransfer:
        return self.port(master).issue(request)

    @property
    def busy(self) -> bool:
        if self.misses:
            return True
        if any(s.data is not None or s.held is not None
               for s in self.stages.values()):
            return True
        return not all(port.idle for port in self.ports.values())

    def step(self) -> List[SecurityEvent]:
        """
        Advances one clock cycle.

        Returns:
            List[SecurityEvent]: One event per transfer completed this cycle.
        """
        cycle = self.cycle
        events = []
        for sid, stage in self.stages.items():
            if stage.held is not None:
                pending, verdict = stage.held
                stage.held = None
                events.append(self._finish(pending, verdict, cycle))
        for sid, stage in self.stages.items():
            if stage.data is not None:
                events.extend(self._data_phase(sid, stage, cycle))
        misses, self.misses = self.misses, []
        for pending in misses:
            txn = pending.transaction
            self._trace_data(txn, cycle)
            events.append(self._deliver(pending, complete(
                txn, Cause.STRAY, None, cycle, self.interrupts)))
        self._address_phase(cycle)
        self.cycle += 1
        return events

    def _data_phase(self, sid: int, stage: _Stage, cycle: int):
        pending, verdict = stage.data
        stage.data = None
        txn = pending.transaction
        self._trace_data(txn, cycle)
        if verdict.proceed and verdict.dpu_scoped:
            transmon = self.transmons[sid]
            entry = transmon.saf.get(txn.tid, SafEntry(txn, cycle))
            stage.held = (pending, transmon.on_data_phase(entry, txn.wdata))
            return []
        return [self._finish(pending, verdict, cycle)]

    def _address_phase(self, cycle: int) -> None:
        wanted: Dict[int, List[PendingTransfer]] = {}
        for master in sorted(self.ports):
            pending = self.ports[master].head(cycle)
            if pending is None:
                continue
            target = decode(pending.request.addr & WORD_ALIGN,
                            self.config.memory_map)
            if target is None:
                self._grant(pending, None, 0, cycle)
                self.misses.append(pending)
                continue
            wanted.setdefault(target[0], []).append(pending)
        for sid in sorted(wanted):
            stage = self.stages[sid]
            by_master = {p.port: p for p in wanted[sid]}
            master = arbitrate(by_master, stage.last_grant,
                               self.config.privileged_ids)
            if not self.config.is_privileged(master):
                stage.last_grant = master
            pending = by_master[master]
            addr = pending.request.addr & WORD_ALIGN
            offset = addr - self.config.memory_map.region(sid).base
            txn = self._grant(pending, sid, offset, cycle)
            stage.data = (pending, self.transmons[sid].on_address_phase(txn))

    def _grant(self, pending: PendingTransfer, sid: Optional[int],
               offset: int, cycle: int) -> BusTransaction:
        port = self.ports[pending.port]
        port.queue.popleft()
        port.in_flight = pending
        request = pending.request
        txn = BusTransaction(self.next_tid, port.master_id, sid,
                             request.addr & WORD_ALIGN, offset, request.kind,
                             request.wdata, cycle, cycle + 1)
        self.next_tid += 1
        pending.transaction = txn
        claimed = request.requested_master_field
        logger.debug("cycle %d: master %d granted slave %s", cycle,
                     txn.master, sid)
        self.trace.emit(cycle, "GRANT", master=txn.master, slave=sid)
        self.trace.emit(cycle, "ADDR_PHASE", master=txn.master, slave=sid,
                        addr=txn.addr, access=txn.kind.value,
                        requested_master=port.master_id if claimed is None
                        else claimed,
                        requested_addr=None if request.addr == txn.addr
                        else request.addr)
        return txn

    def _trace_data(self, txn: BusTransaction, cycle: int) -> None:
        self.trace.emit(cycle, "DATA_PHASE", master=txn.master,
                        slave=txn.slave, addr=txn.addr, wdata=txn.wdata)

    def _finish(self, pending: PendingTransfer, verdict, cycle: int):
        txn = pending.transaction
        report = self.transmons[txn.slave].respond_and_report(txn, verdict,
                                                               cycle)
        return self._deliver(pending, report)

    def _deliver(self, pending: PendingTransfer,
                 report: Report) -> SecurityEvent:
        response, event, record = report
        port = self.ports[pending.port]
        assert response.master == port.master_id
        port.in_flight = None
        port.ready_cycle = response.completion_cycle + 1
        port.responses.append(response)
        pending.response = response
        pending.cause = event.cause
        self.completed += 1
        cycle = response.completion_cycle
        self.trace.emit(cycle, "RESP", master=response.master,
                        hresp=response.hresp.value, rdata=response.rdata)
        if event.cause.blocked:
            self.trace.emit(cycle, "SECURITY", master=event.master,
                            slave=event.slave, addr=event.addr,
                            access=event.kind.value, cause=event.cause.value,
                            wdata=event.wdata)
            self.trace.emit(cycle, "INTERRUPT", seq=record.seq,
                            master=event.master, slave=event.slave,
                            addr=event.addr, cause=event.cause.value)
        return event
