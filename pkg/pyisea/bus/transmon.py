# -*- coding: utf-8 -*-
"""
Author: PyISEA Team
================================
TRANSMON: the transaction monitor in front of every slave.

A two-stage pipeline. The APU checks (master, address, permission) during the
address phase; writes falling into a DPU scope are registered in the Slave
Access Filter (SAF) and their data is checked in the data phase, which holds
them one extra cycle. Denied transfers never reach the slave; the master sees a
generic error and PROC-0 gets an interrupt carrying the full cause.
"""
import enum
import logging
from dataclasses import dataclass
from typing import Dict, List, NamedTuple, Optional, Union

from pyisea.bus.transfer import BusResponse, BusTransaction, Hresp
from pyisea.memory.banks import EccControlMemory, MemorySlave, SrsFile
from pyisea.memory.ecc import EccStatus
from pyisea.policy.core import AccessKind, ApuVerdict, DpuVerdict, \
    PolicyRegisterSpace, apu_check, dpu_check, dpu_scoped, is_stray

logger = logging.getLogger(__name__)


class Cause(enum.Enum):
    APU_DENY = "ApuDeny"
    DPU_DENY = "DpuDeny"
    STRAY = "Stray"
    ECC_FAULT = "EccFault"
    NONE = "None"

    @property
    def blocked(self) -> bool:
        return self is not Cause.NONE

    @classmethod
    def from_text(cls, text: str) -> "Cause":
        for cause in cls:
            if text.lower() in (cause.value.lower(), cause.name.lower()):
                return cause
        raise ValueError(f"unknown cause {text!r}")


@dataclass(frozen=True)
class SecurityEvent:
    cycle: int
    master: int
    slave: Optional[int]
    addr: int
    kind: AccessKind
    cause: Cause
    wdata: Optional[int] = None


@dataclass(frozen=True)
class InterruptRecord:
    seq: int
    event: SecurityEvent


class InterruptLine:
    """
    The interrupt path from every TRANSMON to PROC-0. Numbers records
    gaplessly and queues them until the supervisor drains them between
    cycles.
    """

    def __init__(self):
        self.next_seq = 0
        self.pending: List[InterruptRecord] = []

    def raise_event(self, event: SecurityEvent) -> InterruptRecord:
        record = InterruptRecord(self.next_seq, event)
        self.next_seq += 1
        self.pending.append(record)
        return record

    def drain(self) -> List[InterruptRecord]:
        records, self.pending = self.pending, []
        return records


@dataclass(frozen=True)
class AddressVerdict:
    proceed: bool
    dpu_scoped: bool = False
    cause: Cause = Cause.NONE

    @classmethod
    def deny(cls, cause: Cause) -> "AddressVerdict":
        return cls(False, False, cause)


class DataVerdict(enum.Enum):
    FORWARD = "Forward"
    DENY_DPU = "DenyDpu"


@dataclass(frozen=True)
class SafEntry:
    transaction: BusTransaction
    registered_at: int
    dpu_scoped: bool = True


class Report(NamedTuple):
    """What a completed transfer produces."""
    response: BusResponse
    event: SecurityEvent
    interrupt: Optional[InterruptRecord]


Storage = Union[MemorySlave, SrsFile]


class Transmon:
    """
    Transaction monitor of one slave.

    Args:
        slave_id (int): HSEL index of the guarded slave.
        storage (MemorySlave or SrsFile): The guarded slave.
        config (SystemConfig): Privileged IDs, capacities and match mode.
        interrupts (InterruptLine): Where denials are reported.
        ecc (EccControlMemory, optional): Memory-security feature, memory
            slaves only. Defaults to None.
    """

    def __init__(self, slave_id: int, storage: Storage, config,
                 interrupts: InterruptLine,
                 ecc: Optional[EccControlMemory] = None):
        self.slave_id = slave_id
        self.storage = storage
        self.config = config
        self.interrupts = interrupts
        self.ecc = ecc
        self.prs = PolicyRegisterSpace(apu_capacity=config.apu_capacity,
                                       dpu_capacity=config.dpu_capacity,
                                       slave=slave_id)
        self.saf: Dict[int, SafEntry] = {}

    @property
    def mode(self):
        return self.config.match_mode

    def install(self, prs: PolicyRegisterSpace) -> None:
        """Swaps in a new register space; only called between cycles."""
        self.prs = prs

    def on_address_phase(self, txn: BusTransaction) -> AddressVerdict:
        if self.config.is_privileged(txn.master):
            return AddressVerdict(True)
        verdict = apu_check(self.prs, txn.master, txn.addr, txn.kind,
                            self.mode)
        if verdict is ApuVerdict.DENY:
            cause = Cause.STRAY if is_stray(self.prs, txn.addr, self.mode) \
                else Cause.APU_DENY
            logger.debug("slave %d: %s for master %d at %#010x",
                         self.slave_id, cause.value, txn.master, txn.addr)
            return AddressVerdict.deny(cause)
        scoped = txn.is_write and \
            dpu_scoped(self.prs, txn.master, txn.addr, self.mode)
        if scoped:
            self.saf[txn.tid] = SafEntry(txn, txn.address_phase_cycle)
        return AddressVerdict(True, scoped)

    def on_data_phase(self, entry: SafEntry, wdata: int) -> DataVerdict:
        txn = entry.transaction
        verdict = dpu_check(self.prs, txn.master, txn.addr, wdata, self.mode)
        if verdict is DpuVerdict.DENY:
            # dropped from the SAF here, it never reaches the slave
            self.saf.pop(txn.tid, None)
            logger.debug("slave %d: DpuDeny for master %d writing %#010x",
                         self.slave_id, txn.master, wdata)
            return DataVerdict.DENY_DPU
        return DataVerdict.FORWARD

    def _access(self, txn: BusTransaction):
        """Forwards an approved transfer. Returns (cause, rdata)."""
        ecc = self.ecc
        if ecc is not None and ecc.is_tainted(txn.offset):
            return Cause.ECC_FAULT, None
        if txn.is_write:
            self.storage.mem_write(txn.offset, txn.wdata)
            if ecc is not None:
                ecc.record(txn.offset, txn.wdata)
            return Cause.NONE, None
        if ecc is None:
            return Cause.NONE, self.storage.mem_read(txn.offset)
        status, value = ecc.validate(txn.offset,
                                     self.storage.read_bytes(txn.offset))
        if status is EccStatus.FAULT:
            ecc.taint_region(txn.offset)
            return Cause.ECC_FAULT, None
        if status is EccStatus.CORRECTED:
            logger.debug("slave %d: corrected single-bit error at %#x",
                         self.slave_id, txn.offset)
            self.storage.mem_write(txn.offset, value)
            ecc.record(txn.offset, value)
        return Cause.NONE, value

    def respond_and_report(self, txn: BusTransaction,
                           verdict: Union[AddressVerdict, DataVerdict],
                           cycle: int) -> Report:
        """
        Completes a transfer at `cycle`.

        Args:
            txn (BusTransaction): The transfer.
            verdict (AddressVerdict or DataVerdict): Final verdict, from the
                address phase or, for DPU-scoped writes, the data phase.
            cycle (int): Completion cycle.

        Returns:
            Report: The bus response, the security event and the interrupt
                raised to PROC-0 (None when the transfer went through).
        """
        self.saf.pop(txn.tid, None)
        if isinstance(verdict, DataVerdict):
            cause = Cause.DPU_DENY if verdict is DataVerdict.DENY_DPU \
                else Cause.NONE
        else:
            cause = verdict.cause
        rdata = None
        if not cause.blocked:
            cause, rdata = self._access(txn)
        return complete(txn, cause, rdata, cycle, self.interrupts)


def complete(txn: BusTransaction, cause: Cause, rdata: Optional[int],
             cycle: int, interrupts: InterruptLine) -> Report:
    """
    Builds the response of a finished transfer. Every blocked transfer gets
    the same bus-visible answer, whatever the cause.
    """
    event = SecurityEvent(cycle, txn.master, txn.slave, txn.addr, txn.kind,
                          cause, txn.wdata)
    if cause.blocked:
        response = BusResponse(txn.tid, txn.master, Hresp.ERROR, None, cycle)
        return Report(response, event, interrupts.raise_event(event))
    response = BusResponse(txn.tid, txn.master, Hresp.OKAY, rdata, cycle)
    return Report(response, event, None)
