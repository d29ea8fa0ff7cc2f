# -*- coding: utf-8 -*-
"""
Author: PyISEA Team
================================
The whole simulated interposer system: memories and SRS behind their
TRANSMONs, the bus fabric, the interrupt line and PROC-0.

A `System` is a plain value between two calls to `step`, which is what lets
fuzz workers each own one and what `save_system_with_pickle` persists.
"""
import logging
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from pyisea.bus.fabric import BusFabric, decode
from pyisea.bus.transfer import BusRequest, PendingTransfer
from pyisea.bus.transmon import InterruptLine, SecurityEvent, Transmon
from pyisea.config import SlaveKind, SystemConfig
from pyisea.memory.banks import EccControlMemory, MemorySlave, SrsFile
from pyisea.policy.core import PolicyRegisterSpace
from pyisea.supervisor import Supervisor
from pyisea.trace import Trace

logger = logging.getLogger(__name__)


class System:
    """
    Builds every component from a configuration.

    Args:
        config (SystemConfig, optional): Defaults to SystemConfig().
    """

    def __init__(self, config: Optional[SystemConfig] = None):
        self.config = config if config is not None else SystemConfig()
        self.trace = Trace()
        self.interrupts = InterruptLine()
        self.storage: Dict[int, object] = {}
        self.ecc: Dict[int, EccControlMemory] = {}
        self.transmons: Dict[int, Transmon] = {}
        for region in self.config.memory_map:
            sid = region.slave_id
            if region.kind is SlaveKind.SRS:
                self.storage[sid] = SrsFile(sid, region.size)
            else:
                self.storage[sid] = MemorySlave(sid, region.size)
                if self.config.ecc_enabled:
                    self.ecc[sid] = EccControlMemory(region.size,
                                                     self.config.ecc_mode)
            self.transmons[sid] = Transmon(sid, self.storage[sid], self.config,
                                           self.interrupts, self.ecc.get(sid))
        self.fabric = BusFabric(self.config, self.transmons, self.interrupts,
                                self.trace)
        self.supervisor = Supervisor(self)
        self.security_events = 0
        self.blocked_events = 0

    def __repr__(self) -> str:
        return (f"System(cycle={self.cycle}, slaves={len(self.storage)}, "
                f"masters={len(self.fabric.ports)})")

    @property
    def cycle(self) -> int:
        return self.fabric.cycle

    @property
    def busy(self) -> bool:
        return self.fabric.busy

    def issue(self, master: int, request: BusRequest) -> PendingTransfer:
        return self.fabric.issue(master, request)

    def step(self) -> List[SecurityEvent]:
        """One clock cycle, then PROC-0 handles the interrupts it raised."""
        events = self.fabric.step()
        self.security_events += len(events)
        self.blocked_events += sum(1 for e in events if e.cause.blocked)
        for record in self.interrupts.drain():
            self.supervisor.handle(record)
        return events

    def run(self, max_cycles: Optional[int] = None) -> int:
        """
        Steps until the fabric is idle.

        Args:
            max_cycles (int, optional): Stop after this many cycles.
                Defaults to the configured cycle limit.

        Returns:
            int: Cycles stepped.
        """
        limit = self.config.cycle_limit if max_cycles is None else max_cycles
        start = self.cycle
        while self.busy and self.cycle - start < limit:
            self.step()
        if self.busy:
            logger.warning("stopped at cycle %d with transfers pending",
                           self.cycle)
        return self.cycle - start

    def install_policies(self, images: Dict[int, PolicyRegisterSpace]) -> None:
        self.supervisor.install_policies(images)

    def locate(self, addr: int) -> Tuple[int, int]:
        target = decode(addr, self.config.memory_map)
        if target is None:
            raise ValueError(f"address {addr:#010x} is not mapped")
        return target

    def peek(self, addr: int) -> int:
        """Backdoor word read; no bus transfer, no ECC."""
        sid, offset = self.locate(addr & ~0x3)
        return self.storage[sid].mem_read(offset)

    def read_region(self, start: int, length: int) -> np.ndarray:
        """Backdoor byte read-out of [start, start + length)."""
        sid, offset = self.locate(start)
        storage = self.storage[sid]
        if isinstance(storage, SrsFile):
            raw = storage.registers.astype("<u4").view(np.uint8)
        else:
            raw = storage.data
        if offset + length > raw.size:
            raise ValueError(f"region {start:#010x}+{length:#x} leaves "
                             f"slave {sid}")
        return raw[offset:offset + length].copy()

    def clear_region(self, start: int, length: int) -> None:
        """
        PROC-0's out-of-band clear: zeroes data, parity and taint of every
        slave the region touches.
        """
        end = start + length - 1
        regions = self.config.memory_map.intersecting(start, end)
        if not regions:
            raise ValueError(f"region {start:#010x}+{length:#x} is not mapped")
        for region in regions:
            first = max(start, region.base) - region.base
            last = min(end, region.end) - region.base
            self.storage[region.slave_id].clear(first, last - first + 1)
            if region.slave_id in self.ecc:
                self.ecc[region.slave_id].clear(first, last - first + 1)
        logger.info("cleared %#x bytes at %#010x", length, start)

    def inject_fault(self, slave: int, offset: int, bits: Iterable[int],
                     target: str = "data") -> None:
        """
        Flips stored bits behind the TRANSMON's back.

        Args:
            slave (int): Memory slave id.
            offset (int): Byte offset within the slave.
            bits (Iterable[int]): Data bits 0..7 or parity bits 0..3.
            target (str, optional): "data" or "parity". Defaults to "data".

        Raises:
            ValueError: Unknown slave or target, SRS slave, or parity
                without ECC.
        """
        bits = list(bits)
        storage = self.storage.get(slave)
        if not isinstance(storage, MemorySlave):
            raise ValueError(f"slave {slave} is not a memory slave")
        if target == "data":
            storage.flip_bits(offset, bits)
        elif target == "parity":
            if slave not in self.ecc:
                raise ValueError("parity faults need ecc_enabled")
            self.ecc[slave].flip_bits(offset, bits)
        else:
            raise ValueError(f"fault target must be 'data' or 'parity', "
                             f"got {target!r}")
        logger.warning("cycle %d: flipped %s bits %s of slave %d offset %#x",
                       self.cycle, target, bits, slave, offset)

    def tainted(self) -> Dict[int, List[int]]:
        """Tainted granule offsets per memory slave."""
        return {sid: ecc.tainted_granules() for sid, ecc in self.ecc.items()
                if ecc.taint}
