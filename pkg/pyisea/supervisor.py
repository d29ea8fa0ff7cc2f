# -*- coding: utf-8 -*-
"""
Author: PyISEA Team
================================
PROC-0 and the SI path.

PROC-0 never sits on the hot path: it drains the interrupt line between cycles,
keeps a per-master ledger of blocked requests, isolates repeat offenders and
changes policies only at cycle boundaries. The SI loads memory images and reads
results back through ordinary, privileged bus transfers.
"""
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from pyisea.bus.transfer import BusRequest
from pyisea.bus.transmon import Cause, InterruptRecord
from pyisea.exceptions import CapacityError, PrivilegeError
from pyisea.memory.banks import TAINT_GRANULE, WORD_BYTES
from pyisea.memory.image import read_image_file, write_image_file
from pyisea.policy.core import PolicyRegisterSpace

logger = logging.getLogger(__name__)

# Causes a master can be blamed for. ECC faults are the memory's doing.
ISOLATION_CAUSES = (Cause.APU_DENY, Cause.DPU_DENY, Cause.STRAY)

Region = Tuple[int, int]


@dataclass(frozen=True)
class IsolateMaster:
    master: int


SupervisorAction = IsolateMaster


class ViolationLedger:
    """
    Blocked-request counters per master and cause, for one application epoch.

    Args:
        isolation_threshold (int): Blocked requests after which a master is
            isolated. 0 never isolates.
    """

    def __init__(self, isolation_threshold: int):
        self.isolation_threshold = isolation_threshold
        self.counts: Dict[int, Counter] = {}

    def record(self, master: int, cause: Cause) -> int:
        """Counts one event and returns the master's blocked total."""
        self.counts.setdefault(master, Counter())[cause] += 1
        return self.blocked(master)

    def blocked(self, master: int) -> int:
        counts = self.counts.get(master, Counter())
        return sum(counts[cause] for cause in ISOLATION_CAUSES)

    def reset(self) -> None:
        self.counts = {}

    def as_dict(self) -> dict:
        return {master: {cause.value: n for cause, n in sorted(
            counts.items(), key=lambda item: item[0].value)}
            for master, counts in sorted(self.counts.items())}


@dataclass
class DumpReport:
    """Result read-back: readable words and the granules that errored."""
    words: List[Tuple[int, int]] = field(default_factory=list)
    unreadable: List[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.unreadable


class Supervisor:
    """
    PROC-0 together with the TCU/SI link of one `System`.

    Args:
        system (System): The simulated system this supervisor manages.
    """

    def __init__(self, system):
        self.system = system
        self.config = system.config
        self.ledger = ViolationLedger(self.config.isolation_threshold)
        self.isolated = set()
        self.received = 0
        self.epoch = 0

    def _trace(self, action: str, master: Optional[int] = None,
               detail: Optional[str] = None) -> None:
        self.system.trace.emit(self.system.cycle, "SUPERVISOR",
                               action=action, master=master, detail=detail)

    def on_interrupt(self, rec: InterruptRecord) -> List[SupervisorAction]:
        """
        Books one interrupt.

        Args:
            rec (InterruptRecord): Record drained from the interrupt line.

        Returns:
            List[SupervisorAction]: [IsolateMaster(m)] when master m just
                reached the isolation threshold, else [].
        """
        assert rec.seq == self.received, \
            f"interrupt {rec.seq} arrived, expected {self.received}"
        self.received += 1
        event = rec.event
        if self.config.is_privileged(event.master):
            return []
        blocked = self.ledger.record(event.master, event.cause)
        threshold = self.ledger.isolation_threshold
        if threshold and blocked >= threshold and \
                event.master not in self.isolated:
            return [IsolateMaster(event.master)]
        return []

    def handle(self, rec: InterruptRecord) -> None:
        for action in self.on_interrupt(rec):
            if isinstance(action, IsolateMaster):
                self.isolate_master(action.master)

    def isolate_master(self, master: int) -> None:
        """
        Removes every APU policy of `master` from every PRS. With default
        deny, everything the master issues afterwards is blocked.

        Raises:
            PrivilegeError: For PROC-0 and the SI.
        """
        if self.config.is_privileged(master):
            raise PrivilegeError(f"master {master:#x} is privileged and "
                                 "cannot be isolated")
        for transmon in self.system.transmons.values():
            transmon.install(transmon.prs.without_master(master))
        self.isolated.add(master)
        logger.info("isolated master %d after %d blocked requests", master,
                    self.ledger.blocked(master))
        self._trace("ISOLATE", master=master)

    def install_policies(self, images: Dict[int, PolicyRegisterSpace]) -> None:
        """
        Replaces the PRS contents of the given slaves.

        Every image is rebuilt against the capacity of its TRANSMON before any
        of them is swapped in, so an overflow leaves every PRS untouched. APU
        policies of masters isolated in this epoch are left out; they come back
        only after `teardown_epoch`.

        Args:
            images (Dict[int, PolicyRegisterSpace]): Image per slave id.

        Raises:
            CapacityError: An image exceeds its PRS capacity.
            ValueError: An image names an unknown slave.
        """
        staged = {}
        for sid, image in images.items():
            if sid not in self.system.transmons:
                raise ValueError(f"no TRANSMON for slave {sid}")
            try:
                staged[sid] = PolicyRegisterSpace(
                    [p for p in image.apu_policies
                     if p.apumid not in self.isolated],
                    image.dpu_policies,
                    self.config.apu_capacity, self.config.dpu_capacity, sid)
            except CapacityError:
                logger.error("policy install rejected for slave %d", sid)
                raise
        withheld = sum(len(image.apu_policies) - len(staged[sid].apu_policies)
                       for sid, image in images.items())
        if withheld:
            logger.warning("withheld %d APU policies of isolated masters %s",
                           withheld, sorted(self.isolated))
        for sid, prs in staged.items():
            self.system.transmons[sid].install(prs)
        n_apu = sum(len(p.apu_policies) for p in staged.values())
        n_dpu = sum(len(p.dpu_policies) for p in staged.values())
        logger.info("installed %d APU and %d DPU policies on %d slaves",
                    n_apu, n_dpu, len(staged))
        self._trace("INSTALL", detail=f"{n_apu} APU, {n_dpu} DPU")

    def teardown_epoch(self, regions: Iterable[Region]) -> None:
        """
        Ends an application epoch: zeroes the regions (data, parity, taint),
        then drops every policy and resets the ledger.

        The zeroing stands in for PROC-0's privileged write loop. It goes
        through `System.clear_region` instead of the bus, so it takes no
        cycles and also lifts taint, which a bus write cannot do.

        Args:
            regions (Iterable[Tuple[int, int]]): (start address, length).
        """
        regions = list(regions)
        for start, length in regions:
            self.system.clear_region(start, length)
        for transmon in self.system.transmons.values():
            transmon.install(transmon.prs.cleared())
        self.ledger.reset()
        self.isolated = set()
        self.epoch += 1
        logger.info("epoch torn down, %d regions cleared", len(regions))
        self._trace("TEARDOWN", detail=f"{len(regions)} regions")

    def load_image(self, image: Union[str, Sequence[Tuple[int, int]]]) \
            -> List[int]:
        """
        Writes a memory image through the SI.

        Args:
            image (str or Sequence[Tuple[int, int]]): Image file path, or
                already parsed (address, word) pairs.

        Raises:
            ImageFormatError: Malformed image file; nothing is written.

        Returns:
            List[int]: Addresses whose write errored.
        """
        words = read_image_file(image) if isinstance(image, str) else image
        port = self.system.fabric.port(self.config.si_id)
        start = self.system.cycle
        handles = [port.issue(BusRequest.write(addr, word, issue_cycle=start))
                   for addr, word in words]
        self.system.run(max_cycles=self.config.cycle_limit)
        failed = [h.request.addr for h in handles
                  if h.response is None or not h.response.ok]
        if failed:
            logger.warning("%d of %d image words were not written",
                           len(failed), len(handles))
        logger.info("loaded %d words in %d cycles", len(handles) - len(failed),
                    self.system.cycle - start)
        self._trace("LOAD_IMAGE", master=self.config.si_id,
                    detail=f"{len(handles)} words")
        return failed

    def dump_results(self, regions: Iterable[Region],
                     path: Optional[str] = None) -> DumpReport:
        """
        Reads regions back through the SI. Tainted granules answer with an
        error and are listed as unreadable.

        Args:
            regions (Iterable[Tuple[int, int]]): (start address, length).
            path (str, optional): Writes the readable words as an image.

        Returns:
            DumpReport: Words read and unreadable granule addresses.
        """
        port = self.system.fabric.port(self.config.si_id)
        start = self.system.cycle
        handles = []
        for base, length in regions:
            for addr in range(base, base + length, WORD_BYTES):
                handles.append(port.issue(BusRequest.read(
                    addr, issue_cycle=start)))
        self.system.run(max_cycles=self.config.cycle_limit)
        report = DumpReport()
        unreadable = set()
        for handle in handles:
            addr = handle.request.addr
            if handle.response is not None and handle.response.ok:
                report.words.append((addr, handle.response.rdata))
            else:
                unreadable.add(addr - addr % TAINT_GRANULE)
        report.unreadable = sorted(unreadable)
        if report.unreadable:
            logger.warning("%d granules could not be read back",
                           len(report.unreadable))
        if path is not None:
            write_image_file(path, report.words)
        self._trace("DUMP", master=self.config.si_id,
                    detail=f"{len(report.words)} words")
        return report
