# -*- coding: utf-8 -*-
"""
Author: PyISEA Team
================================
Randomised invariant checking.

Random policy sets are installed, random transfers (random masters, addresses,
data and spoofed ID fields) are pushed through a full system, and every
completed transfer is checked against a brute-force model of the policies.
Work is cut into fixed-size shards with seeds derived from the run seed, so
the report does not depend on how many worker processes ran it.
"""
import bisect
import dataclasses
import logging
import multiprocessing
import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from pyisea.bus.fabric import decode
from pyisea.bus.transfer import BusRequest, PendingTransfer
from pyisea.bus.transmon import Cause
from pyisea.config import MemoryRegion, SystemConfig
from pyisea.policy.core import WORD_MASK, AccessKind, ApuPolicy, DpuPolicy, \
    MatchMode, Permission, PolicyRegisterSpace
from pyisea.system import System

logger = logging.getLogger(__name__)

SHARD_SIZE = 2000
SHARD_STRIDE = 1 << 20
ACTIVE_CORES = 8
POLICY_WINDOW = 0x1000
DROP_CAUSES = (Cause.APU_DENY.value, Cause.DPU_DENY.value, Cause.STRAY.value)


@dataclass(frozen=True, order=True)
class Violation:
    invariant: str
    seed: int
    shard: int
    detail: str

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass
class FuzzReport:
    seed: int
    n_transactions: int
    match_mode: str
    spoof_all: bool = False
    counters: Counter = field(default_factory=Counter)
    violations: List[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {"seed": self.seed,
                "n_transactions": self.n_transactions,
                "match_mode": self.match_mode,
                "spoof_all": self.spoof_all,
                "counters": dict(sorted(self.counters.items())),
                "violations": [v.to_dict() for v in sorted(self.violations)]}

    @classmethod
    def merge(cls, reports: Sequence["FuzzReport"], seed: int,
              n_transactions: int) -> "FuzzReport":
        """Order-independent union of shard reports."""
        first = reports[0]
        merged = cls(seed, n_transactions, first.match_mode, first.spoof_all)
        for report in reports:
            merged.counters.update(report.counters)
            merged.violations.extend(report.violations)
        merged.violations.sort()
        return merged


def oracle_scope(addr: int, mask: int, query: int, mode: MatchMode) -> bool:
    """Scope membership straight from the register definitions."""
    if mode is MatchMode.MASKED_EQUALITY:
        return ((addr ^ query) & ~mask & WORD_MASK) == 0
    return (addr & ~mask & WORD_MASK) <= query <= (addr | mask)


def oracle_cause(prs: PolicyRegisterSpace, master: int, addr: int,
                 kind: AccessKind, wdata: Optional[int],
                 mode: MatchMode) -> Cause:
    """Expected outcome of a non-privileged transfer, policy by policy."""
    allowed = any(p.apumid == master and p.apuperm.allows(kind)
                  and oracle_scope(p.apuaddr, p.apumask, addr, mode)
                  for p in prs.apu_policies)
    if not allowed:
        covered = any(oracle_scope(p.apuaddr, p.apumask, addr, mode)
                      for p in prs.apu_policies)
        return Cause.APU_DENY if covered else Cause.STRAY
    if kind is AccessKind.WRITE:
        for p in prs.dpu_policies:
            keep = ~p.dpudmask & WORD_MASK
            if p.dpumid == master and \
                    oracle_scope(p.dpuaddr, p.dpuamask, addr, mode) and \
                    (wdata & keep) == (p.dpudata & keep):
                return Cause.DPU_DENY
    return Cause.NONE


def oracle_scoped(prs: PolicyRegisterSpace, master: int, addr: int,
                  kind: AccessKind, mode: MatchMode) -> bool:
    return kind is AccessKind.WRITE and any(
        p.dpumid == master and oracle_scope(p.dpuaddr, p.dpuamask, addr, mode)
        for p in prs.dpu_policies)


def random_prs(rng: random.Random, region: MemoryRegion,
               masters: Sequence[int], apu_count: int, dpu_count: int,
               apu_capacity: int = 16,
               dpu_capacity: int = 16) -> PolicyRegisterSpace:
    """
    Random valid register space for one slave. Scopes sit in the first
    `POLICY_WINDOW` bytes of the region so random traffic hits them often;
    masks are arbitrary bit sets, contiguous or not.
    """
    window = min(region.size, POLICY_WINDOW)
    bits = window.bit_length() - 1

    def scope():
        mask = rng.getrandbits(bits)
        if rng.random() < 0.5:
            mask = (1 << rng.randint(0, bits)) - 1
        return region.base + rng.randrange(window), mask

    apu = []
    for _ in range(apu_count):
        addr, mask = scope()
        apu.append(ApuPolicy(rng.choice(masters), addr, mask,
                             rng.choice(list(Permission))))
    dpu = []
    for _ in range(dpu_count):
        addr, mask = scope()
        dmask = rng.choice([0, 0xFFFFFFFE, 0xFFFF0000, WORD_MASK,
                            rng.getrandbits(32)])
        dpu.append(DpuPolicy(rng.choice(masters), addr, mask,
                             rng.getrandbits(32), dmask))
    return PolicyRegisterSpace(apu, dpu, apu_capacity, dpu_capacity,
                               region.slave_id)


class _DropWatch:
    """Snapshots the target word at every address phase and compares it
    when the transfer is reported blocked."""

    def __init__(self, system: System, report: FuzzReport, shard: int):
        self.system = system
        self.report = report
        self.shard = shard
        self.before: Dict[int, tuple] = {}

    def __call__(self, event) -> None:
        if event.kind == "ADDR_PHASE" and event.get("slave") is not None:
            addr = event["addr"]
            self.before[event["master"]] = (addr, self.system.peek(addr))
        elif event.kind == "SECURITY" and event.get("slave") is not None \
                and event["cause"] in DROP_CAUSES:
            addr, value = self.before[event["master"]]
            self.report.counters["drop_checks"] += 1
            if self.system.peek(addr) != value:
                self.report.violations.append(Violation(
                    "drop guarantee", self.report.seed, self.shard,
                    f"cycle {event.cycle}: {event['cause']} by master "
                    f"{event['master']} changed {addr:#010x}"))


def _random_request(rng: random.Random, config: SystemConfig,
                    master: int, images: Dict[int, PolicyRegisterSpace],
                    spoof_all: bool, issue_cycle: int) -> BusRequest:
    regions = list(config.memory_map)
    roll = rng.random()
    if roll < 0.9:
        region = rng.choice(regions)
        window = min(region.size, POLICY_WINDOW)
        addr = region.base + rng.randrange(window)
    else:
        addr = rng.getrandbits(32)
    spoof = None
    if spoof_all or rng.random() < 0.25:
        spoof = rng.choice([m for m in config.all_master_ids if m != master])
    if rng.random() < 0.5:
        return BusRequest.read(addr, requested_master_field=spoof,
                               issue_cycle=issue_cycle)
    wdata = rng.getrandbits(32)
    target = decode(addr & ~0x3, config.memory_map)
    if target is not None and rng.random() < 0.4:
        dpu = images[target[0]].dpu_policies
        if dpu:
            policy = rng.choice(dpu)
            wdata = policy.dpudata ^ (rng.getrandbits(32) & policy.dpudmask)
    return BusRequest.write(addr, wdata, requested_master_field=spoof,
                            issue_cycle=issue_cycle)


def _check(report: FuzzReport, shard: int, system: System,
           images: Dict[int, PolicyRegisterSpace],
           handles: List[PendingTransfer], n_active: int) -> None:
    config = system.config
    mode = config.match_mode
    grants: Dict[Optional[int], List[int]] = {}
    for event in system.trace.of_kind("GRANT"):
        grants.setdefault(event.get("slave"), []).append(event.cycle)

    def fail(invariant: str, pending: PendingTransfer, detail: str):
        report.violations.append(Violation(
            invariant, report.seed, shard,
            f"master {pending.port} #{pending.index} "
            f"{pending.request.kind.value} {pending.request.addr:#010x}: "
            f"{detail}"))

    for pending in handles:
        counters = report.counters
        counters["transactions"] += 1
        request, txn, response = pending.request, pending.transaction, \
            pending.response
        if response is None or txn is None:
            fail("liveness", pending, "never completed")
            continue
        counters[response.hresp.value] += 1
        counters[f"cause {pending.cause.value}"] += 1
        if txn.master != pending.port or response.master != pending.port:
            fail("id integrity", pending, f"bus carried master {txn.master}")
        spoof = request.requested_master_field
        if spoof is not None and spoof != pending.port:
            counters["spoof_attempts"] += 1
            if txn.master == pending.port:
                counters["spoof_neutralized"] += 1
        addr = txn.addr
        target = decode(addr, config.memory_map)
        if target is None:
            counters["decode_misses"] += 1
            expected, scoped = Cause.STRAY, False
        else:
            prs = images[target[0]]
            expected = oracle_cause(prs, txn.master, addr, txn.kind,
                                    txn.wdata, mode)
            scoped = expected is not Cause.APU_DENY and \
                expected is not Cause.STRAY and \
                oracle_scoped(prs, txn.master, addr, txn.kind, mode)
        if pending.cause is not expected:
            fail("default deny", pending, f"got {pending.cause.value}, "
                                          f"oracle says {expected.value}")
        if scoped:
            counters["dpu_scoped"] += 1
        if txn.data_phase_cycle != txn.address_phase_cycle + 1:
            fail("pipeline timing", pending, "data phase not one cycle after "
                                             "address phase")
        latency = 2 if scoped else 1
        if pending.service_latency != latency:
            fail("uniform latency", pending,
                 f"latency {pending.service_latency}, expected {latency}")
        waited = pending.arbitration_wait
        if waited > n_active - 1:
            fail("liveness", pending, f"waited {waited} cycles for a grant")
        if txn.slave is not None:
            cycles = grants[txn.slave]
            others = bisect.bisect_left(cycles, txn.address_phase_cycle) - \
                bisect.bisect_left(cycles, pending.eligible_cycle)
            if others != waited:
                fail("uniform latency", pending,
                     f"stalled {waited - others} of {waited} waiting cycles "
                     f"without a grant on slave {txn.slave}")
        if pending.turnaround != waited + latency:
            fail("uniform latency", pending,
                 f"turnaround {pending.turnaround}, expected "
                 f"{waited + latency}")

    for master, port in system.fabric.ports.items():
        issued = {p.transaction.tid for p in handles
                  if p.port == master and p.transaction is not None}
        delivered = {r.tid for r in port.responses}
        if issued != delivered or any(r.master != master
                                      for r in port.responses):
            report.violations.append(Violation(
                "no snooping", report.seed, shard,
                f"master {master} received responses for "
                f"{sorted(delivered - issued)}"))
    interrupts = system.trace.of_kind("INTERRUPT")
    seqs = [event["seq"] for event in interrupts]
    if not (system.blocked_events == system.supervisor.received
            == len(interrupts)) or seqs != list(range(len(seqs))):
        report.violations.append(Violation(
            "interrupt conservation", report.seed, shard,
            f"{system.blocked_events} blocked, {system.supervisor.received} "
            f"received, {len(interrupts)} traced"))


def run_shard(config: SystemConfig, seed: int, shard: int, n: int,
              spoof_all: bool = False) -> FuzzReport:
    """
    One independent simulation of `n` random transfers.

    Args:
        config (SystemConfig): System to fuzz. Isolation is switched off so
            the policies stay fixed for the whole shard.
        seed (int): Run seed.
        shard (int): Shard number; (seed, shard) reproduces the shard.
        n (int): Transfers to generate.
        spoof_all (bool, optional): Spoof the ID field of every transfer.

    Returns:
        FuzzReport: Counters and violations of this shard.
    """
    rng = random.Random(seed * SHARD_STRIDE + shard)
    config = dataclasses.replace(config, isolation_threshold=0)
    report = FuzzReport(seed, n, config.match_mode.value, spoof_all)
    system = System(config)
    cores = rng.sample(config.core_ids, min(ACTIVE_CORES,
                                            len(config.core_ids)))
    images = {}
    for region in config.memory_map:
        images[region.slave_id] = random_prs(
            rng, region, cores, rng.randint(0, 8), rng.randint(0, 3),
            config.apu_capacity, config.dpu_capacity)
    system.install_policies(images)
    system.trace.subscribe(_DropWatch(system, report, shard))
    clock = {master: system.cycle for master in cores}
    handles = []
    for _ in range(n):
        master = rng.choice(cores)
        clock[master] += rng.randint(0, 2)
        handles.append(system.issue(master, _random_request(
            rng, config, master, images, spoof_all, clock[master])))
    system.run(max_cycles=max(config.cycle_limit, 8 * n))
    _check(report, shard, system, images, handles, len(cores))
    report.counters["cycles"] += system.cycle
    logger.info("fuzz shard %d of seed %d: %d transfers, %d violations",
                shard, seed, n, len(report.violations))
    return report


def _run_task(task) -> FuzzReport:
    return run_shard(*task)


def fuzz(config: SystemConfig, seed: int, n_transactions: int,
         jobs: int = 1, spoof_all: bool = False,
         match_mode: Optional[MatchMode] = None) -> FuzzReport:
    """
    Runs the invariant suite over `n_transactions` random transfers.

    Args:
        config (SystemConfig): System to fuzz.
        seed (int): Run seed; the same seed gives the same report.
        n_transactions (int): Total transfers over all shards.
        jobs (int, optional): Worker processes. Defaults to 1.
        spoof_all (bool, optional): Spoof every transfer's ID field.
        match_mode (MatchMode, optional): Overrides `config.match_mode`.

    Returns:
        FuzzReport: Merged counters and every violation with its seed and
            shard.
    """
    if n_transactions <= 0:
        raise ValueError("n_transactions must be positive")
    if match_mode is not None:
        config = dataclasses.replace(config, match_mode=match_mode)
    tasks = []
    for shard, start in enumerate(range(0, n_transactions, SHARD_SIZE)):
        tasks.append((config, seed, shard,
                      min(SHARD_SIZE, n_transactions - start), spoof_all))
    logger.info("fuzzing %d transfers in %d shards on %d workers",
                n_transactions, len(tasks), jobs)
    if jobs > 1 and len(tasks) > 1:
        with multiprocessing.Pool(processes=min(jobs, len(tasks))) as pool:
            reports = pool.map(_run_task, tasks)
    else:
        reports = [_run_task(task) for task in tasks]
    return FuzzReport.merge(reports, seed, n_transactions)
