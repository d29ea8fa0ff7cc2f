# -*- coding: utf-8 -*-
"""
Author: PyISEA Team
================================
Policy compiler: reads human-written policy files, validates them against a
system configuration and emits one PRS image per slave.

Policy files are JSON:

    {
      "apu": [{"master": 2, "range": ["0x40020000", "0x4002006C"],
               "perm": "rw"},
              {"master": 1, "addr": "0x40020070", "mask": "0x3",
               "perm": "ro"}],
      "dpu": [{"master": 2, "addr": "0x20000000", "amask": "0x0FFFFFFF",
               "data": "0x0BADBEEF", "dmask": "0x0"}]
    }

Register names (apumid, apuaddr, ..., dpudmask) are accepted as keys too, and
the DPU data mask may also be spelled "dpumask".
"""
import json
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from pyisea.config import SystemConfig
from pyisea.exceptions import PolicyError
from pyisea.policy.core import WORD_MASK, AccessKind, ApuPolicy, DpuPolicy, \
    MatchMode, Permission, PolicyRegisterSpace, apu_check_array, \
    dpu_check_array, scope_bounds
from pyisea.utils import format_hex, parse_int

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RangeEncoding:
    """
    Result of converting a contiguous range to an (addr, mask) pair.

    Args:
        addr (int): Policy address.
        mask (int): Policy mask.
        exact (bool): The pair reproduces (start, end) through the
            start/end formulas, i.e. exactly under RANGE_INTERVAL.
        masked_exact (bool): The masked set equals the interval too, so the
            policy means the same in both match modes.
        over_coverage (int): Addresses covered beyond the requested range
            when `exact` is False (suggested covering pair).
    """
    addr: int
    mask: int
    exact: bool
    masked_exact: bool
    over_coverage: int = 0

    @property
    def mode_dependent(self) -> bool:
        return self.exact and not self.masked_exact


def is_low_run(mask: int) -> bool:
    """True for 0, 1, 3, 7, ... (contiguous run of low bits)."""
    return mask & (mask + 1) == 0


def masked_members(mask: int) -> int:
    return 1 << bin(mask & WORD_MASK).count("1")


def range_to_addr_mask(start: int, end: int) -> RangeEncoding:
    """
    Inverts the start/end formulas for a contiguous address range.

    Args:
        start (int): First address.
        end (int): Last address.

    Raises:
        ValueError: If start > end or either is not a 32-bit value.

    Returns:
        RangeEncoding: (start, end XOR start) when that pair reproduces the
            range; otherwise the smallest aligned block covering it, with
            `exact` False and the number of extra addresses covered. The
            block is the minimal cover for masked matching. Under
            RANGE_INTERVAL a tighter unaligned pair can exist, e.g. [1, 2]
            is covered by (1, 0x2) with one extra address instead of two.
    """
    for value in (start, end):
        if not 0 <= value <= WORD_MASK:
            raise ValueError(f"{value:#x} is not a 32-bit address")
    if start > end:
        raise ValueError(f"range start {start:#x} is above end {end:#x}")
    mask = start ^ end
    if scope_bounds(start, mask) == (start, end):
        return RangeEncoding(start, mask, True, is_low_run(mask))
    bits = mask.bit_length()
    block = (1 << bits) - 1
    addr = start & ~block & WORD_MASK
    over = (block + 1) - (end - start + 1)
    return RangeEncoding(addr, block, False, False, over)


@dataclass
class PolicyEntry:
    """One parsed source entry, with where it came from."""
    section: str
    index: int
    policy: Union[ApuPolicy, DpuPolicy]
    encoding: Optional[RangeEncoding] = None
    source_range: Optional[Tuple[int, int]] = None

    @property
    def scope(self) -> Tuple[int, int]:
        if isinstance(self.policy, ApuPolicy):
            return scope_bounds(self.policy.apuaddr, self.policy.apumask)
        return scope_bounds(self.policy.dpuaddr, self.policy.dpuamask)

    @property
    def mask(self) -> int:
        if isinstance(self.policy, ApuPolicy):
            return self.policy.apumask
        return self.policy.dpuamask

    @property
    def addr(self) -> int:
        if isinstance(self.policy, ApuPolicy):
            return self.policy.apuaddr
        return self.policy.dpuaddr

    @property
    def master(self) -> int:
        if isinstance(self.policy, ApuPolicy):
            return self.policy.apumid
        return self.policy.dpumid

    @property
    def where(self) -> str:
        return f"{self.section}[{self.index}]"


@dataclass
class PolicySource:
    apu: List[PolicyEntry] = field(default_factory=list)
    dpu: List[PolicyEntry] = field(default_factory=list)

    @property
    def entries(self) -> List[PolicyEntry]:
        return self.apu + self.dpu


@dataclass(frozen=True)
class Diagnostic:
    level: str
    where: str
    message: str

    @property
    def is_error(self) -> bool:
        return self.level == "error"

    def __str__(self) -> str:
        return f"{self.level}: {self.where}: {self.message}"


def _pick(entry: dict, where: str, *names: str, required: bool = True):
    for name in names:
        if name in entry:
            return entry[name]
    if required:
        raise PolicyError(f"{where}: missing '{names[0]}'")
    return None


def _scope(entry: dict, where: str, addr_names: Tuple[str, ...],
           mask_names: Tuple[str, ...]):
    """(addr, mask, encoding, source_range) from 'range' or 'addr'/'mask'."""
    if "range" in entry:
        try:
            start, end = (parse_int(v, "range") for v in entry["range"])
            encoding = range_to_addr_mask(start, end)
        except (TypeError, ValueError) as err:
            raise PolicyError(f"{where}: bad range: {err}") from err
        return encoding.addr, encoding.mask, encoding, (start, end)
    addr = parse_int(_pick(entry, where, *addr_names), f"{where}.addr")
    mask = _pick(entry, where, *mask_names, required=False)
    return addr, parse_int(mask if mask is not None else 0,
                           f"{where}.mask"), None, None


def _located(where: str, err: ValueError) -> PolicyError:
    message = str(err)
    if not message.startswith(where):
        message = f"{where}: {message}"
    return PolicyError(message)


def parse_policies(data: dict) -> PolicySource:
    """
    Builds policies from the JSON structure of a policy file.

    Args:
        data (dict): Decoded policy file.

    Raises:
        PolicyError: On missing fields or malformed values.

    Returns:
        PolicySource: Parsed entries in file order.
    """
    if not isinstance(data, dict):
        raise PolicyError("policy file must hold a JSON object")
    unknown = set(data) - {"apu", "dpu", "comment"}
    if unknown:
        raise PolicyError(f"unknown policy sections: {sorted(unknown)}")
    source = PolicySource()
    for index, entry in enumerate(data.get("apu", [])):
        where = f"apu[{index}]"
        try:
            master = parse_int(_pick(entry, where, "master", "apumid"),
                               f"{where}.master")
            addr, mask, encoding, span = _scope(
                entry, where, ("addr", "apuaddr"), ("mask", "apumask"))
            perm = Permission.from_text(_pick(entry, where, "perm", "apuperm"))
            policy = ApuPolicy(master, addr, mask, perm)
        except ValueError as err:
            raise _located(where, err) from err
        source.apu.append(PolicyEntry("apu", index, policy, encoding, span))
    for index, entry in enumerate(data.get("dpu", [])):
        where = f"dpu[{index}]"
        try:
            master = parse_int(_pick(entry, where, "master", "dpumid"),
                               f"{where}.master")
            addr, amask, encoding, span = _scope(
                entry, where, ("addr", "dpuaddr"), ("amask", "dpuamask"))
            wdata = parse_int(_pick(entry, where, "data", "dpudata"),
                              f"{where}.data")
            dmask = _pick(entry, where, "dmask", "dpudmask", "dpumask",
                          required=False)
            policy = DpuPolicy(master, addr, amask, wdata,
                               parse_int(dmask if dmask is not None else 0,
                                         f"{where}.dmask"))
        except ValueError as err:
            raise _located(where, err) from err
        source.dpu.append(PolicyEntry("dpu", index, policy, encoding, span))
    return source


def load_policy_file(path: str) -> PolicySource:
    with open(path, "r", encoding="utf-8") as policy_file:
        try:
            data = json.load(policy_file)
        except json.JSONDecodeError as err:
            raise PolicyError(f"{path}: {err}") from err
    return parse_policies(data)


def scope_subset(inner: PolicyEntry, outer: PolicyEntry,
                 mode: MatchMode) -> bool:
    """Whether every address of `inner`'s scope lies in `outer`'s."""
    if mode is MatchMode.MASKED_EQUALITY:
        keep = ~outer.mask & WORD_MASK
        return inner.mask & keep == 0 and \
            (inner.addr & keep) == (outer.addr & keep)
    (i_start, i_end), (o_start, o_end) = inner.scope, outer.scope
    return o_start <= i_start and i_end <= o_end


def target_slave(entry: PolicyEntry, config: SystemConfig) -> Optional[int]:
    """Slave whose PRS houses the entry: the one decoding its start."""
    region = config.memory_map.region_for(entry.scope[0])
    return None if region is None else region.slave_id


def validate(source: PolicySource, config: SystemConfig,
             mode: Optional[MatchMode] = None) -> List[Diagnostic]:
    """
    Checks a parsed policy file against the system.

    Args:
        source (PolicySource): Parsed policies.
        config (SystemConfig): Target system.
        mode (MatchMode, optional): Overrides `config.match_mode`.

    Returns:
        List[Diagnostic]: Errors block compilation, warnings do not.
    """
    mode = mode or config.match_mode
    memory_map = config.memory_map
    diags: List[Diagnostic] = []

    def report(level, entry, message):
        diags.append(Diagnostic(level, entry.where, message))

    counts: Dict[Tuple[int, str], int] = {}
    for entry in source.entries:
        if not config.is_core(entry.master):
            report("error", entry, f"unknown master {entry.master:#x}")
        start, end = entry.scope
        if entry.section == "apu":
            first = memory_map.region_for(start)
            last = memory_map.region_for(end)
            if first is None or last is None:
                report("error", entry, f"scope {format_hex(start)}.."
                       f"{format_hex(end)} lies outside the memory map")
            elif first.slave_id != last.slave_id:
                report("error", entry, f"scope spans slaves "
                       f"{first.slave_id} and {last.slave_id}")
        else:
            if memory_map.region_for(start) is None:
                report("error", entry, f"scope start {format_hex(start)} "
                       "lies outside the memory map")
            touched = memory_map.intersecting(start, end)
            if len(touched) > 1:
                report("error", entry, "scope spans slaves " + " and ".join(
                    str(r.slave_id) for r in touched))
            if entry.policy.dpudmask == WORD_MASK:
                report("warning", entry, "empty data constraint: dmask is "
                       "all ones, every write in scope is denied")
        encoding = entry.encoding
        if encoding is not None and not encoding.exact:
            # Widening an allow-list grants access; widening a deny-list
            # only blocks more.
            level = "error" if entry.section == "apu" else "warning"
            report(level, entry, "range is not representable as "
                   f"(addr, mask); covering pair {format_hex(encoding.addr)}/"
                   f"{format_hex(encoding.mask)} adds "
                   f"{encoding.over_coverage} addresses")
        elif not is_low_run(entry.mask):
            report("warning", entry, "meaning depends on match mode: masked "
                   f"set has {masked_members(entry.mask)} addresses, "
                   f"interval has {end - start + 1}")
        slave = target_slave(entry, config)
        if slave is not None:
            key = (slave, entry.section)
            counts[key] = counts.get(key, 0) + 1

    for (slave, section), count in sorted(counts.items()):
        capacity = config.apu_capacity if section == "apu" \
            else config.dpu_capacity
        if count > capacity:
            diags.append(Diagnostic("error", f"{section}[*]",
                                    f"capacity exceeded for slave {slave}: "
                                    f"{count} > {capacity}"))

    for entries in (source.apu, source.dpu):
        for j, later in enumerate(entries):
            for earlier in entries[:j]:
                if later.policy == earlier.policy:
                    report("warning", later,
                           f"duplicate of {earlier.where}")
                    break
    for i, inner in enumerate(source.apu):
        for j, outer in enumerate(source.apu):
            if i == j or inner.policy == outer.policy:
                continue
            if inner.master != outer.master:
                continue
            if not inner.policy.apuperm.weaker_or_equal(outer.policy.apuperm):
                continue
            if scope_subset(inner, outer, mode):
                # Two identical scopes shadow each other; name only one.
                if scope_subset(outer, inner, mode) and \
                        inner.policy.apuperm is outer.policy.apuperm and j > i:
                    continue
                report("warning", inner, f"shadowed by {outer.where}")
                break
    return diags


AGREEMENT_SAMPLES = 4096


def _sample_addresses(start: int, end: int) -> np.ndarray:
    """The whole neighbourhood of a small range; edges plus an even spread
    of a large one."""
    low, high = max(start - 1, 0), min(end + 1, WORD_MASK)
    if high - low < AGREEMENT_SAMPLES:
        return np.arange(low, high + 1, dtype=np.int64)
    edges = [low, start, start + 1, end - 1, end, high]
    spread = np.linspace(start, end, AGREEMENT_SAMPLES, dtype=np.int64)
    return np.unique(np.concatenate([np.array(edges, dtype=np.int64),
                                     spread]))


def check_agreement(source: PolicySource,
                    mode: MatchMode) -> List[Diagnostic]:
    """
    Evaluates every range-written policy with the engine and compares the
    result with the range it was written as.

    Only entries whose encoding claims to be exact under `mode` are checked;
    the others already carry a validation diagnostic.

    Args:
        source (PolicySource): Parsed policies.
        mode (MatchMode): Match mode the images will run under.

    Returns:
        List[Diagnostic]: One warning per entry the engine disagrees with.
    """
    diags = []
    for entry in source.entries:
        encoding = entry.encoding
        if entry.source_range is None or encoding is None:
            continue
        if not (encoding.masked_exact if mode is MatchMode.MASKED_EQUALITY
                else encoding.exact):
            continue
        start, end = entry.source_range
        addrs = _sample_addresses(start, end)
        policy = entry.policy
        if isinstance(policy, ApuPolicy):
            kind = next(k for k in AccessKind if policy.apuperm.allows(k))
            got = apu_check_array(PolicyRegisterSpace([policy]),
                                  policy.apumid, addrs, kind, mode)
        else:
            got = dpu_check_array(PolicyRegisterSpace(dpu_policies=[policy]),
                                  policy.dpumid, addrs, policy.dpudata, mode)
        wrong = np.count_nonzero(got != ((addrs >= start) & (addrs <= end)))
        if wrong:
            diags.append(Diagnostic(
                "warning", entry.where,
                f"compiled scope {format_hex(entry.addr)}/"
                f"{format_hex(entry.mask)} disagrees with range "
                f"{format_hex(start)}..{format_hex(end)} on {wrong} of "
                f"{addrs.size} sampled addresses"))
    return diags


def compile_to_prs(source: PolicySource, config: SystemConfig,
                   mode: Optional[MatchMode] = None
                   ) -> Dict[int, PolicyRegisterSpace]:
    """
    Partitions validated policies into one PRS per slave, in file order.
    Validation warnings and `check_agreement` findings are logged.

    Args:
        source (PolicySource): Parsed policies.
        config (SystemConfig): Target system.
        mode (MatchMode, optional): Overrides `config.match_mode`.

    Raises:
        PolicyError: If validation reports any error.

    Returns:
        Dict[int, PolicyRegisterSpace]: Every slave of the memory map,
            empty register spaces included.
    """
    diags = validate(source, config, mode)
    errors = [d for d in diags if d.is_error]
    if errors:
        raise PolicyError("; ".join(str(d) for d in errors))
    for diag in diags + check_agreement(source, mode or config.match_mode):
        logger.warning("%s", diag)
    apu: Dict[int, list] = {r.slave_id: [] for r in config.memory_map}
    dpu: Dict[int, list] = {r.slave_id: [] for r in config.memory_map}
    for entry in source.apu:
        apu[target_slave(entry, config)].append(entry.policy)
    for entry in source.dpu:
        dpu[target_slave(entry, config)].append(entry.policy)
    return {slave: PolicyRegisterSpace(apu[slave], dpu[slave],
                                       config.apu_capacity,
                                       config.dpu_capacity, slave)
            for slave in apu}


def prs_to_dict(prs: PolicyRegisterSpace) -> dict:
    """Structural PRS image; register encodings are not bit-packed."""
    return {
        "slave": prs.slave,
        "apu": [{"apumid": p.apumid, "apuaddr": format_hex(p.apuaddr),
                 "apumask": format_hex(p.apumask),
                 "apuperm": p.apuperm.value} for p in prs.apu_policies],
        "dpu": [{"dpumid": p.dpumid, "dpuaddr": format_hex(p.dpuaddr),
                 "dpuamask": format_hex(p.dpuamask),
                 "dpudata": format_hex(p.dpudata),
                 "dpudmask": format_hex(p.dpudmask)}
                for p in prs.dpu_policies],
    }


def prs_from_dict(data: dict, config: SystemConfig) -> PolicyRegisterSpace:
    slave = parse_int(data["slave"], "slave")
    try:
        apu = [ApuPolicy(parse_int(p["apumid"]), parse_int(p["apuaddr"]),
                         parse_int(p["apumask"]),
                         Permission.from_text(p["apuperm"]))
               for p in data.get("apu", [])]
        dpu = [DpuPolicy(parse_int(p["dpumid"]), parse_int(p["dpuaddr"]),
                         parse_int(p["dpuamask"]), parse_int(p["dpudata"]),
                         parse_int(p["dpudmask"]))
               for p in data.get("dpu", [])]
    except KeyError as err:
        raise PolicyError(f"PRS image of slave {slave}: missing {err}") \
            from err
    return PolicyRegisterSpace(apu, dpu, config.apu_capacity,
                               config.dpu_capacity, slave)


def images_to_json(images: Dict[int, PolicyRegisterSpace],
                   config: SystemConfig) -> str:
    """Byte-stable JSON document holding the config and every PRS image."""
    document = {"config": config.to_dict(),
                "prs": [prs_to_dict(images[s]) for s in sorted(images)]}
    return json.dumps(document, indent=2) + "\n"
