# -*- coding: utf-8 -*-
"""
Author: PyISEA Team
================================
Scenario scripts.

A scenario is a JSON file naming a system config, a policy file and memory
images, followed by an ordered stream of transfers per master and the
expectations to check once the run is over. Referenced files are resolved
relative to the script. Transfers are referred to by (master, index in that
master's stream), which stays stable when timing changes.
"""
import json
import logging
import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from pyisea.bus.transfer import BusRequest, Hresp
from pyisea.bus.transmon import Cause
from pyisea.config import SlaveKind, SystemConfig, load_config
from pyisea.exceptions import ImageFormatError, ScenarioError
from pyisea.memory.banks import SrsFile
from pyisea.memory.image import read_image_file
from pyisea.policy.compiler import PolicySource, load_policy_file, \
    parse_policies
from pyisea.policy.core import AccessKind, MatchMode
from pyisea.utils import parse_int

logger = logging.getLogger(__name__)

BUNDLED_DIR = os.path.join(os.path.dirname(os.path.dirname(
    os.path.abspath(__file__))), "scenarios")

_KEYS = {"name", "description", "config", "policies", "images", "match_mode",
         "cycle_limit", "masters", "expectations", "expect_memory",
         "expected_interrupts", "fault_injections", "dump",
         "expect_unreadable", "teardown"}


@dataclass(frozen=True)
class ScriptedTransfer:
    master: int
    index: int
    kind: AccessKind
    addr: int
    wdata: Optional[int] = None
    at_cycle: int = 0
    spoof_master_field: Optional[int] = None

    def request(self, offset: int = 0) -> BusRequest:
        """The bus request, with `at_cycle` shifted by `offset`."""
        return BusRequest(self.addr, self.kind, self.wdata,
                          self.spoof_master_field, offset + self.at_cycle)


@dataclass(frozen=True)
class Expectation:
    master: int
    index: int
    expected: Hresp
    expected_cause: Optional[Cause] = None
    expected_completion_cycle: Optional[int] = None
    expected_rdata: Optional[int] = None

    @property
    def ref(self) -> str:
        return f"master {self.master} #{self.index}"


@dataclass(frozen=True)
class FaultInjection:
    at_cycle: int
    slave: int
    offset: int
    bits: Tuple[int, ...]
    target: str = "data"


@dataclass
class ScenarioScript:
    """A parsed scenario, every referenced file already loaded."""
    name: str
    config: SystemConfig
    policies: PolicySource
    description: str = ""
    images: List[Tuple[str, List[Tuple[int, int]]]] = field(
        default_factory=list)
    masters: Dict[int, List[ScriptedTransfer]] = field(default_factory=dict)
    expectations: List[Expectation] = field(default_factory=list)
    expect_memory: List[Tuple[int, int]] = field(default_factory=list)
    expected_interrupts: Optional[int] = None
    fault_injections: List[FaultInjection] = field(default_factory=list)
    dump_regions: List[Tuple[int, int]] = field(default_factory=list)
    expect_unreadable: Optional[List[int]] = None
    teardown_regions: List[Tuple[int, int]] = field(default_factory=list)
    cycle_limit: Optional[int] = None
    match_mode: Optional[MatchMode] = None

    @property
    def transfers(self) -> List[ScriptedTransfer]:
        return [t for m in sorted(self.masters) for t in self.masters[m]]


def _int(value, where: str) -> int:
    try:
        return parse_int(value, where)
    except ValueError as err:
        raise ScenarioError(str(err), where) from err


def _addr(value, config: SystemConfig, where: str) -> int:
    """Numeric address or an SRS register name such as 'gpcfg39'."""
    if isinstance(value, str) and value.strip().lower().startswith("gpcfg"):
        srs = config.memory_map.find(SlaveKind.SRS)
        if not srs:
            raise ScenarioError("no SRS in the memory map", where)
        try:
            return srs[0].base + 4 * SrsFile.register_index(value)
        except ValueError as err:
            raise ScenarioError(str(err), where) from err
    return _int(value, where)


def _regions(entries, config: SystemConfig, where: str):
    regions = []
    for i, entry in enumerate(entries or []):
        here = f"{where}[{i}]"
        try:
            regions.append((_addr(entry["start"], config, here),
                            _int(entry["length"], here)))
        except (KeyError, TypeError) as err:
            raise ScenarioError(f"expected start and length ({err})",
                                here) from err
    return regions


def _memory_checks(entries, config: SystemConfig):
    checks = []
    for i, entry in enumerate(entries or []):
        here = f"expect_memory[{i}]"
        try:
            checks.append((_addr(entry["addr"], config, here),
                           _int(entry["value"], here)))
        except (KeyError, TypeError) as err:
            raise ScenarioError(f"expected addr and value ({err})",
                                here) from err
    return checks


def _path(base_dir: str, ref: str) -> str:
    return ref if os.path.isabs(ref) else os.path.join(base_dir, ref)


def _load_config(ref, base_dir: str) -> SystemConfig:
    if ref is None:
        return SystemConfig()
    if isinstance(ref, dict):
        return SystemConfig.from_dict(ref)
    return load_config(_path(base_dir, ref))


def _load_policies(ref, base_dir: str) -> PolicySource:
    if ref is None:
        return PolicySource()
    if isinstance(ref, dict):
        return parse_policies(ref)
    return load_policy_file(_path(base_dir, ref))


def _transfers(master: int, entries, config: SystemConfig):
    transfers = []
    for index, entry in enumerate(entries):
        where = f"masters.{master}[{index}]"
        if not isinstance(entry, dict):
            raise ScenarioError("transfer must be an object", where)
        try:
            kind = AccessKind(str(entry.get("kind", "")).lower())
        except ValueError:
            raise ScenarioError("kind must be 'read' or 'write'",
                                where) from None
        wdata = entry.get("wdata")
        if (wdata is None) == (kind is AccessKind.WRITE):
            raise ScenarioError("wdata is required for writes only", where)
        spoof = entry.get("spoof_master_field")
        transfers.append(ScriptedTransfer(
            master, index, kind, _addr(entry.get("addr"), config, where),
            None if wdata is None else _int(wdata, where),
            _int(entry.get("at_cycle", 0), where),
            None if spoof is None else _int(spoof, where)))
    return transfers


def _expectations(entries, masters) -> List[Expectation]:
    expectations = []
    seen = set()
    for i, entry in enumerate(entries or []):
        where = f"expectations[{i}]"
        master = _int(entry.get("master"), where)
        index = _int(entry.get("index", 0), where)
        if index >= len(masters.get(master, [])) or index < 0:
            raise ScenarioError(f"no transfer #{index} for master {master}",
                                where)
        if (master, index) in seen:
            raise ScenarioError(f"master {master} #{index} is expected twice",
                                where)
        seen.add((master, index))
        try:
            expected = Hresp(str(entry.get("expected", "")).upper())
            cause = entry.get("expected_cause")
            cause = None if cause is None else Cause.from_text(cause)
        except ValueError as err:
            raise ScenarioError(str(err), where) from err
        completion = entry.get("expected_completion_cycle")
        rdata = entry.get("expected_rdata")
        expectations.append(Expectation(
            master, index, expected, cause,
            None if completion is None else _int(completion, where),
            None if rdata is None else _int(rdata, where)))
    return expectations


def scenario_from_dict(data: dict, base_dir: str = ".",
                       name: Optional[str] = None) -> ScenarioScript:
    """
    Builds a scenario from decoded JSON.

    Args:
        data (dict): Decoded scenario script.
        base_dir (str, optional): Directory referenced files are relative
            to. Defaults to ".".
        name (str, optional): Fallback name when the script has none.

    Raises:
        ScenarioError: Malformed script or image, with its location.
        ConfigError, PolicyError: From the referenced files.

    Returns:
        ScenarioScript: The parsed scenario.
    """
    if not isinstance(data, dict):
        raise ScenarioError("scenario must be a JSON object")
    unknown = set(data) - _KEYS
    if unknown:
        raise ScenarioError(f"unknown keys {sorted(unknown)}")
    config = _load_config(data.get("config"), base_dir)
    policies = _load_policies(data.get("policies"), base_dir)
    images = []
    for ref in data.get("images", []):
        path = _path(base_dir, ref)
        try:
            images.append((path, read_image_file(path)))
        except ImageFormatError as err:
            raise ScenarioError(str(err), path) from err
    masters = {}
    for key, entries in (data.get("masters") or {}).items():
        master = _int(key, "masters")
        if master not in config.all_master_ids:
            raise ScenarioError(f"unknown master {master:#x}", "masters")
        masters[master] = _transfers(master, entries, config)
    faults = []
    for i, entry in enumerate(data.get("fault_injections", [])):
        where = f"fault_injections[{i}]"
        target = entry.get("target", "data")
        if target not in ("data", "parity"):
            raise ScenarioError("target must be 'data' or 'parity'", where)
        faults.append(FaultInjection(
            _int(entry.get("at_cycle", 0), where),
            _int(entry.get("slave"), where), _int(entry.get("offset"), where),
            tuple(_int(b, where) for b in entry.get("bits", [])), target))
    match_mode = data.get("match_mode")
    interrupts = data.get("expected_interrupts")
    limit = data.get("cycle_limit")
    unreadable = data.get("expect_unreadable")
    return ScenarioScript(
        name=data.get("name", name or "scenario"),
        config=config,
        policies=policies,
        description=data.get("description", ""),
        images=images,
        masters=masters,
        expectations=_expectations(data.get("expectations"), masters),
        expect_memory=_memory_checks(data.get("expect_memory"), config),
        expected_interrupts=None if interrupts is None
        else _int(interrupts, "expected_interrupts"),
        fault_injections=sorted(faults, key=lambda f: f.at_cycle),
        dump_regions=_regions(data.get("dump"), config, "dump"),
        expect_unreadable=None if unreadable is None
        else [_addr(a, config, "expect_unreadable") for a in unreadable],
        teardown_regions=_regions(data.get("teardown"), config, "teardown"),
        cycle_limit=None if limit is None else _int(limit, "cycle_limit"),
        match_mode=None if match_mode is None
        else MatchMode.from_text(match_mode))


def load_scenario(path: str) -> ScenarioScript:
    """Reads a scenario file, or a bundled scenario by name."""
    path = resolve_scenario(path)
    with open(path, "r", encoding="utf-8") as scenario_file:
        try:
            data = json.load(scenario_file)
        except json.JSONDecodeError as err:
            raise ScenarioError(f"line {err.lineno}: {err.msg}", path) \
                from err
    stem = os.path.splitext(os.path.basename(path))[0]
    logger.info("loaded scenario %s from %s", stem, path)
    return scenario_from_dict(data, os.path.dirname(os.path.abspath(path)),
                              stem)


def bundled_scenarios() -> List[str]:
    names = []
    for entry in sorted(os.listdir(BUNDLED_DIR)):
        stem, ext = os.path.splitext(entry)
        if ext == ".json" and "." not in stem and stem != "system":
            names.append(stem)
    return names


def resolve_scenario(ref: str) -> str:
    """A path as given when it exists, else the bundled scenario `ref`."""
    if os.path.exists(ref):
        return ref
    bundled = os.path.join(BUNDLED_DIR, ref + ".json")
    if os.path.exists(bundled):
        return bundled
    raise ScenarioError(f"no such scenario file or bundled scenario "
                        f"{ref!r}")
