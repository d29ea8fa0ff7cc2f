# -*- coding: utf-8 -*-
"""
Author: PyISEA Team
================================
System configuration: masters, privileged IDs, memory map, PRS capacities,
ECC and supervisor settings.
"""
import enum
import json
import logging
from dataclasses import dataclass, field, fields
from typing import Iterator, List, Optional, Tuple

from pyisea.exceptions import ConfigError
from pyisea.memory.ecc import EccMode
from pyisea.policy.core import SUPPORTED_CAPACITIES, MatchMode
from pyisea.utils import parse_int
import pyisea.utils.__classes_metadata as cm

logger = logging.getLogger(__name__)

MiB = 1 << 20


def _parse_bool(value, name: str) -> bool:
    """JSON true/false, or the strings "true" and "false" in any case."""
    if isinstance(value, bool):
        return value
    if isinstance(value, str) and value.strip().lower() in ("true", "false"):
        return value.strip().lower() == "true"
    raise ConfigError(f"{name}={value!r} is not a boolean")


class SlaveKind(enum.Enum):
    MEMORY = "memory"
    SRS = "srs"


@dataclass(frozen=True)
class MemoryRegion:
    """
    One slave region of the system address space.

    Args:
        slave_id (int): HSEL index.
        base (int): Base address, aligned to `size`.
        size (int): Region size in bytes, a power of two.
        kind (SlaveKind): Shared-memory chiplet or shared register space.
    """
    slave_id: int = field(metadata=dict(
        title=cm.slave_md[0], description=cm.slave_md[1]))
    base: int = field(metadata=dict(
        title=cm.base_md[0], description=cm.base_md[1]))
    size: int = field(metadata=dict(
        title=cm.size_md[0], description=cm.size_md[1]))
    kind: SlaveKind = field(default=SlaveKind.MEMORY, metadata=dict(
        title=cm.kind_md[0], description=cm.kind_md[1]))

    def __post_init__(self):
        if not isinstance(self.kind, SlaveKind):
            object.__setattr__(self, "kind", SlaveKind(str(self.kind).lower()))
        if self.size <= 0 or self.size & (self.size - 1):
            raise ConfigError(f"slave {self.slave_id}: size {self.size:#x} "
                              "is not a power of two")
        if self.base % self.size:
            raise ConfigError(f"slave {self.slave_id}: base {self.base:#x} "
                              f"not aligned to size {self.size:#x}")
        if self.end > 0xFFFFFFFF:
            raise ConfigError(f"slave {self.slave_id}: region exceeds 32 bits")

    @property
    def end(self) -> int:
        """Last address inside the region."""
        return self.base + self.size - 1

    def contains(self, addr: int) -> bool:
        return self.base <= addr <= self.end


class MemoryMap:
    """Ordered, non-overlapping set of slave regions."""

    def __init__(self, regions):
        self.regions: Tuple[MemoryRegion, ...] = tuple(
            sorted(regions, key=lambda r: r.slave_id))
        ids = [r.slave_id for r in self.regions]
        if len(set(ids)) != len(ids):
            raise ConfigError("duplicate slave IDs in memory map")
        by_base = sorted(self.regions, key=lambda r: r.base)
        for low, high in zip(by_base, by_base[1:]):
            if high.base <= low.end:
                raise ConfigError(f"slaves {low.slave_id} and {high.slave_id} "
                                  "overlap")
        self._by_id = {r.slave_id: r for r in self.regions}

    def __iter__(self) -> Iterator[MemoryRegion]:
        return iter(self.regions)

    def __len__(self) -> int:
        return len(self.regions)

    def __eq__(self, other) -> bool:
        return isinstance(other, MemoryMap) and self.regions == other.regions

    def __repr__(self) -> str:
        return f"MemoryMap({list(self.regions)!r})"

    def region(self, slave_id: int) -> MemoryRegion:
        return self._by_id[slave_id]

    def region_for(self, addr: int) -> Optional[MemoryRegion]:
        for region in self.regions:
            if region.contains(addr):
                return region
        return None

    def intersecting(self, start: int, end: int) -> List[MemoryRegion]:
        """Regions overlapping the closed interval [start, end]."""
        return [r for r in self.regions if r.base <= end and start <= r.end]

    def find(self, kind: SlaveKind) -> List[MemoryRegion]:
        return [r for r in self.regions if r.kind is kind]

    @classmethod
    def default(cls) -> "MemoryMap":
        return cls([
            MemoryRegion(0, 0x20000000, MiB),
            MemoryRegion(1, 0x40000000, MiB),
            MemoryRegion(2, 0x60000000, MiB),
            MemoryRegion(3, 0x80000000, MiB),
            MemoryRegion(4, 0x50000000, 256, SlaveKind.SRS),
        ])

    def to_list(self) -> list:
        return [{"slave": r.slave_id, "base": f"0x{r.base:08X}",
                 "size": f"0x{r.size:X}", "kind": r.kind.value}
                for r in self.regions]

    @classmethod
    def from_list(cls, entries) -> "MemoryMap":
        regions = []
        for i, entry in enumerate(entries):
            try:
                regions.append(MemoryRegion(
                    parse_int(entry["slave"], "slave"),
                    parse_int(entry["base"], "base"),
                    parse_int(entry["size"], "size"),
                    SlaveKind(str(entry.get("kind", "memory")).lower())))
            except (KeyError, ValueError) as err:
                if isinstance(err, ConfigError):
                    raise
                raise ConfigError(f"memory_map[{i}]: {err}") from err
        return cls(regions)


@dataclass
class SystemConfig:
    """
    Configuration of one simulated system.

    Core masters get the IDs 1..masters, where masters is
    chiplets * cores_per_chiplet. PROC-0 and the SI use reserved IDs.

    Args:
        chiplets (int, optional): Core chiplets. Defaults to 4.
        cores_per_chiplet (int, optional): Cores each. Defaults to 16.
        master_id_width (int, optional): HMASTER bits. Defaults to 8.
        proc0_id (int, optional): PROC-0 ID. Defaults to 0x00.
        si_id (int, optional): SI ID. Defaults to 0xFF.
        memory_map (MemoryMap, optional): Defaults to MemoryMap.default().
        apu_capacity (int, optional): Defaults to 16.
        dpu_capacity (int, optional): Defaults to 16.
        ecc_enabled (bool, optional): Defaults to False.
        ecc_mode (EccMode, optional): Defaults to EccMode.DETECT_DOUBLE.
        isolation_threshold (int, optional): Defaults to 3.
        match_mode (MatchMode, optional): Defaults to
            MatchMode.MASKED_EQUALITY.
        cycle_limit (int, optional): Defaults to 100000.

    Raises:
        ConfigError: On inconsistent settings.
    """
    chiplets: int = field(default=4, metadata=dict(
        title=cm.chiplets_md[0], description=cm.chiplets_md[1]))
    cores_per_chiplet: int = field(default=16, metadata=dict(
        title=cm.cores_md[0], description=cm.cores_md[1]))
    master_id_width: int = field(default=8, metadata=dict(
        title=cm.width_md[0], description=cm.width_md[1]))
    proc0_id: int = field(default=0x00, metadata=dict(
        title=cm.proc0_md[0], description=cm.proc0_md[1]))
    si_id: int = field(default=0xFF, metadata=dict(
        title=cm.si_md[0], description=cm.si_md[1]))
    memory_map: MemoryMap = field(default_factory=MemoryMap.default,
                                  metadata=dict(title=cm.map_md[0],
                                                description=cm.map_md[1]))
    apu_capacity: int = field(default=16, metadata=dict(
        title=cm.apu_cap_md[0], description=cm.apu_cap_md[1]))
    dpu_capacity: int = field(default=16, metadata=dict(
        title=cm.dpu_cap_md[0], description=cm.dpu_cap_md[1]))
    ecc_enabled: bool = field(default=False, metadata=dict(
        title=cm.ecc_en_md[0], description=cm.ecc_en_md[1]))
    ecc_mode: EccMode = field(default=EccMode.DETECT_DOUBLE, metadata=dict(
        title=cm.ecc_mode_md[0], description=cm.ecc_mode_md[1]))
    isolation_threshold: int = field(default=3, metadata=dict(
        title=cm.iso_md[0], description=cm.iso_md[1]))
    match_mode: MatchMode = field(default=MatchMode.MASKED_EQUALITY,
                                  metadata=dict(title=cm.match_md[0],
                                                description=cm.match_md[1]))
    cycle_limit: int = field(default=100000, metadata=dict(
        title=cm.limit_md[0], description=cm.limit_md[1]))

    def __post_init__(self):
        if not isinstance(self.match_mode, MatchMode):
            self.match_mode = MatchMode.from_text(self.match_mode)
        if not isinstance(self.ecc_mode, EccMode):
            self.ecc_mode = EccMode.from_text(self.ecc_mode)
        if not isinstance(self.memory_map, MemoryMap):
            self.memory_map = MemoryMap.from_list(self.memory_map)
        if self.chiplets <= 0 or self.cores_per_chiplet <= 0:
            raise ConfigError(
                "chiplets and cores_per_chiplet must be positive")
        for name in ("apu_capacity", "dpu_capacity"):
            if getattr(self, name) not in SUPPORTED_CAPACITIES:
                raise ConfigError(f"{name} must be one of "
                                  f"{SUPPORTED_CAPACITIES}")
        if self.isolation_threshold < 0:
            raise ConfigError("isolation_threshold must not be negative")
        if self.cycle_limit <= 0:
            raise ConfigError("cycle_limit must be positive")
        self.masters = self.chiplets * self.cores_per_chiplet
        id_limit = 1 << self.master_id_width
        if self.masters >= id_limit - 1:
            raise ConfigError(f"{self.masters} cores do not fit "
                              f"{self.master_id_width}-bit master IDs")
        for name in ("proc0_id", "si_id"):
            value = getattr(self, name)
            if not 0 <= value < id_limit:
                raise ConfigError(f"{name}={value:#x} exceeds "
                                  f"{self.master_id_width}-bit master IDs")
            if 1 <= value <= self.masters:
                raise ConfigError(f"{name}={value:#x} collides with a core ID")
        if self.proc0_id == self.si_id:
            raise ConfigError("proc0_id and si_id must differ")
        self.core_ids = tuple(range(1, self.masters + 1))
        self.privileged_ids = (self.proc0_id, self.si_id)
        self.all_master_ids = tuple(sorted(self.core_ids
                                           + self.privileged_ids))

    def is_privileged(self, master: int) -> bool:
        return master in self.privileged_ids

    def is_core(self, master: int) -> bool:
        return 1 <= master <= self.masters

    def chiplet_of(self, master: int) -> Optional[int]:
        """Chiplet hosting a core, None for interposer masters."""
        if not self.is_core(master):
            return None
        return (master - 1) // self.cores_per_chiplet

    def to_dict(self) -> dict:
        data = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, MemoryMap):
                value = value.to_list()
            elif isinstance(value, enum.Enum):
                value = value.value
            data[f.name] = value
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "SystemConfig":
        """Builds a config from JSON data, numeric fields may be 0x strings."""
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        kwargs = {}
        for name, value in data.items():
            if name == "memory_map":
                kwargs[name] = MemoryMap.from_list(value)
            elif name in ("match_mode", "ecc_mode"):
                kwargs[name] = value
            elif name == "ecc_enabled":
                kwargs[name] = _parse_bool(value, name)
            else:
                try:
                    kwargs[name] = parse_int(value, name)
                except ValueError as err:
                    raise ConfigError(str(err)) from err
        try:
            return cls(**kwargs)
        except ValueError as err:
            if isinstance(err, ConfigError):
                raise
            raise ConfigError(str(err)) from err

    def __repr__(self) -> str:
        return (f"SystemConfig(masters={self.masters}, "
                f"organization={self.chiplets}x{self.cores_per_chiplet}, "
                f"capacity={self.apu_capacity}/{self.dpu_capacity}, "
                f"match_mode={self.match_mode.value})")


def load_config(path: str) -> SystemConfig:
    """
    Reads a JSON system configuration file.

    Args:
        path (str): File path.

    Raises:
        ConfigError: If the file is not valid JSON or the settings are
            inconsistent.

    Returns:
        SystemConfig: The configuration.
    """
    with open(path, "r", encoding="utf-8") as config_file:
        try:
            data = json.load(config_file)
        except json.JSONDecodeError as err:
            raise ConfigError(f"{path}: {err}") from err
    config = SystemConfig.from_dict(data)
    logger.info("loaded %r from %s", config, path)
    return config

