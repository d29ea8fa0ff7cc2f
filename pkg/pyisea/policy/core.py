# -*- coding: utf-8 -*-
"""
Author: PyISEA Team
================================
Here you will find everything related to evaluating APU and DPU policies.

All functions are pure: verdicts depend on their arguments only, so they can be
called from any number of workers at once.

APU policies form an allow-list (default deny), DPU policies a deny-list over
write data. Address scopes are derived with bit-wise operations only:

    start = ADDR AND NOT(MASK)
    end   = ADDR OR MASK

Two readings of a scope are supported, selected by `MatchMode`:

    MASKED_EQUALITY -> addr matches iff the bits outside MASK equal ADDR's.
    RANGE_INTERVAL  -> addr matches iff start <= addr <= end.

They agree whenever MASK is a contiguous run of low bits; they diverge for
non-contiguous masks such as 0x0F8B.
"""
import enum
from dataclasses import dataclass, field
from typing import Iterable, Tuple

import numpy as np

from pyisea.exceptions import CapacityError, PolicyError

WORD_MASK = 0xFFFFFFFF
SUPPORTED_CAPACITIES = (16, 32, 64, 128)


class AccessKind(enum.Enum):
    """HWRITE: LOW is a read transfer, HIGH a write transfer."""
    READ = "read"
    WRITE = "write"


class Permission(enum.Enum):
    """APUPERM values."""
    READ_ONLY = "ReadOnly"
    WRITE_ONLY = "WriteOnly"
    READ_WRITE = "ReadWrite"

    @classmethod
    def from_text(cls, text: str) -> "Permission":
        """Accepts 'ro'/'wo'/'rw', 'read-only'... or the enum value."""
        key = str(text).strip().lower().replace("-", "").replace("_", "")
        aliases = {
            "ro": cls.READ_ONLY, "r": cls.READ_ONLY, "readonly": cls.READ_ONLY,
            "wo": cls.WRITE_ONLY, "w": cls.WRITE_ONLY,
            "writeonly": cls.WRITE_ONLY,
            "rw": cls.READ_WRITE, "readwrite": cls.READ_WRITE,
        }
        if key not in aliases:
            raise PolicyError(f"Unknown permission {text!r}.")
        return aliases[key]

    def allows(self, kind: AccessKind) -> bool:
        if kind is AccessKind.READ:
            return self in (Permission.READ_ONLY, Permission.READ_WRITE)
        return self in (Permission.WRITE_ONLY, Permission.READ_WRITE)

    def weaker_or_equal(self, other: "Permission") -> bool:
        """True if every access this permission grants, `other` grants."""
        return self is other or other is Permission.READ_WRITE


class MatchMode(enum.Enum):
    """System-wide address-scope semantics, fixed for a run."""
    MASKED_EQUALITY = "masked"
    RANGE_INTERVAL = "range"

    @classmethod
    def from_text(cls, text: str) -> "MatchMode":
        key = str(text).strip().lower()
        for mode in cls:
            if key in (mode.value, mode.name.lower()):
                return mode
        raise ValueError(f"Unknown match mode {text!r}, "
                         "use 'masked' or 'range'.")


class ApuVerdict(enum.Enum):
    ALLOW = "Allow"
    DENY = "Deny"


class DpuVerdict(enum.Enum):
    FORWARD = "Forward"
    DENY = "Deny"


def _check_word(value: int, name: str) -> None:
    if not isinstance(value, int) or not 0 <= value <= WORD_MASK:
        raise PolicyError(f"{name}={value!r} is not a 32-bit value.")


@dataclass(frozen=True)
class ApuPolicy:
    """
    One APU PRS entry.

    Args:
        apumid (int): Master allowed to initiate the described request.
        apuaddr (int): 32-bit memory address.
        apumask (int): 32-bit address mask, no alignment assumed.
        apuperm (Permission): Read-only, write-only or read-write.
    """
    apumid: int
    apuaddr: int
    apumask: int
    apuperm: Permission

    def __post_init__(self):
        _check_word(self.apuaddr, "apuaddr")
        _check_word(self.apumask, "apumask")
        if not isinstance(self.apuperm, Permission):
            raise PolicyError(f"apuperm={self.apuperm!r} is not a Permission.")


@dataclass(frozen=True)
class DpuPolicy:
    """
    One DPU PRS entry.

    Args:
        dpumid (int): Master whose write transactions are verified.
        dpuaddr (int): Address where write permission is restricted.
        dpuamask (int): 32-bit address mask.
        dpudata (int): Write-restricted data value.
        dpudmask (int): 32-bit data mask; set bits are don't-care.
    """
    dpumid: int
    dpuaddr: int
    dpuamask: int
    dpudata: int
    dpudmask: int

    def __post_init__(self):
        for name in ("dpuaddr", "dpuamask", "dpudata", "dpudmask"):
            _check_word(getattr(self, name), name)


@dataclass(frozen=True)
class PolicyRegisterSpace:
    """
    Bounded, immutable policy storage of one TRANSMON.

    Installing new policies means building a new PRS and swapping it in, so a
    rejected install never leaves a half-written register space behind.
    """
    apu_policies: Tuple[ApuPolicy, ...] = ()
    dpu_policies: Tuple[DpuPolicy, ...] = ()
    apu_capacity: int = 16
    dpu_capacity: int = 16
    slave: int = field(default=-1, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "apu_policies", tuple(self.apu_policies))
        object.__setattr__(self, "dpu_policies", tuple(self.dpu_policies))
        for kind, count, capacity in (
                ("apu", len(self.apu_policies), self.apu_capacity),
                ("dpu", len(self.dpu_policies), self.dpu_capacity)):
            if capacity <= 0:
                raise PolicyError(f"{kind} capacity must be positive.")
            if count > capacity:
                raise CapacityError(
                    f"{count} {kind.upper()} policies exceed capacity "
                    f"{capacity} of slave {self.slave}.",
                    self.slave, kind, count, capacity)

    def without_master(self, master: int) -> "PolicyRegisterSpace":
        """Copy of this PRS with every APU policy of `master` removed."""
        kept = tuple(p for p in self.apu_policies if p.apumid != master)
        return PolicyRegisterSpace(kept, self.dpu_policies, self.apu_capacity,
                                   self.dpu_capacity, self.slave)

    def cleared(self) -> "PolicyRegisterSpace":
        return PolicyRegisterSpace((), (), self.apu_capacity,
                                   self.dpu_capacity, self.slave)


def scope_bounds(addr: int, mask: int) -> Tuple[int, int]:
    """Start and end address of an (address, mask) scope."""
    return addr & ~mask & WORD_MASK, (addr | mask) & WORD_MASK


def scope_match(addr: int, mask: int, query: int, mode: MatchMode) -> bool:
    """Whether `query` lies in the scope described by (addr, mask)."""
    if mode is MatchMode.MASKED_EQUALITY:
        keep = ~mask & WORD_MASK
        return (query & keep) == (addr & keep)
    start, end = scope_bounds(addr, mask)
    return start <= query <= end


def apu_range(policy: ApuPolicy) -> Tuple[int, int]:
    """
    Returns the start and end address of an APU policy.

    Args:
        policy (ApuPolicy): The policy.

    Returns:
        start (int): APUADDR AND NOT(APUMASK).
        end (int): APUADDR OR APUMASK.
    """
    return scope_bounds(policy.apuaddr, policy.apumask)


def apu_covers(policy: ApuPolicy, addr: int, mode: MatchMode) -> bool:
    """Address-only part of `apu_match`, ignoring master and permission."""
    return scope_match(policy.apuaddr, policy.apumask, addr, mode)


def apu_match(policy: ApuPolicy, master: int, addr: int, kind: AccessKind,
              mode: MatchMode) -> bool:
    """
    Returns whether one APU policy allows the request.

    Args:
        policy (ApuPolicy): The policy.
        master (int): Bus-assigned master ID.
        addr (int): 32-bit HADDR.
        kind (AccessKind): Read or write.
        mode (MatchMode): Scope semantics.

    Returns:
        bool: True if master, permission and address all match.
    """
    if master != policy.apumid:
        return False
    if not policy.apuperm.allows(kind):
        return False
    return apu_covers(policy, addr, mode)


def apu_check(prs: PolicyRegisterSpace, master: int, addr: int,
              kind: AccessKind, mode: MatchMode) -> ApuVerdict:
    """Allow iff any APU policy matches; an empty PRS denies everything."""
    for policy in prs.apu_policies:
        if apu_match(policy, master, addr, kind, mode):
            return ApuVerdict.ALLOW
    return ApuVerdict.DENY


def is_stray(prs: PolicyRegisterSpace, addr: int, mode: MatchMode) -> bool:
    """True if no APU policy of any master describes `addr` at all."""
    return not any(apu_covers(p, addr, mode) for p in prs.apu_policies)


def dpu_range(policy: DpuPolicy) -> Tuple[int, int]:
    """DPUADDR AND NOT(DPUAMASK), DPUADDR OR DPUAMASK."""
    return scope_bounds(policy.dpuaddr, policy.dpuamask)


def dpu_scope_match(policy: DpuPolicy, master: int, addr: int,
                    mode: MatchMode = MatchMode.MASKED_EQUALITY) -> bool:
    """Whether a write by `master` to `addr` falls under a DPU policy."""
    if master != policy.dpumid:
        return False
    return scope_match(policy.dpuaddr, policy.dpuamask, addr, mode)


def dpu_data_match(policy: DpuPolicy, wdata: int) -> bool:
    """Whether `wdata` equals the restricted value outside the don't-care
    bits of DPUDMASK."""
    keep = ~policy.dpudmask & WORD_MASK
    return (wdata & keep) == (policy.dpudata & keep)


def dpu_scoped(prs: PolicyRegisterSpace, master: int, addr: int,
               mode: MatchMode) -> bool:
    """True if any DPU policy's scope covers this master and address."""
    return any(dpu_scope_match(p, master, addr, mode)
               for p in prs.dpu_policies)


def dpu_check(prs: PolicyRegisterSpace, master: int, addr: int, wdata: int,
              mode: MatchMode) -> DpuVerdict:
    """
    Deny-list evaluation of a write's data phase.

    Args:
        prs (PolicyRegisterSpace): The TRANSMON's register space.
        master (int): Bus-assigned master ID.
        addr (int): 32-bit HADDR.
        wdata (int): HWDATA presented in the data phase.
        mode (MatchMode): Scope semantics.

    Returns:
        DpuVerdict: DENY iff some policy matches both scope and data.
    """
    for policy in prs.dpu_policies:
        if dpu_scope_match(policy, master, addr, mode) and \
                dpu_data_match(policy, wdata):
            return DpuVerdict.DENY
    return DpuVerdict.FORWARD


# Vectorised forms, used by the oracle suites and the compiler's agreement
# check. `addrs` is any integer numpy array.

def scope_match_array(addr: int, mask: int, addrs: np.ndarray,
                      mode: MatchMode) -> np.ndarray:
    addrs = np.asarray(addrs, dtype=np.int64)
    if mode is MatchMode.MASKED_EQUALITY:
        keep = ~mask & WORD_MASK
        return (addrs & keep) == (addr & keep)
    start, end = scope_bounds(addr, mask)
    return (addrs >= start) & (addrs <= end)


def apu_check_array(prs: PolicyRegisterSpace, master: int,
                    addrs: np.ndarray, kind: AccessKind,
                    mode: MatchMode) -> np.ndarray:
    """Boolean array, True where `apu_check` would Allow."""
    allowed = np.zeros(np.shape(addrs), dtype=bool)
    for policy in _policies_for(prs.apu_policies, master, kind):
        allowed |= scope_match_array(policy.apuaddr, policy.apumask, addrs,
                                     mode)
    return allowed


def dpu_check_array(prs: PolicyRegisterSpace, master: int,
                    addrs: np.ndarray, wdata: int,
                    mode: MatchMode) -> np.ndarray:
    """Boolean array, True where `dpu_check` would Deny."""
    denied = np.zeros(np.shape(addrs), dtype=bool)
    for policy in prs.dpu_policies:
        if policy.dpumid == master and dpu_data_match(policy, wdata):
            denied |= scope_match_array(policy.dpuaddr, policy.dpuamask,
                                        addrs, mode)
    return denied


def _policies_for(policies: Iterable[ApuPolicy], master: int,
                  kind: AccessKind):
    return [p for p in policies
            if p.apumid == master and p.apuperm.allows(kind)]
