# -*- coding: utf-8 -*-
"""
Author: PyISEA Team
================================
Transfer records of the AHB-Lite-style fabric: what a master asks for, what
actually travels on the bus, and what comes back.
"""
import enum
from dataclasses import dataclass
from typing import Optional, Tuple

from pyisea.policy.core import WORD_MASK, AccessKind


class Hresp(enum.Enum):
    OKAY = "OKAY"
    ERROR = "ERROR"


@dataclass(frozen=True)
class BusRequest:
    """
    A transfer as the issuing script describes it.

    Args:
        addr (int): Requested HADDR.
        kind (AccessKind): Read or write.
        wdata (int, optional): Write data, required for writes only.
        requested_master_field (int, optional): The ID the script claims.
            None means an honest request. Recorded in the trace, never
            driven onto the bus.
        issue_cycle (int, optional): Earliest cycle for the address phase.
            Defaults to 0.
    """
    addr: int
    kind: AccessKind
    wdata: Optional[int] = None
    requested_master_field: Optional[int] = None
    issue_cycle: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", AccessKind(self.kind))
        if not 0 <= self.addr <= WORD_MASK:
            raise ValueError(f"addr {self.addr:#x} is not a 32-bit address")
        if (self.wdata is None) == (self.kind is AccessKind.WRITE):
            raise ValueError("wdata must be given for writes and only for "
                             "writes")
        if self.wdata is not None and not 0 <= self.wdata <= WORD_MASK:
            raise ValueError(f"wdata {self.wdata:#x} is not a 32-bit word")

    @classmethod
    def read(cls, addr: int, **kwargs) -> "BusRequest":
        return cls(addr, AccessKind.READ, **kwargs)

    @classmethod
    def write(cls, addr: int, wdata: int, **kwargs) -> "BusRequest":
        return cls(addr, AccessKind.WRITE, wdata, **kwargs)


@dataclass
class BusTransaction:
    """
    A granted transfer. `master` is the hard-coded ID of the bus interface
    the request came through; `slave` is None for a decode miss.
    """
    tid: int
    master: int
    slave: Optional[int]
    addr: int
    offset: int
    kind: AccessKind
    wdata: Optional[int]
    address_phase_cycle: int
    data_phase_cycle: int

    @property
    def is_write(self) -> bool:
        return self.kind is AccessKind.WRITE


@dataclass(frozen=True)
class BusResponse:
    tid: int
    master: int
    hresp: Hresp
    rdata: Optional[int]
    completion_cycle: int

    @property
    def ok(self) -> bool:
        return self.hresp is Hresp.OKAY

    def bus_view(self) -> Tuple[str, Optional[int]]:
        """What a master can observe on HRESP/HRDATA."""
        return self.hresp.value, self.rdata


class PendingTransfer:
    """
    Handle returned by `BusInterface.issue`; filled in by the fabric as the
    transfer is granted and completed.
    """

    def __init__(self, port: int, request: BusRequest, index: int):
        self.port = port
        self.request = request
        self.index = index
        self.transaction: Optional[BusTransaction] = None
        self.response: Optional[BusResponse] = None
        self.cause = None
        self.eligible_cycle: Optional[int] = None

    @property
    def done(self) -> bool:
        return self.response is not None

    @property
    def service_latency(self) -> Optional[int]:
        if self.response is None or self.transaction is None:
            return None
        return self.response.completion_cycle - \
            self.transaction.address_phase_cycle

    @property
    def arbitration_wait(self) -> Optional[int]:
        """Cycles between becoming eligible and the address phase."""
        if self.transaction is None or self.eligible_cycle is None:
            return None
        return self.transaction.address_phase_cycle - self.eligible_cycle

    @property
    def turnaround(self) -> Optional[int]:
        """Cycles from becoming eligible to the response, as the master
        sees them."""
        if self.response is None or self.eligible_cycle is None:
            return None
        return self.response.completion_cycle - self.eligible_cycle

    def __repr__(self) -> str:
        state = self.response.hresp.value if self.response else "pending"
        return (f"PendingTransfer(port={self.port}, index={self.index}, "
                f"{self.request.kind.value} {self.request.addr:#010x}, "
                f"{state})")
