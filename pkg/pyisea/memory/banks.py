# -*- coding: utf-8 -*-
"""
Author: PyISEA Team
================================
Storage behind the TRANSMONs: shared-memory chiplets built from 64 kB banks,
the interposer's shared register space, and the trusted ECC control memory.

Accesses reaching this module were already approved by a TRANSMON, so an
offset outside the slave is a simulator bug and raises IndexError.
"""
import logging
from typing import Iterable, List, Tuple

import numpy as np

from pyisea.memory.ecc import EccMode, EccStatus, ecc_check, \
    ecc_encode_array

logger = logging.getLogger(__name__)

BANK_SIZE = 64 * 1024
WORD_BYTES = 4
TAINT_GRANULE = 64
SRS_REGISTERS = 64


def _word_bytes(value: int) -> np.ndarray:
    return np.frombuffer((value & 0xFFFFFFFF).to_bytes(WORD_BYTES, "little"),
                         dtype=np.uint8)


def _word_value(raw: np.ndarray) -> int:
    return int.from_bytes(bytes(raw), "little")


class MemorySlave:
    """
    One shared-memory chiplet, zero-initialised, little-endian words.

    Args:
        slave_id (int): HSEL index.
        size (int): Bytes, a multiple of the 64 kB bank size when larger
            than one bank.
    """

    def __init__(self, slave_id: int, size: int):
        self.slave_id = slave_id
        self.size = size
        self.data = np.zeros(size, dtype=np.uint8)

    @property
    def banks(self) -> np.ndarray:
        """(banks, bank size) view onto the same storage."""
        bank = min(BANK_SIZE, self.size)
        return self.data.reshape(-1, bank)

    def _check(self, offset: int) -> None:
        if not 0 <= offset <= self.size - WORD_BYTES:
            raise IndexError(f"slave {self.slave_id}: word offset "
                             f"{offset:#x} outside {self.size:#x} bytes")

    def mem_read(self, offset: int) -> int:
        self._check(offset)
        return _word_value(self.data[offset:offset + WORD_BYTES])

    def mem_write(self, offset: int, wdata: int) -> None:
        self._check(offset)
        self.data[offset:offset + WORD_BYTES] = _word_bytes(wdata)

    def read_bytes(self, offset: int) -> np.ndarray:
        self._check(offset)
        return self.data[offset:offset + WORD_BYTES].copy()

    def clear(self, offset: int, length: int) -> None:
        self.data[offset:offset + length] = 0

    def flip_bits(self, offset: int, bits: Iterable[int]) -> None:
        """Simulator backdoor: flips data bits of the byte at `offset`."""
        for bit in bits:
            if not 0 <= bit < 8:
                raise ValueError(f"data bit {bit} outside 0..7")
            self.data[offset] ^= np.uint8(1 << bit)


class SrsFile:
    """
    Shared register space: 64 x 32-bit registers gpcfg0..gpcfg63.

    Args:
        slave_id (int): HSEL index.
        size (int, optional): Bytes. Defaults to 256.
    """

    def __init__(self, slave_id: int, size: int = SRS_REGISTERS * WORD_BYTES):
        self.slave_id = slave_id
        self.size = size
        self.registers = np.zeros(size // WORD_BYTES, dtype=np.uint32)

    @staticmethod
    def register_name(index: int) -> str:
        return f"gpcfg{index}"

    @staticmethod
    def register_index(name: str) -> int:
        """'gpcfg39' or 'gpcfg39_reg' -> 39."""
        text = name.strip().lower()
        if text.endswith("_reg"):
            text = text[:-4]
        if not text.startswith("gpcfg") or not text[5:].isdigit():
            raise ValueError(f"unknown SRS register {name!r}")
        index = int(text[5:])
        if not 0 <= index < SRS_REGISTERS:
            raise ValueError(f"SRS register index {index} outside 0..63")
        return index

    def _index(self, offset: int) -> int:
        if not 0 <= offset <= self.size - WORD_BYTES:
            raise IndexError(f"SRS offset {offset:#x} outside {self.size:#x}")
        return offset // WORD_BYTES

    def mem_read(self, offset: int) -> int:
        return int(self.registers[self._index(offset)])

    def mem_write(self, offset: int, wdata: int) -> None:
        self.registers[self._index(offset)] = wdata & 0xFFFFFFFF

    def clear(self, offset: int, length: int) -> None:
        first = offset // WORD_BYTES
        last = (offset + length + WORD_BYTES - 1) // WORD_BYTES
        self.registers[first:last] = 0


class EccControlMemory:
    """
    Trusted control memory holding one 4-bit Hamming parity per data byte,
    plus the set of tainted 64 B granules.

    Only the owning TRANSMON talks to this object; nothing on the bus can
    address it.

    Args:
        size (int): Bytes of the protected slave.
        mode (EccMode, optional): Defaults to EccMode.DETECT_DOUBLE.
    """

    def __init__(self, size: int, mode: EccMode = EccMode.DETECT_DOUBLE):
        self.size = size
        self.mode = mode
        # Zero data encodes to zero parity, so a fresh memory is consistent.
        self.parity = np.zeros(size, dtype=np.uint8)
        self.taint = set()

    @staticmethod
    def granule(offset: int) -> int:
        return offset // TAINT_GRANULE

    def record(self, offset: int, wdata: int) -> None:
        """Parity for an approved write, computed in the same cycle."""
        self.parity[offset:offset + WORD_BYTES] = \
            ecc_encode_array(_word_bytes(wdata))

    def validate(self, offset: int, raw: np.ndarray) -> Tuple[EccStatus, int]:
        """
        Checks the four bytes of a word read-out.

        Args:
            offset (int): Word offset in the slave.
            raw (np.ndarray): The four data bytes as stored.

        Returns:
            status (EccStatus): Worst status over the four bytes.
            value (int): The word, with single errors repaired in
                CORRECT_SINGLE mode.
        """
        fixed = raw.copy()
        status = EccStatus.CLEAN
        for i in range(WORD_BYTES):
            result = ecc_check(int(raw[i]), int(self.parity[offset + i]),
                               self.mode)
            if result.status is EccStatus.FAULT:
                return EccStatus.FAULT, 0
            if result.status is EccStatus.CORRECTED:
                status = EccStatus.CORRECTED
                fixed[i] = result.byte
        return status, _word_value(fixed)

    def taint_region(self, offset: int) -> None:
        granule = self.granule(offset)
        if granule not in self.taint:
            logger.warning("tainting granule %#x (offset %#x)",
                           granule * TAINT_GRANULE, offset)
        self.taint.add(granule)

    def is_tainted(self, offset: int) -> bool:
        """True if the word at `offset` overlaps a tainted granule."""
        return self.granule(offset) in self.taint or \
            self.granule(offset + WORD_BYTES - 1) in self.taint

    def tainted_granules(self) -> List[int]:
        return sorted(g * TAINT_GRANULE for g in self.taint)

    def clear(self, offset: int, length: int) -> None:
        self.parity[offset:offset + length] = 0
        first = self.granule(offset)
        last = self.granule(offset + length - 1)
        self.taint = {g for g in self.taint if not first <= g <= last}

    def flip_bits(self, offset: int, bits: Iterable[int]) -> None:
        """Simulator backdoor: flips parity bits of the byte at `offset`."""
        for bit in bits:
            if not 0 <= bit < 4:
                raise ValueError(f"parity bit {bit} outside 0..3")
            self.parity[offset] ^= np.uint8(1 << bit)
