# -*- coding: utf-8 -*-
"""
Author: PyISEA Team
================================
Hamming(12,8) code protecting every shared-memory byte with four parity bits.

Codeword positions run from 1 to 12. Parity bits sit at the power-of-two
positions 1, 2, 4 and 8; the data bits d0..d7 fill positions 3, 5, 6, 7, 9,
10, 11 and 12 in that order. Parity is even. The 4-bit parity value packs
p1, p2, p4, p8 into bits 0..3.

The code has distance 3: it either corrects one flipped bit or detects up to
two, never both at once.
"""
import enum
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

DATA_POSITIONS = (3, 5, 6, 7, 9, 10, 11, 12)
PARITY_POSITIONS = (1, 2, 4, 8)
CODEWORD_BITS = 12


class EccMode(enum.Enum):
    DETECT_DOUBLE = "detect_double"
    CORRECT_SINGLE = "correct_single"

    @classmethod
    def from_text(cls, text: str) -> "EccMode":
        key = str(text).strip().lower().replace("-", "_")
        for mode in cls:
            if key in (mode.value, mode.name.lower()):
                return mode
        raise ValueError(f"Unknown ECC mode {text!r}.")


class EccStatus(enum.Enum):
    CLEAN = "Clean"
    CORRECTED = "Corrected"
    FAULT = "Fault"


@dataclass(frozen=True)
class EccResult:
    status: EccStatus
    byte: Optional[int] = None


def _syndrome_table() -> np.ndarray:
    # Syndrome contribution of each data bit: its codeword position.
    return np.array(DATA_POSITIONS, dtype=np.uint8)


def ecc_encode(b: int) -> int:
    """
    Returns the 4-bit Hamming parity of a byte.

    Args:
        b (int): Data byte.

    Returns:
        int: p1 | p2 << 1 | p4 << 2 | p8 << 3.
    """
    parity = 0
    for i, pos in enumerate(DATA_POSITIONS):
        if (b >> i) & 1:
            parity ^= pos
    # XOR of the data positions with a set bit is exactly the parity vector.
    return parity & 0xF


def ecc_syndrome(b: int, parity: int) -> int:
    """Position (1..15) of the disagreement, 0 when the codeword is clean."""
    return ecc_encode(b) ^ (parity & 0xF)


def ecc_check(b: int, parity: int,
              mode: EccMode = EccMode.DETECT_DOUBLE) -> EccResult:
    """
    Validates a byte against its stored parity.

    Args:
        b (int): Data byte read from the shared memory.
        parity (int): 4-bit parity from the control memory.
        mode (EccMode, optional): Correct single errors or only detect.
            Defaults to EccMode.DETECT_DOUBLE.

    Returns:
        EccResult: CLEAN, CORRECTED with the repaired byte, or FAULT.
    """
    syndrome = ecc_syndrome(b, parity)
    if syndrome == 0:
        return EccResult(EccStatus.CLEAN, b)
    if mode is EccMode.DETECT_DOUBLE or syndrome > CODEWORD_BITS:
        return EccResult(EccStatus.FAULT)
    if syndrome in DATA_POSITIONS:
        b ^= 1 << DATA_POSITIONS.index(syndrome)
    # A flipped parity bit leaves the data intact.
    return EccResult(EccStatus.CORRECTED, b)


def codeword(b: int, parity: int) -> int:
    """12-bit codeword, bit (position - 1) holds codeword position."""
    word = 0
    for i, pos in enumerate(DATA_POSITIONS):
        word |= ((b >> i) & 1) << (pos - 1)
    for i, pos in enumerate(PARITY_POSITIONS):
        word |= ((parity >> i) & 1) << (pos - 1)
    return word


def split_codeword(word: int) -> Tuple[int, int]:
    """Inverse of `codeword`."""
    b = 0
    parity = 0
    for i, pos in enumerate(DATA_POSITIONS):
        b |= ((word >> (pos - 1)) & 1) << i
    for i, pos in enumerate(PARITY_POSITIONS):
        parity |= ((word >> (pos - 1)) & 1) << i
    return b, parity


def flip_codeword(b: int, parity: int, *positions: int) -> Tuple[int, int]:
    """Flips codeword positions (1..12); fault-injection helper."""
    word = codeword(b, parity)
    for pos in positions:
        if not 1 <= pos <= CODEWORD_BITS:
            raise ValueError(f"codeword position {pos} outside 1..12")
        word ^= 1 << (pos - 1)
    return split_codeword(word)


def ecc_encode_array(data: np.ndarray) -> np.ndarray:
    """Vectorised `ecc_encode` over a uint8 array."""
    data = np.asarray(data, dtype=np.uint8)
    parity = np.zeros(data.shape, dtype=np.uint8)
    for i, pos in enumerate(_syndrome_table()):
        parity ^= ((data >> i) & 1) * pos
    return parity
