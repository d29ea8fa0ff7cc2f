# -*- coding: utf-8 -*-
"""
Author: PyISEA Team
================================

Memory:
-------

    Shared-memory chiplets, the shared register space (SRS) and the optional
    memory-security feature: Hamming ECC kept in a separate, trusted control
    memory, with tainting of 64 B granules that fail validation.

    Available functions:
    ---------------------

        >>> pyisea.ecc_encode(0xA5)
        >>> pyisea.ecc_check(0xA5, parity, mode=EccMode.CORRECT_SINGLE)
        >>> pyisea.parse_image(lines)

    For further information, check the function specific documentation.
"""

from .ecc import EccMode, EccResult, EccStatus, ecc_check, ecc_encode, \
    ecc_encode_array, ecc_syndrome, flip_codeword
from .banks import BANK_SIZE, TAINT_GRANULE, EccControlMemory, MemorySlave, \
    SrsFile
from .image import format_image, parse_image, read_image_file, \
    write_image_file

__all__ = [
    # Functions
    'ecc_check',
    'ecc_encode',
    'ecc_encode_array',
    'ecc_syndrome',
    'flip_codeword',
    'format_image',
    'parse_image',
    'read_image_file',
    'write_image_file',
    # Classes
    'EccMode',
    'EccResult',
    'EccStatus',
    'EccControlMemory',
    'MemorySlave',
    'SrsFile',
    # Constants
    'BANK_SIZE',
    'TAINT_GRANULE']
