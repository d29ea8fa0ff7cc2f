# -*- coding: utf-8 -*-
"""
Author: PyISEA Team
================================
Memory image files: one word per line, "ADDRESS: WORD", both 8 hex digits,
absolute addresses. Blank lines and lines starting with '#' are skipped.
"""
import logging
import re
from typing import Iterable, List, Tuple

from pyisea.exceptions import ImageFormatError

logger = logging.getLogger(__name__)

_LINE = re.compile(r"^([0-9A-Fa-f]{8}):\s*([0-9A-Fa-f]{8})$")


def parse_image(lines: Iterable[str]) -> List[Tuple[int, int]]:
    """
    Parses memory image lines.

    Args:
        lines (Iterable[str]): Image text, line by line.

    Raises:
        ImageFormatError: On the first malformed line, with its number.

    Returns:
        List[Tuple[int, int]]: (address, word) pairs in file order.
    """
    words = []
    for number, line in enumerate(lines, start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        match = _LINE.match(text)
        if match is None:
            raise ImageFormatError(f"expected 'AAAAAAAA: WWWWWWWW', got "
                                   f"{text!r}", number)
        addr = int(match.group(1), 16)
        if addr % 4:
            raise ImageFormatError(f"address {addr:#010x} is not word "
                                   "aligned", number)
        words.append((addr, int(match.group(2), 16)))
    return words


def format_image(words: Iterable[Tuple[int, int]]) -> str:
    return "".join(f"{addr:08X}: {word:08X}\n" for addr, word in words)


def read_image_file(path: str) -> List[Tuple[int, int]]:
    with open(path, "r", encoding="utf-8") as image_file:
        words = parse_image(image_file)
    logger.info("read %d words from %s", len(words), path)
    return words


def write_image_file(path: str, words: Iterable[Tuple[int, int]]) -> None:
    with open(path, "w", encoding="utf-8") as image_file:
        image_file.write(format_image(words))
