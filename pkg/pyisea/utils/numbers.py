# -*- coding: utf-8 -*-
"""
Author: PyISEA Team
================================
Numeric field helpers shared by the config, policy and scenario readers.
"""
from typing import Union


def parse_int(value: Union[int, str], name: str = "value") -> int:
    """Reads an integer that may be written as decimal or with a 0x prefix.

    Underscores are accepted as digit separators, e.g. '0x4002_0000'.

    Args:
        value (Union[int, str]): The raw JSON value.
        name (str, optional): Field name used in the error message.
            Defaults to "value".

    Raises:
        ValueError: If the value is neither an int nor a parseable string.

    Returns:
        int: The parsed integer.
    """
    if isinstance(value, bool):
        raise ValueError(f"{name} must be an integer, got {value!r}")
    if isinstance(value, int):
        return value
    if isinstance(value, str):
        text = value.strip().replace("_", "")
        try:
            if text.lower().startswith(("0x", "-0x")):
                return int(text, 16)
            return int(text, 10)
        except ValueError:
            pass
    raise ValueError(f"{name} must be an integer or 0x-prefixed string, "
                     f"got {value!r}")


def format_hex(value: int, digits: int = 8) -> str:
    """0x-prefixed, zero padded, upper-case hex."""
    return f"0x{value:0{digits}X}"
