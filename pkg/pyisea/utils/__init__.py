# -*- coding: utf-8 -*-
"""
Author: PyISEA Team
================================
"""

from .numbers import parse_int, format_hex
from .pickle_utils import save_system_with_pickle, load_system_with_pickle

__all__ = [
    # Functions
    "parse_int",
    "format_hex",
    "save_system_with_pickle",
    "load_system_with_pickle"
]
