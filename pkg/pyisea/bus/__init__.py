# -*- coding: utf-8 -*-
"""
Author: PyISEA Team
================================

Bus:
-------

    The interposer's AHB-Lite-style interconnect and the TRANSMONs guarding
    every slave.

    Available functions:
    ---------------------

        >>> pyisea.decode(0x40020070, memory_map)
        >>> pyisea.arbitrate({1, 2}, last_grant=1)

    For further information, check the function specific documentation.
"""

from .transfer import BusRequest, BusResponse, BusTransaction, Hresp, \
    PendingTransfer
from .transmon import AddressVerdict, Cause, DataVerdict, InterruptLine, \
    InterruptRecord, Report, SafEntry, SecurityEvent, Transmon
from .fabric import BusFabric, BusInterface, arbitrate, decode

__all__ = [
    # Functions
    'arbitrate',
    'decode',
    # Classes
    'AddressVerdict',
    'BusFabric',
    'BusInterface',
    'BusRequest',
    'BusResponse',
    'BusTransaction',
    'Cause',
    'DataVerdict',
    'Hresp',
    'InterruptLine',
    'InterruptRecord',
    'PendingTransfer',
    'Report',
    'SafEntry',
    'SecurityEvent',
    'Transmon']
