# -*- coding: utf-8 -*-
"""
PYISEA
======

Author:
    PyISEA Team
PyISEA:
    A cycle-stepped simulator of an active interposer acting as the root of
    trust of a 2.5D chiplet system. Every slave on the interposer's bus is
    guarded by a transaction monitor (TRANSMON) that checks address
    policies in the address phase, data policies in the data phase, drops
    whatever is denied and reports it to the trusted supervisor core.
    In order to provide such functionalities we require a few packages
    to be installed:
    - Numpy

    You can find out everything available reading the submodules documentation


For further information, check the specific module, class, method or function
documentation.
"""

from pyisea.version import __author__, __date__, __version__
from pyisea.exceptions import CapacityError, ConfigError, ImageFormatError, \
    PolicyError, PrivilegeError, ScenarioError
from pyisea.config import MemoryMap, MemoryRegion, SlaveKind, SystemConfig, \
    load_config
from pyisea.policy import AccessKind, ApuPolicy, DpuPolicy, MatchMode, \
    Permission, PolicyRegisterSpace, apu_check, apu_check_array, apu_range, \
    dpu_check, dpu_check_array, dpu_range, dpu_scoped, scope_match
from pyisea.policy.compiler import Diagnostic, PolicySource, \
    check_agreement, compile_to_prs, load_policy_file, parse_policies, \
    range_to_addr_mask, validate
from pyisea.memory import EccMode, EccStatus, ecc_check, ecc_encode, \
    parse_image, read_image_file
from pyisea.bus import BusRequest, BusResponse, Cause, Hresp, \
    SecurityEvent, arbitrate, decode
from pyisea.supervisor import IsolateMaster, Supervisor, ViolationLedger
from pyisea.system import System
from pyisea.scenario import FuzzReport, ScenarioScript, emit_trace, fuzz, \
    load_scenario, run_scenario
from pyisea.utils import load_system_with_pickle, save_system_with_pickle

# Just to prevent "unused" warnings.
assert __author__ and __date__ and __version__

# package submodules and scripts to be called as pyisea.something
__all__ = [
    # Functions
    'apu_check',
    'apu_check_array',
    'apu_range',
    'arbitrate',
    'check_agreement',
    'compile_to_prs',
    'decode',
    'dpu_check',
    'dpu_check_array',
    'dpu_range',
    'dpu_scoped',
    'ecc_check',
    'ecc_encode',
    'emit_trace',
    'fuzz',
    'load_config',
    'load_policy_file',
    'load_scenario',
    'load_system_with_pickle',
    'parse_image',
    'parse_policies',
    'range_to_addr_mask',
    'read_image_file',
    'run_scenario',
    'save_system_with_pickle',
    'scope_match',
    'validate',
    # Classes
    'AccessKind',
    'ApuPolicy',
    'BusRequest',
    'BusResponse',
    'CapacityError',
    'Cause',
    'ConfigError',
    'Diagnostic',
    'DpuPolicy',
    'EccMode',
    'EccStatus',
    'FuzzReport',
    'Hresp',
    'ImageFormatError',
    'IsolateMaster',
    'MatchMode',
    'MemoryMap',
    'MemoryRegion',
    'Permission',
    'PolicyError',
    'PolicyRegisterSpace',
    'PolicySource',
    'PrivilegeError',
    'ScenarioError',
    'ScenarioScript',
    'SecurityEvent',
    'SlaveKind',
    'Supervisor',
    'System',
    'SystemConfig',
    'ViolationLedger']
