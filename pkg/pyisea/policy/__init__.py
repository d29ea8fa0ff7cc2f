# -*- coding: utf-8 -*-
"""
Author: PyISEA Team
================================

Policy:
-------

    This submodule holds the APU and DPU policy formats, their side-effect
    free evaluation, and the compiler turning policy files into per-slave
    Policy Register Space (PRS) images.

    Available functions:
    ---------------------

        >>> pyisea.apu_range(policy)
        >>> pyisea.apu_check(prs, master, addr, kind, mode)
        >>> pyisea.dpu_check(prs, master, addr, wdata, mode)
        >>> pyisea.range_to_addr_mask(start, end)
        >>> pyisea.validate(source, config)
        >>> pyisea.compile_to_prs(source, config)


    For further information, check the function specific documentation.
"""

from .core import AccessKind, ApuPolicy, ApuVerdict, DpuPolicy, DpuVerdict, \
    MatchMode, Permission, PolicyRegisterSpace, SUPPORTED_CAPACITIES, \
    apu_check, apu_check_array, apu_covers, apu_match, apu_range, \
    dpu_check, dpu_check_array, dpu_data_match, dpu_range, dpu_scope_match, \
    dpu_scoped, is_stray, scope_bounds, scope_match, scope_match_array

__all__ = [
    # Functions
    'apu_check',
    'apu_check_array',
    'apu_covers',
    'apu_match',
    'apu_range',
    'dpu_check',
    'dpu_check_array',
    'dpu_data_match',
    'dpu_range',
    'dpu_scope_match',
    'dpu_scoped',
    'is_stray',
    'scope_bounds',
    'scope_match',
    'scope_match_array',
    # Classes
    'AccessKind',
    'ApuPolicy',
    'ApuVerdict',
    'DpuPolicy',
    'DpuVerdict',
    'MatchMode',
    'Permission',
    'PolicyRegisterSpace',
    # Constants
    'SUPPORTED_CAPACITIES']
