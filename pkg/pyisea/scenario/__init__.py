# -*- coding: utf-8 -*-
"""
Author: PyISEA Team
================================

Scenario:
-------

    Scripted scenarios, the JSONL run trace and the randomised invariant
    suite.

    Available functions:
    ---------------------

        >>> pyisea.load_scenario("apu_block")
        >>> pyisea.run_scenario(script)
        >>> pyisea.emit_trace(result.trace, "out.jsonl")
        >>> pyisea.fuzz(config, seed=1, n_transactions=10000)

    For further information, check the function specific documentation.
"""

from pyisea.trace import Trace, TraceEvent, emit_trace
from .script import Expectation, FaultInjection, ScenarioScript, \
    ScriptedTransfer, bundled_scenarios, load_scenario, resolve_scenario, \
    scenario_from_dict
from .runner import Check, ScenarioReport, ScenarioResult, run_scenario
from .fuzz import FuzzReport, Violation, fuzz, oracle_cause, random_prs, \
    run_shard

__all__ = [
    # Functions
    'bundled_scenarios',
    'emit_trace',
    'fuzz',
    'load_scenario',
    'oracle_cause',
    'random_prs',
    'resolve_scenario',
    'run_scenario',
    'run_shard',
    'scenario_from_dict',
    # Classes
    'Check',
    'Expectation',
    'FaultInjection',
    'FuzzReport',
    'ScenarioReport',
    'ScenarioResult',
    'ScenarioScript',
    'ScriptedTransfer',
    'Trace',
    'TraceEvent',
    'Violation']
