# -*- coding: utf-8 -*-
"""
Author: PyISEA Team
================================
Scenario runner.

Policies are installed at cycle 0 and the images are loaded through the SI.
The scripted phase starts when the SI is done; `at_cycle` and
`expected_completion_cycle` count from that point.
"""
import dataclasses
import logging
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Tuple

from pyisea.bus.transfer import PendingTransfer
from pyisea.exceptions import PolicyError
from pyisea.policy.compiler import compile_to_prs, validate
from pyisea.policy.core import MatchMode
from pyisea.scenario.script import ScenarioScript
from pyisea.system import System
from pyisea.trace import Trace
from pyisea.utils import format_hex

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""

    def __str__(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}" + (f": {self.detail}"
                                          if self.detail else "")


@dataclass
class ScenarioReport:
    name: str
    checks: List[Check] = field(default_factory=list)
    start_cycle: int = 0
    end_cycle: int = 0
    interrupts: int = 0
    isolated: List[int] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> List[Check]:
        return [check for check in self.checks if not check.passed]

    def add(self, name: str, passed: bool, detail: str = "") -> None:
        self.checks.append(Check(name, bool(passed), detail))

    def summary(self) -> str:
        lines = [f"scenario {self.name}: cycles {self.start_cycle}.."
                 f"{self.end_cycle}, {self.interrupts} interrupts"]
        lines.extend(f"  {check}" for check in self.checks)
        failed = len(self.failures)
        lines.append(f"{len(self.checks) - failed} passed, {failed} failed")
        return "\n".join(lines)


class ScenarioResult(NamedTuple):
    trace: Trace
    report: ScenarioReport
    system: System


def _describe(pending: PendingTransfer) -> str:
    if pending.response is None:
        return "never completed"
    text = pending.response.hresp.value
    if pending.cause is not None and pending.cause.blocked:
        text += f"/{pending.cause.value}"
    if pending.response.rdata is not None:
        text += f" rdata={format_hex(pending.response.rdata)}"
    return text


def _check_expectations(script: ScenarioScript,
                        handles: Dict[Tuple[int, int], PendingTransfer],
                        start: int, report: ScenarioReport) -> None:
    for exp in script.expectations:
        pending = handles[(exp.master, exp.index)]
        response = pending.response
        name = f"{exp.ref} -> {exp.expected.value}"
        if exp.expected_cause is not None:
            name += f"/{exp.expected_cause.value}"
        passed = response is not None and response.hresp is exp.expected
        if passed and exp.expected_cause is not None:
            passed = pending.cause is exp.expected_cause
        if passed and exp.expected_completion_cycle is not None:
            passed = response.completion_cycle - start == \
                exp.expected_completion_cycle
            name += f" at cycle {exp.expected_completion_cycle}"
        if passed and exp.expected_rdata is not None:
            passed = response.rdata == exp.expected_rdata
        detail = _describe(pending)
        if response is not None:
            detail += f" at cycle {response.completion_cycle - start}"
        report.add(name, passed, detail)


def run_scenario(script: ScenarioScript,
                 match_mode: Optional[MatchMode] = None,
                 cycle_limit: Optional[int] = None) -> ScenarioResult:
    """
    Runs a scenario to quiescence or to its cycle limit.

    Args:
        script (ScenarioScript): Parsed scenario.
        match_mode (MatchMode, optional): Overrides the script and config.
        cycle_limit (int, optional): Overrides the script and config.

    Raises:
        PolicyError: The policies do not validate; nothing is simulated.

    Returns:
        ScenarioResult: Trace, report and the final system.
    """
    config = script.config
    mode = match_mode or script.match_mode
    if mode is not None:
        config = dataclasses.replace(config, match_mode=mode)
    limit = cycle_limit or script.cycle_limit or config.cycle_limit
    errors = [d for d in validate(script.policies, config) if d.is_error]
    if errors:
        raise PolicyError("; ".join(str(d) for d in errors))
    logger.info("running scenario %s (%s)", script.name, config)
    system = System(config)
    system.install_policies(compile_to_prs(script.policies, config))
    report = ScenarioReport(script.name)
    for path, words in script.images:
        failed = system.supervisor.load_image(words)
        report.add(f"image {path} loaded", not failed,
                   f"{len(failed)} words rejected" if failed else "")

    start = system.cycle
    base_interrupts = system.supervisor.received
    report.start_cycle = start
    handles = {}
    for transfer in script.transfers:
        handles[(transfer.master, transfer.index)] = system.issue(
            transfer.master, transfer.request(start))
    faults = list(script.fault_injections)
    while (system.busy or faults) and system.cycle - start < limit:
        while faults and start + faults[0].at_cycle <= system.cycle:
            fault = faults.pop(0)
            system.inject_fault(fault.slave, fault.offset, fault.bits,
                                fault.target)
        system.step()
    report.end_cycle = system.cycle
    report.add("quiescent before cycle limit", not system.busy,
               f"limit {limit}")

    _check_expectations(script, handles, start, report)
    for addr, value in script.expect_memory:
        actual = system.peek(addr)
        report.add(f"memory {format_hex(addr)} == {format_hex(value)}",
                   actual == value, f"found {format_hex(actual)}")
    report.interrupts = system.supervisor.received - base_interrupts
    if script.expected_interrupts is not None:
        report.add(f"{script.expected_interrupts} interrupts",
                   report.interrupts == script.expected_interrupts,
                   f"got {report.interrupts}")
    report.add("every blocked transfer interrupted PROC-0",
               system.blocked_events == system.supervisor.received,
               f"{system.blocked_events} blocked, "
               f"{system.supervisor.received} interrupts")
    report.isolated = sorted(system.supervisor.isolated)
    if script.dump_regions:
        dump = system.supervisor.dump_results(script.dump_regions)
        if script.expect_unreadable is not None:
            report.add("unreadable granules",
                       dump.unreadable == sorted(script.expect_unreadable),
                       ", ".join(format_hex(a) for a in dump.unreadable)
                       or "none")
    if script.teardown_regions:
        system.supervisor.teardown_epoch(script.teardown_regions)
        dirty = [format_hex(start_addr)
                 for start_addr, length in script.teardown_regions
                 if system.read_region(start_addr, length).any()]
        report.add("torn-down regions read zero", not dirty,
                   ", ".join(dirty))
    logger.info("scenario %s finished at cycle %d: %s", script.name,
                system.cycle, "pass" if report.passed else "FAIL")
    return ScenarioResult(system.trace, report, system)
