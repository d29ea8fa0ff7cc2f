# -*- coding: utf-8 -*-
"""
Author: PyISEA Team
================================
Run trace: the textual counterpart of a waveform. One compact JSON object per
line, keys ordered `cycle`, `kind`, then the kind-specific fields in the order
they were emitted.
"""
import json
import logging
from dataclasses import dataclass, field
from typing import Callable, Iterable, List

logger = logging.getLogger(__name__)

TRACE_KINDS = ("GRANT", "ADDR_PHASE", "DATA_PHASE", "RESP", "SECURITY",
               "INTERRUPT", "SUPERVISOR")


@dataclass(frozen=True)
class TraceEvent:
    cycle: int
    kind: str
    fields: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in TRACE_KINDS:
            raise ValueError(f"unknown trace event kind {self.kind!r}")

    def __getitem__(self, key: str):
        return self.fields[key]

    def get(self, key: str, default=None):
        return self.fields.get(key, default)

    def to_json(self) -> str:
        record = {"cycle": self.cycle, "kind": self.kind}
        record.update(self.fields)
        return json.dumps(record, separators=(",", ":"))


class Trace:
    """
    Append-only event list of one simulation.

    Listeners see every event as it is recorded; the fuzz harness uses this to
    snapshot memory around blocked transfers.
    """

    def __init__(self):
        self.events: List[TraceEvent] = []
        self._listeners: List[Callable[[TraceEvent], None]] = []

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    def subscribe(self, listener: Callable[[TraceEvent], None]) -> None:
        self._listeners.append(listener)

    def unsubscribe(self, listener: Callable[[TraceEvent], None]) -> None:
        self._listeners.remove(listener)

    def emit(self, cycle: int, kind: str, **fields) -> TraceEvent:
        if self.events and cycle < self.events[-1].cycle:
            raise AssertionError(f"trace cycle went backwards: {cycle} after "
                                 f"{self.events[-1].cycle}")
        event = TraceEvent(cycle, kind, {k: v for k, v in fields.items()
                                         if v is not None})
        self.events.append(event)
        for listener in self._listeners:
            listener(event)
        return event

    def of_kind(self, kind: str) -> List[TraceEvent]:
        return [event for event in self.events if event.kind == kind]

    def to_jsonl(self) -> str:
        return "".join(event.to_json() + "\n" for event in self.events)

    def __getstate__(self):
        # listeners are run-local callbacks, never part of a snapshot
        state = self.__dict__.copy()
        state["_listeners"] = []
        return state


def emit_trace(events: Iterable[TraceEvent], path: str) -> None:
    """
    Writes events as JSONL.

    Args:
        events (Iterable[TraceEvent]): A Trace or any event sequence.
        path (str): Output file, overwritten.

    Raises:
        OSError: When the file cannot be written; the message names `path`.
    """
    text = "".join(event.to_json() + "\n" for event in events)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as trace_file:
            trace_file.write(text)
    except OSError as err:
        raise OSError(f"cannot write trace to {path}: {err.strerror}") from err
    logger.info("wrote %d trace events to %s", text.count("\n"), path)
