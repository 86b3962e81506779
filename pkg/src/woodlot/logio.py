"""Decision-log file format: canonical JSON lines, header first.

Line 1 is the header object (format version, config, seed, roster); every
following line is one event. Lines are canonical JSON (sorted keys, compact
separators, UTF-8), so the file bytes are reproducible and digests can be
taken over them directly.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import IO, Any

from .canon import canonical_dumps
from .errors import LogValidationError
from .models import LOG_FORMAT, DecisionLog


def dumps_log(log: DecisionLog) -> str:
    return "\n".join(log.to_lines()) + "\n"


def write_log(path: str | Path, log: DecisionLog) -> None:
    Path(path).write_text(dumps_log(log), encoding="utf-8")


def loads_log(text: str) -> DecisionLog:
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise LogValidationError("empty log file")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise LogValidationError(f"malformed header: {exc}") from exc
    if not isinstance(header, dict) or header.get("format") != LOG_FORMAT:
        raise LogValidationError(f"unsupported log format {header.get('format') if isinstance(header, dict) else header!r}")
    events: list[dict[str, Any]] = []
    for i, line in enumerate(lines[1:]):
        try:
            event = json.loads(line)
        except json.JSONDecodeError as exc:
            raise LogValidationError(f"malformed event: {exc}", event_index=i) from exc
        if not isinstance(event, dict):
            raise LogValidationError("event is not an object", event_index=i)
        events.append(event)
    return DecisionLog(header=header, events=events)


def read_log(path: str | Path) -> DecisionLog:
    return loads_log(Path(path).read_text(encoding="utf-8"))


def open_log_writer(path: str | Path, log: DecisionLog) -> IO[str]:
    """Open a write-ahead log file and write the header plus any existing
    events; returns the handle for appending."""
    handle = open(path, "w", encoding="utf-8")
    handle.write(canonical_dumps(log.header) + "\n")
    for event in log.events:
        handle.write(canonical_dumps(event) + "\n")
    handle.flush()
    return handle


def append_event(handle: IO[str], event: dict[str, Any]) -> None:
    handle.write(canonical_dumps(event) + "\n")
    handle.flush()
