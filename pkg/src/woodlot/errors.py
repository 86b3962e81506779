"""Exception types shared by the engine, scoring pipeline, lab, and service."""

from __future__ import annotations


class ConfigError(ValueError):
    """Invalid game, deck, or experiment configuration."""


class RuleViolation(Exception):
    """An action or phase transition the rules reject.

    ``reason`` is a stable machine-readable code (e.g. ``insufficient_funds``,
    ``double_decision``); the message carries human detail. The game state is
    left untouched whenever this is raised.
    """

    def __init__(self, reason: str, detail: str = ""):
        self.reason = reason
        super().__init__(f"{reason}: {detail}" if detail else reason)


class LogValidationError(Exception):
    """A decision log failed structural or replay validation."""

    def __init__(self, message: str, event_index: int | None = None):
        self.event_index = event_index
        if event_index is not None:
            message = f"event {event_index}: {message}"
        super().__init__(message)


class SchemaError(ValueError):
    """A document does not match its published schema."""


class PolicyFault(Exception):
    """A scripted policy emitted an action the engine rejected."""

    def __init__(self, seat: int, message: str):
        self.seat = seat
        super().__init__(f"seat {seat}: {message}")


class StateSpaceError(ValueError):
    """Exhaustive enumeration would exceed the configured bound."""
