"""
Audit Module - Structured Run Log

Every CLI run keeps an append-only trail of what it did and why:
1. Run events - inputs loaded, parameters resolved, notices raised, outputs written
2. Audit store - filtering, notice extraction, and a summary for the metadata sidecar

Events are numbered sequentially and carry no wall-clock time, so identical
invocations produce identical trails.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

logger = logging.getLogger(__name__)


# =============================================================================
# 1. RUN EVENTS
# =============================================================================

class RunEventType(Enum):
    """Types of auditable events."""
    INPUT_LOADED = "input_loaded"
    PARAMETER_RESOLVED = "parameter_resolved"
    OPERATION_COMPLETED = "operation_completed"
    VALIDATION_RESULT = "validation_result"
    NOTICE = "notice"                      # truncation, unequal sizes, ...
    NUMERICAL_FAILURE = "numerical_failure"
    DATA_ERROR = "data_error"
    USAGE_ERROR = "usage_error"
    MODEL_SAVED = "model_saved"
    MODEL_LOADED = "model_loaded"
    OUTPUT_WRITTEN = "output_written"


# Event types forwarded to the logger at WARNING instead of INFO
_WARNING_EVENTS = {
    RunEventType.NOTICE,
    RunEventType.NUMERICAL_FAILURE,
    RunEventType.DATA_ERROR,
    RunEventType.USAGE_ERROR,
}


@dataclass
class RunEvent:
    """One entry of the run log: what happened, in which operation, with which values."""
    sequence: int
    event_type: RunEventType
    operation: str
    message: str
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "sequence": self.sequence,
            "event_type": self.event_type.value,
            "operation": self.operation,
            "message": self.message,
            "details": self.details,
        }


# =============================================================================
# 2. AUDIT STORE
# =============================================================================

class RunAudit:
    """Append-only store for the events of one run."""

    def __init__(self):
        self._events: list[RunEvent] = []

    def log_event(
        self,
        event_type: RunEventType,
        operation: str,
        message: str,
        details: Optional[dict] = None,
    ) -> RunEvent:
        """Append an event and mirror it to the module logger."""
        event = RunEvent(
            sequence=len(self._events) + 1,
            event_type=event_type,
            operation=operation,
            message=message,
            details=details or {},
        )
        self._events.append(event)

        level = logging.WARNING if event_type in _WARNING_EVENTS else logging.INFO
        logger.log(level, "[%s] %s: %s", event_type.value, operation, message)
        return event

    def notice(self, operation: str, message: str, **details) -> RunEvent:
        """Shorthand for a NOTICE event."""
        return self.log_event(RunEventType.NOTICE, operation, message, details)

    def get_events(
        self,
        event_type: Optional[RunEventType] = None,
        operation: Optional[str] = None,
    ) -> list[RunEvent]:
        """Query events with filters."""
        events = self._events
        if event_type:
            events = [e for e in events if e.event_type == event_type]
        if operation:
            events = [e for e in events if e.operation == operation]
        return events

    def notices(self) -> list[str]:
        """Messages of all NOTICE events, in order."""
        return [e.message for e in self.get_events(event_type=RunEventType.NOTICE)]

    def summary(self) -> dict:
        """Counts by event type plus the full trail, for the metadata sidecar."""
        events_by_type: dict[str, int] = {}
        for e in self._events:
            t = e.event_type.value
            events_by_type[t] = events_by_type.get(t, 0) + 1

        return {
            "total_events": len(self._events),
            "events_by_type": events_by_type,
            "events": [e.to_dict() for e in self._events],
        }
