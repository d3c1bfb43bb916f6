"""
VITACEP - Event Stream Conversion

Turns records from the events log into interval sets.
"""

from typing import Iterable

from vitacep.core.types import EventRecord, IntervalSet, normalize


def events_to_intervalset(events: Iterable[EventRecord], event_type: str) -> IntervalSet:
    """Normalized union of the intervals of all events with the given type."""
    return normalize(e.interval for e in events if e.event_type == event_type)
