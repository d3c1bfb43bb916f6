"""
VITACEP - Core Types

The unified data model every other module consumes: samples, intervals,
canonical interval sets and event records. All values are immutable.

Timestamps are integer UTC epoch seconds. Intervals are half-open [start, end).
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, Iterable, Iterator, Mapping, Tuple, Union

from vitacep.core.errors import DataError, InvalidIntervalError
from vitacep.core.utils import format_timestamp, parse_timestamp

Timestamp = int
ParameterValue = Union[str, int, float]


class StreamKind(Enum):
    """Kinds of streams held by the store registry."""

    REAL = "real"
    LOCATION = "location"
    EVENT = "event"


@dataclass(frozen=True)
class Sample:
    """One timestamped reading of a real-valued stream."""

    timestamp: Timestamp
    value: float
    unit: str
    source: str = ""

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise DataError(f"Sample value must be finite, got {self.value!r}")
        if not self.unit:
            raise DataError("Sample unit must be non-empty")


@dataclass(frozen=True)
class LocationSample:
    """One timestamped geographic position."""

    timestamp: Timestamp
    latitude: float
    longitude: float
    source: str = ""

    def __post_init__(self):
        if not (-90.0 <= self.latitude <= 90.0):
            raise DataError(f"Latitude out of range [-90, 90]: {self.latitude}")
        if not (-180.0 <= self.longitude <= 180.0):
            raise DataError(f"Longitude out of range [-180, 180]: {self.longitude}")


@dataclass(frozen=True, order=True)
class Interval:
    """Half-open time interval [start, end) with start < end."""

    start: Timestamp
    end: Timestamp

    def __post_init__(self):
        if self.start >= self.end:
            raise InvalidIntervalError(
                f"Interval start must precede end: [{self.start}, {self.end})"
            )

    @property
    def duration(self) -> int:
        return self.end - self.start

    def contains(self, ts: Timestamp) -> bool:
        return self.start <= ts < self.end

    def __str__(self) -> str:
        return f"[{format_timestamp(self.start)}, {format_timestamp(self.end)})"


@dataclass(frozen=True)
class IntervalSet:
    """
    Canonical set of time points: sorted, pairwise disjoint, non-adjacent intervals.

    Build instances with normalize(); the constructor only accepts canonical input,
    so two sets covering the same time points are structurally identical.
    """

    intervals: Tuple[Interval, ...] = ()

    def __post_init__(self):
        for prev, cur in zip(self.intervals, self.intervals[1:]):
            if cur.start <= prev.end:
                raise InvalidIntervalError(
                    f"IntervalSet is not canonical: {prev} followed by {cur}"
                )

    @classmethod
    def empty(cls) -> "IntervalSet":
        return cls(())

    @classmethod
    def of(cls, *pairs: Tuple[Timestamp, Timestamp]) -> "IntervalSet":
        """Build a normalized set from (start, end) pairs."""
        return normalize(Interval(s, e) for s, e in pairs)

    def __iter__(self) -> Iterator[Interval]:
        return iter(self.intervals)

    def __len__(self) -> int:
        return len(self.intervals)

    def __bool__(self) -> bool:
        return bool(self.intervals)

    def covers(self, ts: Timestamp) -> bool:
        """Check whether a time point belongs to the set."""
        return any(iv.contains(ts) for iv in self.intervals)

    def pairs(self) -> list:
        """Return the intervals as [start, end] lists (handy for JSON and tests)."""
        return [[iv.start, iv.end] for iv in self.intervals]


@dataclass(frozen=True)
class EventRecord:
    """Typed, named interval with parameters and references to data streams."""

    event_type: str
    event_name: str
    interval: Interval
    parameters: Mapping[str, ParameterValue] = field(default_factory=dict)
    stream_refs: FrozenSet[str] = frozenset()

    def __post_init__(self):
        if not self.event_type:
            raise DataError("Event type must be non-empty")
        object.__setattr__(self, "stream_refs", frozenset(self.stream_refs))
        object.__setattr__(self, "parameters", dict(self.parameters))

    def __hash__(self) -> int:
        return hash((self.event_type, self.event_name, self.interval, self.stream_refs))

    @property
    def start(self) -> Timestamp:
        return self.interval.start

    @property
    def end(self) -> Timestamp:
        return self.interval.end

    @property
    def dedup_key(self) -> Tuple[str, Timestamp, Timestamp, str]:
        """Identity used by the store to drop duplicate appends."""
        return (self.event_type, self.start, self.end, self.event_name)

    def to_dict(self) -> Dict[str, object]:
        """Serialize to the JSON-lines event schema."""
        return {
            "event_type": self.event_type,
            "event_name": self.event_name,
            "start": format_timestamp(self.start),
            "end": format_timestamp(self.end),
            "parameters": dict(self.parameters),
            "stream_refs": sorted(self.stream_refs),
        }


def normalize(intervals: Iterable[Interval]) -> IntervalSet:
    """
    Merge intervals into their canonical IntervalSet.

    Overlapping and touching intervals (end == next start) are merged.

    Args:
        intervals: Any sequence of valid intervals, in any order

    Returns:
        Canonical IntervalSet covering exactly the union of the inputs
    """
    ordered = sorted(intervals, key=lambda iv: (iv.start, iv.end))
    merged: list = []
    start = end = None
    for iv in ordered:
        if start is None:
            start, end = iv.start, iv.end
        elif iv.start <= end:
            end = max(end, iv.end)
        else:
            merged.append(Interval(start, end))
            start, end = iv.start, iv.end
    if start is not None:
        merged.append(Interval(start, end))
    return IntervalSet(tuple(merged))


def total_duration(s: IntervalSet) -> int:
    """Sum of interval lengths in seconds; 0 for the empty set."""
    return sum(iv.duration for iv in s.intervals)


def event_from_dict(data: Mapping[str, object]) -> EventRecord:
    """Inverse of EventRecord.to_dict()."""
    return EventRecord(
        event_type=str(data["event_type"]),
        event_name=str(data.get("event_name", "")),
        interval=Interval(parse_timestamp(str(data["start"])), parse_timestamp(str(data["end"]))),
        parameters=dict(data.get("parameters") or {}),  # type: ignore[call-overload]
        stream_refs=frozenset(data.get("stream_refs") or ()),  # type: ignore[arg-type]
    )
