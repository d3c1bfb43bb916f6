"""
VITACEP - Threshold Detector

Intervals where the sample-and-hold signal satisfies a comparison,
e.g. (Heartrate > 120).
"""

import operator
from dataclasses import dataclass
from typing import Any, Callable, Dict, Mapping, Sequence

import numpy as np

from vitacep.core.errors import DataError
from vitacep.core.types import Interval, IntervalSet, Sample, normalize
from vitacep.detectors.base import Detector, check_sorted, check_unit, fuse_samples, hold_ends

OPERATORS: Dict[str, Callable[[Any, Any], Any]] = {
    ">": operator.gt,
    ">=": operator.ge,
    "<": operator.lt,
    "<=": operator.le,
}


@dataclass(frozen=True)
class ThresholdSpec:
    """Comparison of a stream against a constant."""

    stream: str
    op: str
    value: float
    unit: str = ""  # empty: the stream's registered unit
    min_duration: int = 0
    max_gap: int = 60

    def __post_init__(self):
        if self.op not in OPERATORS:
            raise DataError(f"Unknown comparison operator: {self.op}")
        if self.min_duration < 0:
            raise DataError("min_duration must be non-negative")
        if self.max_gap < 0:
            raise DataError("max_gap must be non-negative")


def threshold_events(samples: Sequence[Sample], spec: ThresholdSpec) -> IntervalSet:
    """
    Maximal intervals where the held signal satisfies the spec's predicate.

    Each sample's value holds until the next sample or for max_gap seconds,
    whichever is shorter; runs shorter than min_duration are dropped.

    Raises:
        UnsortedInputError: If samples are not time-sorted
        UnitMismatchError: If sample units disagree with each other or the spec
    """
    if not samples:
        return IntervalSet.empty()
    check_sorted(samples)
    check_unit(samples, spec.unit)

    times, values = fuse_samples(samples)
    ends = hold_ends(times, spec.max_gap)
    mask = OPERATORS[spec.op](values, spec.value)

    runs = normalize(
        Interval(start, end) for start, end in zip(times[mask].tolist(), ends[mask].tolist())
    )
    if spec.min_duration > 0:
        runs = IntervalSet(tuple(iv for iv in runs if iv.duration >= spec.min_duration))
    return runs


class ThresholdDetector(Detector):
    """Detector wrapper used by evaluation plans for comparison leaves."""

    name = "threshold"

    @classmethod
    def from_kwargs(cls, defaults: Any, kwargs: Mapping[str, float]) -> "ThresholdDetector":
        return cls(
            ThresholdSpec(
                stream=str(kwargs["stream"]),
                op=str(kwargs["op"]),
                value=float(kwargs["value"]),
                unit=str(kwargs.get("unit", "")),
                min_duration=int(kwargs.get("min_duration", defaults.threshold_min_duration)),
                max_gap=int(kwargs.get("max_gap", defaults.max_gap)),
            )
        )

    @property
    def lookback(self) -> int:
        return self.spec.max_gap + self.spec.min_duration

    def detect(self, samples: Sequence[Sample]) -> IntervalSet:
        return threshold_events(samples, self.spec)


def support_events(samples: Sequence[Any], max_gap: int = 60) -> IntervalSet:
    """Intervals during which a stream (of any sample type) has a held value."""
    if not samples:
        return IntervalSet.empty()
    check_sorted(samples)
    times = np.unique(np.fromiter((s.timestamp for s in samples), dtype=np.int64))
    ends = hold_ends(times, max_gap)
    return normalize(Interval(s, e) for s, e in zip(times.tolist(), ends.tolist()))


class SupportDetector(Detector):
    """Detector for a bare stream reference: where the stream has data."""

    name = "support"

    def __init__(self, max_gap: int):
        super().__init__(max_gap)

    @classmethod
    def from_kwargs(cls, defaults: Any, kwargs: Mapping[str, float]) -> "SupportDetector":
        return cls(int(kwargs.get("max_gap", defaults.max_gap)))

    @property
    def lookback(self) -> int:
        return self.spec

    def detect(self, samples: Sequence[Sample]) -> IntervalSet:
        return support_events(samples, self.spec)
