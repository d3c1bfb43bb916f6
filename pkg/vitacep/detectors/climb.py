"""
VITACEP - Climb Detector

Intervals when the user is climbing a slope, from a smoothed altitude stream.
"""

import math
from dataclasses import dataclass
from typing import Any, List, Mapping, Sequence

import numpy as np

from vitacep.core.errors import DataError
from vitacep.core.types import Interval, IntervalSet, Sample, normalize
from vitacep.detectors.base import Detector, check_sorted, fuse_samples


@dataclass(frozen=True)
class ClimbSpec:
    """Parameters of the climb detector."""

    smoothing_window: int = 30  # seconds
    min_ascent_rate: float = 0.2  # m/s
    min_total_gain: float = 10.0  # m
    max_gap: int = 30  # seconds

    def __post_init__(self):
        if (
            self.smoothing_window <= 0
            or self.min_ascent_rate <= 0
            or self.min_total_gain <= 0
            or self.max_gap <= 0
        ):
            raise DataError("ClimbSpec fields must be positive")


def smooth(times: np.ndarray, values: np.ndarray, window: int) -> np.ndarray:
    """Centred moving mean over [t - window/2, t + window/2]."""
    half = window / 2.0
    lows = np.searchsorted(times, times - half, side="left")
    highs = np.searchsorted(times, times + half, side="right")
    cumulative = np.concatenate(([0.0], np.cumsum(values)))
    return (cumulative[highs] - cumulative[lows]) / (highs - lows)


def detect_climb(altitude: Sequence[Sample], spec: ClimbSpec) -> IntervalSet:
    """
    Intervals of sustained smoothed ascent.

    Spans between consecutive samples qualify when their smoothed ascent rate is
    at least min_ascent_rate and they are at most max_gap apart; qualifying
    spans separated by at most max_gap merge, and merged intervals are kept
    when their smoothed gain reaches min_total_gain.

    Raises:
        UnsortedInputError: If samples are not time-sorted
    """
    if len(altitude) < 2:
        return IntervalSet.empty()
    check_sorted(altitude)

    times, values = fuse_samples(altitude)
    if len(times) < 2:
        return IntervalSet.empty()
    smoothed = smooth(times, values, spec.smoothing_window)

    spacing = np.diff(times)
    rates = np.diff(smoothed) / spacing
    qualifying = (rates >= spec.min_ascent_rate) & (spacing <= spec.max_gap)
    spans = normalize(
        Interval(start, end)
        for start, end in zip(times[:-1][qualifying].tolist(), times[1:][qualifying].tolist())
    )

    merged: List[Interval] = []
    for iv in spans:
        if merged and iv.start - merged[-1].end <= spec.max_gap:
            merged[-1] = Interval(merged[-1].start, iv.end)
        else:
            merged.append(iv)

    kept = []
    for iv in merged:
        first = int(np.searchsorted(times, iv.start))
        last = int(np.searchsorted(times, iv.end))
        if smoothed[last] - smoothed[first] >= spec.min_total_gain:
            kept.append(iv)
    return IntervalSet(tuple(kept))


class ClimbDetector(Detector):
    """detect-climb(stream, smoothing_window=, min_ascent_rate=, min_total_gain=, max_gap=)"""

    name = "detect-climb"
    parameters = ("smoothing_window", "min_ascent_rate", "min_total_gain", "max_gap")

    @classmethod
    def from_kwargs(cls, defaults: Any, kwargs: Mapping[str, float]) -> "ClimbDetector":
        return cls(
            ClimbSpec(
                smoothing_window=int(
                    kwargs.get("smoothing_window", defaults.climb_smoothing_window)
                ),
                min_ascent_rate=float(
                    kwargs.get("min_ascent_rate", defaults.climb_min_ascent_rate)
                ),
                min_total_gain=float(kwargs.get("min_total_gain", defaults.climb_min_total_gain)),
                max_gap=int(kwargs.get("max_gap", defaults.climb_max_gap)),
            )
        )

    @property
    def lookback(self) -> int:
        spec = self.spec
        return (
            spec.smoothing_window
            + spec.max_gap
            + math.ceil(spec.min_total_gain / spec.min_ascent_rate)
        )

    def detect(self, samples: Sequence[Sample]) -> IntervalSet:
        return detect_climb(samples, self.spec)
