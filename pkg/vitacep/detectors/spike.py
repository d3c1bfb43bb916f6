"""
VITACEP - Spike Detector

Short heart-rate excursions above a rolling-median baseline. Exceedances
lasting longer than max_spike_duration are sustained effort, not spikes.
"""

from dataclasses import dataclass
from typing import Any, Mapping, Sequence

import numpy as np

from vitacep.core.errors import DataError
from vitacep.core.types import Interval, IntervalSet, Sample, normalize
from vitacep.detectors.base import Detector, check_sorted, fuse_samples, hold_ends


@dataclass(frozen=True)
class SpikeSpec:
    """Parameters of the spike detector."""

    baseline_window: int = 120  # seconds
    delta: float = 25.0  # value units above baseline
    max_spike_duration: int = 60  # seconds

    def __post_init__(self):
        if self.baseline_window <= 0 or self.delta <= 0 or self.max_spike_duration <= 0:
            raise DataError("SpikeSpec fields must be positive")


def rolling_median(times: np.ndarray, values: np.ndarray, window: int) -> np.ndarray:
    """
    Median of the samples in [t - window, t), excluding the sample itself.

    Returns:
        Array of baselines; NaN where no earlier sample lies in the window
    """
    baseline = np.full(len(values), np.nan)
    lows = np.searchsorted(times, times - window, side="left")
    for i, lo in enumerate(lows):
        if lo < i:
            baseline[i] = np.median(values[lo:i])
    return baseline


def detect_spike(hr: Sequence[Sample], spec: SpikeSpec) -> IntervalSet:
    """
    Intervals where value >= rolling median + delta, each at most max_spike_duration long.

    Raises:
        UnsortedInputError: If samples are not time-sorted
    """
    if not hr:
        return IntervalSet.empty()
    check_sorted(hr)

    times, values = fuse_samples(hr)
    baseline = rolling_median(times, values, spec.baseline_window)
    with np.errstate(invalid="ignore"):
        exceed = values >= baseline + spec.delta
    ends = hold_ends(times, spec.max_spike_duration)

    runs = normalize(
        Interval(start, end) for start, end in zip(times[exceed].tolist(), ends[exceed].tolist())
    )
    return IntervalSet(tuple(iv for iv in runs if iv.duration <= spec.max_spike_duration))


class SpikeDetector(Detector):
    """detect-spike(stream, baseline_window=, delta=, max_spike_duration=)"""

    name = "detect-spike"
    parameters = ("baseline_window", "delta", "max_spike_duration")

    @classmethod
    def from_kwargs(cls, defaults: Any, kwargs: Mapping[str, float]) -> "SpikeDetector":
        return cls(
            SpikeSpec(
                baseline_window=int(kwargs.get("baseline_window", defaults.spike_baseline_window)),
                delta=float(kwargs.get("delta", defaults.spike_delta)),
                max_spike_duration=int(
                    kwargs.get("max_spike_duration", defaults.spike_max_duration)
                ),
            )
        )

    @property
    def lookback(self) -> int:
        return max(self.spec.baseline_window, self.spec.max_spike_duration)

    def detect(self, samples: Sequence[Sample]) -> IntervalSet:
        return detect_spike(samples, self.spec)
