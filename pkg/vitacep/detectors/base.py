"""
VITACEP - Detector Base Class

Defines the interface shared by all event detectors and the sample-array
helpers they build on (ordering checks, multi-source fusion, sample-and-hold).
"""

from abc import ABC, abstractmethod
from typing import Any, Dict, List, Mapping, Sequence, Set, Tuple

import numpy as np

from vitacep.core.errors import UnitMismatchError, UnsortedInputError
from vitacep.core.types import IntervalSet, Sample


def check_sorted(samples: Sequence[Sample]) -> None:
    """
    Ensure samples are in non-decreasing time order.

    Raises:
        UnsortedInputError: On the first out-of-order sample
    """
    for prev, cur in zip(samples, samples[1:]):
        if cur.timestamp < prev.timestamp:
            raise UnsortedInputError(
                f"Samples out of order: {cur.timestamp} follows {prev.timestamp}"
            )


def check_unit(samples: Sequence[Sample], unit: str = "") -> str:
    """
    Ensure all samples share one unit, optionally equal to the expected one.

    Returns:
        The common unit ("" for no samples)

    Raises:
        UnitMismatchError: If units differ
    """
    units = {s.unit for s in samples}
    if len(units) > 1:
        raise UnitMismatchError(f"Samples carry mixed units: {sorted(units)}")
    found = units.pop() if units else ""
    if unit and found and found != unit:
        raise UnitMismatchError(f"Expected unit {unit!r}, samples are in {found!r}")
    return found


def fuse_samples(samples: Sequence[Sample]) -> Tuple[np.ndarray, np.ndarray]:
    """
    Convert samples to (times, values) arrays, averaging readings that share a timestamp.

    Readings of one stream from several sources at the same second are fused
    into their mean. Input must already be time-sorted.

    Returns:
        Tuple of int64 times (strictly increasing) and float64 values
    """
    if not samples:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=float)
    raw_times = np.fromiter((s.timestamp for s in samples), dtype=np.int64, count=len(samples))
    raw_values = np.fromiter((s.value for s in samples), dtype=float, count=len(samples))
    times, inverse, counts = np.unique(raw_times, return_inverse=True, return_counts=True)
    if len(times) == len(raw_times):
        return times, raw_values
    sums = np.bincount(inverse, weights=raw_values)
    return times, sums / counts


def hold_ends(times: np.ndarray, max_gap: int) -> np.ndarray:
    """
    End of each sample's sample-and-hold span.

    A sample holds until the next sample or for max_gap seconds, whichever is
    shorter, and always for at least one second.
    """
    if len(times) == 0:
        return times.copy()
    gaps = np.append(np.diff(times), max_gap)
    return times + np.maximum(1, np.minimum(gaps, max_gap))


class Detector(ABC):
    """
    Base class for detectors that turn a data stream into an IntervalSet.

    Detectors are pure: the same samples always give the same intervals.
    """

    name: str = ""

    def __init__(self, spec: Any):
        """
        Initialize detector.

        Args:
            spec: Detector-specific parameter dataclass
        """
        self.spec = spec

    @classmethod
    @abstractmethod
    def from_kwargs(cls, defaults: Any, kwargs: Mapping[str, float]) -> "Detector":
        """
        Build a detector from DSL keyword arguments over configured defaults.

        Args:
            defaults: AppConfig supplying default parameters
            kwargs: Keyword arguments from the detector call
        """
        pass

    @property
    @abstractmethod
    def lookback(self) -> int:
        """Seconds of history the output at time t can depend on."""
        pass

    @abstractmethod
    def detect(self, samples: Sequence[Sample]) -> IntervalSet:
        """
        Detect intervals in a time-sorted sample sequence.

        Args:
            samples: Samples of one stream

        Returns:
            Canonical IntervalSet
        """
        pass


def fused_samples(samples: Sequence[Sample]) -> List[Sample]:
    """
    One sample per timestamp, averaging readings from several sources.

    Fused samples name every contributing source joined by "+". Input must
    already be time-sorted and share one unit.
    """
    if not samples:
        return []
    check_sorted(samples)
    unit = check_unit(samples)
    times, values = fuse_samples(samples)
    sources: Dict[int, Set[str]] = {}
    for s in samples:
        sources.setdefault(s.timestamp, set()).add(s.source)
    return [
        Sample(timestamp=t, value=v, unit=unit, source="+".join(sorted(sources[t])))
        for t, v in zip(times.tolist(), values.tolist())
    ]
