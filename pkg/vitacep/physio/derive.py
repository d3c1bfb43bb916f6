"""
VITACEP - Physiological Derivations

Derives breathing rate, tidal volume, PM2.5 intake rate and blood oxygen
saturation streams from measured ones. Every model is an explicit
piecewise-linear table taken from configuration, so derived values are
reproducible and replaceable.
"""

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from vitacep.config.settings import DEFAULT_RR_ANCHORS, DEFAULT_SPO2_ANCHORS
from vitacep.core.errors import DataError
from vitacep.core.types import Sample
from vitacep.core.utils import is_strictly_increasing, piecewise_linear
from vitacep.detectors.base import check_unit, fuse_samples, hold_ends

LITERS_PER_CUBIC_METER = 1000.0


@dataclass(frozen=True)
class SubjectProfile:
    """Body parameters of the monitored person."""

    body_mass: float  # kg
    vt_rest_per_kg: float = 0.007  # L/kg
    vt_max_per_kg: float = 0.030  # L/kg
    rr_anchors: Tuple[Tuple[float, float], ...] = tuple(DEFAULT_RR_ANCHORS)

    def __post_init__(self):
        if self.body_mass <= 0:
            raise DataError("body_mass must be positive")
        if len(self.rr_anchors) < 2:
            raise DataError("rr_anchors needs at least two anchors")
        xs = [a[0] for a in self.rr_anchors]
        ys = [a[1] for a in self.rr_anchors]
        if not (is_strictly_increasing(xs) and is_strictly_increasing(ys)):
            raise DataError("rr_anchors must be strictly increasing in both coordinates")


def _values(samples: Sequence[Sample]) -> np.ndarray:
    return np.fromiter((s.value for s in samples), dtype=float, count=len(samples))


def _with_values(samples: Sequence[Sample], values: np.ndarray, unit: str) -> List[Sample]:
    return [
        Sample(timestamp=s.timestamp, value=float(v), unit=unit, source=s.source)
        for s, v in zip(samples, values)
    ]


def breathing_rate(hr: Sequence[Sample], profile: SubjectProfile) -> List[Sample]:
    """Breaths per minute from heart rate by interpolating the profile's anchors."""
    check_unit(hr, "bpm")
    return _with_values(hr, piecewise_linear(_values(hr), profile.rr_anchors), "breaths/min")


def tidal_volume(hr: Sequence[Sample], profile: SubjectProfile) -> List[Sample]:
    """
    Tidal volume in liters from heart rate.

    VT = body_mass * lerp(vt_rest_per_kg, vt_max_per_kg, p), where p is the heart
    rate's position between the first and last anchor heart rates, clamped to [0, 1].
    """
    check_unit(hr, "bpm")
    low = profile.rr_anchors[0][0]
    high = profile.rr_anchors[-1][0]
    position = np.clip((_values(hr) - low) / (high - low), 0.0, 1.0)
    per_kg = profile.vt_rest_per_kg + (profile.vt_max_per_kg - profile.vt_rest_per_kg) * position
    return _with_values(hr, profile.body_mass * per_kg, "L")


def align(reference: Sequence[Sample], samples: Sequence[Sample], max_gap: int) -> np.ndarray:
    """
    Sample-and-hold values of a stream at the reference timestamps.

    Returns:
        Array aligned to reference; NaN where no held value covers a timestamp
    """
    result = np.full(len(reference), np.nan)
    if not samples or not reference:
        return result
    times, values = fuse_samples(samples)
    ends = hold_ends(times, max_gap)
    at = np.fromiter((s.timestamp for s in reference), dtype=np.int64, count=len(reference))
    idx = np.searchsorted(times, at, side="right") - 1
    valid = idx >= 0
    valid[valid] &= at[valid] < ends[idx[valid]]
    result[valid] = values[idx[valid]]
    return result


def pm25_intake_rate(
    rr: Sequence[Sample],
    vt: Sequence[Sample],
    conc: Sequence[Sample],
    max_gap: int = 60,
) -> List[Sample]:
    """
    PM2.5 intake in micrograms per minute: rr * vt * conc * 0.001.

    Tidal volume and concentration are aligned onto the breathing-rate
    timestamps by sample-and-hold; timestamps without a held value are skipped.

    Raises:
        UnitMismatchError: If a stream is not in breaths/min, L and ug/m3
    """
    check_unit(rr, "breaths/min")
    check_unit(vt, "L")
    check_unit(conc, "ug/m3")
    if not rr:
        return []
    vt_values = align(rr, vt, max_gap)
    conc_values = align(rr, conc, max_gap)
    intake = _values(rr) * vt_values * conc_values / LITERS_PER_CUBIC_METER
    return [
        Sample(timestamp=s.timestamp, value=float(v), unit="ug/min", source=s.source)
        for s, v in zip(rr, intake)
        if not np.isnan(v)
    ]


def spo2_from_altitude(
    altitude: Sequence[Sample],
    anchors: Sequence[Tuple[float, float]] = tuple(DEFAULT_SPO2_ANCHORS),
) -> List[Sample]:
    """Blood oxygen saturation (%) from altitude (m), clamped outside the anchors."""
    check_unit(altitude, "m")
    if not altitude:
        return []
    return _with_values(altitude, piecewise_linear(_values(altitude), anchors), "%")
