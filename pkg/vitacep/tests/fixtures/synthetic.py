"""
Synthetic physiology fixtures with planted ground truth.

All times are epoch seconds; T0 is 2019-06-01T00:00:00Z.
"""

import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from vitacep.config.settings import AppConfig
from vitacep.core.types import EventRecord, Interval, LocationSample, Sample
from vitacep.core.utils import format_timestamp, parse_timestamp
from vitacep.exposome.stations import Station, StationReading, StationTable
from vitacep.infrastructure.filesystem import MockFileSystem
from vitacep.store import Store

T0 = parse_timestamp("2019-06-01T00:00:00Z")
HOUR = 3600
DAY = 86400

EXPOSURE_EVENT = "ExposureEvent := (Heartrate > 120) ∧ (PM2.5 > 10)"
UPHILL_CYCLE = "UphillCycle := Cycling ∧ detect-climb(Altitude)"
VOL_OVERLOAD = "VolOverload := (HR > 140) ∨ (Cycling ∧ detect-climb(Altitude))"
PRESS_OVERLOAD = "PressOverload := detect-spike(HR) ∨ (Power > 400 W)"


def memory_store(config: Optional[AppConfig] = None) -> Store:
    """Store on an in-memory filesystem."""
    return Store("/store", fs=MockFileSystem(), config=config)


def hr(ts: int, value: float, source: str = "watch") -> Sample:
    return Sample(ts, float(value), "bpm", source)


def ramp_hold_ramp(start: int, peak: int, hold: int, base: int = 80) -> Dict[int, float]:
    """
    Heart rate rising one bpm every 5 s from base to peak, holding, then falling back.

    The slope keeps the rolling-median baseline close enough that no spike fires.
    """
    rise = (peak - base) * 5
    profile: Dict[int, float] = {}
    for k in range(rise):
        profile[start + k] = base + k // 5
    for k in range(hold):
        profile[start + rise + k] = peak
    for k in range(rise):
        profile[start + rise + hold + k] = peak - k // 5
    return profile


@dataclass
class SyntheticDay:
    """One day of 1 Hz data with the intervals each definition must find."""

    heartrate: List[Sample]
    power: List[Sample]
    altitude: List[Sample]
    cycling: EventRecord
    vol_overload: List[Tuple[int, int]] = field(default_factory=list)
    press_overload: List[Tuple[int, int]] = field(default_factory=list)

    def load(self, store: Store) -> Store:
        store.append_samples("Heartrate", self.heartrate)
        store.append_samples("Power", self.power)
        store.append_samples("Altitude", self.altitude)
        store.append_events([self.cycling])
        return store


def synthetic_day() -> SyntheticDay:
    """
    Planted features (offsets from T0):

    - two HR > 140 runs from slow ramps to 150 bpm at 02:00 and 18:00
    - a 10:00-11:00 ride with a 100 m climb (0.5 m/s from 10:16:40) and a
      20 s burst of 450 W at 10:33:20
    - a 30 s excursion from 80 to 120 bpm at 14:00
    """
    profile: Dict[int, float] = {}
    profile.update(ramp_hold_ramp(T0 + 2 * HOUR, 150, 600))
    profile.update(ramp_hold_ramp(T0 + 18 * HOUR, 150, 600))
    spike = T0 + 14 * HOUR
    for k in range(30):
        profile[spike + k] = 120
    heartrate = [hr(t, profile.get(t, 80)) for t in range(T0, T0 + DAY)]

    ride = Interval(T0 + 10 * HOUR, T0 + 11 * HOUR)
    climb = T0 + 37000
    burst = T0 + 38000
    altitude = [
        Sample(t, 300 + 0.5 * min(max(t - climb, 0), 200), "m", "bike")
        for t in range(ride.start, ride.end)
    ]
    power = [
        Sample(t, 450.0 if burst <= t < burst + 20 else 200.0, "W", "bike")
        for t in range(ride.start, ride.end)
    ]
    cycling = EventRecord("Cycling", "Morning ride", ride, {"source": "bike"})

    # HR > 140 first holds 61 steps into the rise and last holds 10 steps into the fall
    runs = [
        (T0 + 2 * HOUR + 305, T0 + 2 * HOUR + 350 + 600 + 50),
        (T0 + 18 * HOUR + 305, T0 + 18 * HOUR + 350 + 600 + 50),
    ]
    # the 31-sample smoothing lets the climb start 3 s early and end 3 s late
    climbing = (climb - 3, climb + 203)
    return SyntheticDay(
        heartrate=heartrate,
        power=power,
        altitude=altitude,
        cycling=cycling,
        vol_overload=sorted(runs + [climbing]),
        press_overload=[(burst, burst + 20), (spike, spike + 30)],
    )


def minute_heartrate(days: int, seed: int, start: int = T0) -> List[Sample]:
    """
    One HR sample per minute: resting values with random bouts above 140 bpm.
    """
    rng = random.Random(seed)
    samples = []
    bout = 0
    for minute in range(days * 24 * 60):
        if bout == 0 and rng.random() < 0.01:
            bout = rng.randint(5, 40)
        if bout:
            value = rng.randint(142, 165)
            bout -= 1
        else:
            value = rng.randint(60, 110)
        samples.append(hr(start + minute * 60, value))
    return samples


def chunk_by_time(samples: Sequence[Sample], seconds: int) -> List[List[Sample]]:
    """Split time-sorted samples into consecutive chunks of a fixed time span."""
    chunks: List[List[Sample]] = []
    bucket_start = None
    for s in samples:
        if bucket_start is None or s.timestamp >= bucket_start + seconds:
            chunks.append([])
            bucket_start = s.timestamp
        chunks[-1].append(s)
    return chunks


def chunk_randomly(samples: Sequence[Sample], rng: random.Random) -> List[List[Sample]]:
    cuts = sorted(rng.sample(range(1, len(samples)), rng.randint(1, 25)))
    bounds = [0] + cuts + [len(samples)]
    return [list(samples[a:b]) for a, b in zip(bounds, bounds[1:])]


def station_table(
    pm25: float, start: int, hours: int, position: Tuple[float, float] = (46.05, 14.50)
) -> StationTable:
    """One station with a constant hourly reading."""
    station = Station("LJ-1", *position)
    readings = [StationReading("LJ-1", start + h * HOUR, pm25) for h in range(hours)]
    return StationTable.build([station], readings)


def fixed_location(start: int, end: int, position: Tuple[float, float] = (46.06, 14.51)):
    return [LocationSample(t, position[0], position[1], "phone") for t in range(start, end)]


def exercise_csv(
    activity: Tuple[str, str, int, int],
    rows: Sequence[Tuple[int, Dict[str, float]]],
    columns: Sequence[str] = ("heartrate_bpm",),
) -> str:
    """Render an exercise export with one activity block."""
    event_type, name, start, end = activity
    lines = [
        f"#activity,{event_type},{name},{format_timestamp(start)},{format_timestamp(end)}",
        ",".join(["timestamp", *columns]),
    ]
    for ts, values in rows:
        cells = [format_timestamp(ts)] + [_cell(values.get(c)) for c in columns]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _cell(value: Optional[float]) -> str:
    return "" if value is None else repr(float(value))
