"""
VITACEP - Derived Stream Catalogue

Streams the event-pattern language can reference without storing them:
each is computed on demand from stored streams over the evaluation window.
"""

from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Protocol, Sequence, Tuple

from vitacep.algebra import Window
from vitacep.config.settings import AppConfig
from vitacep.core.types import LocationSample, Sample
from vitacep.detectors.base import fused_samples
from vitacep.exposome.stations import PM25_UNIT, StationTable, concentration_stream
from vitacep.physio.derive import breathing_rate, pm25_intake_rate, spo2_from_altitude, tidal_volume

HEARTRATE = "Heartrate"
ALTITUDE = "Altitude"
LOCATION = "Location"


class DerivationContext(Protocol):
    """What a derivation needs from its caller: stored data and settings."""

    config: AppConfig

    @property
    def stations(self) -> StationTable: ...

    def samples(self, stream_id: str, window: Window) -> Sequence[Sample]: ...

    def locations(self, stream_id: str, window: Window) -> Sequence[LocationSample]: ...


@dataclass(frozen=True)
class DerivedStream:
    """A stream computed from stored inputs."""

    name: str
    unit: str
    inputs: Tuple[str, ...]
    compute: Callable[[DerivationContext, Window], List[Sample]]
    needs_stations: bool = False


def _heartrate(ctx: DerivationContext, window: Window) -> List[Sample]:
    return fused_samples(ctx.samples(HEARTRATE, window))


def _breathing_rate(ctx: DerivationContext, window: Window) -> List[Sample]:
    return breathing_rate(_heartrate(ctx, window), ctx.config.subject_profile())


def _tidal_volume(ctx: DerivationContext, window: Window) -> List[Sample]:
    return tidal_volume(_heartrate(ctx, window), ctx.config.subject_profile())


def _pm25(ctx: DerivationContext, window: Window) -> List[Sample]:
    return concentration_stream(
        ctx.locations(LOCATION, window), ctx.stations, ctx.config.station_max_km
    )


def _pm25_intake(ctx: DerivationContext, window: Window) -> List[Sample]:
    hr = _heartrate(ctx, window)
    profile = ctx.config.subject_profile()
    return pm25_intake_rate(
        breathing_rate(hr, profile),
        tidal_volume(hr, profile),
        _pm25(ctx, window),
        ctx.config.max_gap,
    )


def _spo2(ctx: DerivationContext, window: Window) -> List[Sample]:
    altitude = fused_samples(ctx.samples(ALTITUDE, window))
    return spo2_from_altitude(altitude, ctx.config.spo2_anchors)


CATALOGUE: Dict[str, DerivedStream] = {
    d.name: d
    for d in (
        DerivedStream("BreathingRate", "breaths/min", (HEARTRATE,), _breathing_rate),
        DerivedStream("TidalVolume", "L", (HEARTRATE,), _tidal_volume),
        DerivedStream("PM25", PM25_UNIT, (LOCATION,), _pm25, needs_stations=True),
        DerivedStream(
            "PM25Intake", "ug/min", (HEARTRATE, LOCATION), _pm25_intake, needs_stations=True
        ),
        DerivedStream("SpO2", "%", (ALTITUDE,), _spo2),
    )
}


def get_derived(name: str) -> Optional[DerivedStream]:
    """Look up a derived stream by name."""
    return CATALOGUE.get(name)
