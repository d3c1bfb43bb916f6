"""
VITACEP - Exposome Join

Builds environmental concentration streams by joining the location stream
with PM2.5 readings of the nearest monitoring station.
"""

import csv
import io
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from vitacep.core.errors import DataError, IngestError
from vitacep.core.types import LocationSample, Sample, Timestamp
from vitacep.core.utils import floor_hour, format_timestamp, parse_timestamp

logger = logging.getLogger(__name__)

EARTH_RADIUS_KM = 6371.0
PM25_UNIT = "ug/m3"

LatLon = Tuple[float, float]


@dataclass(frozen=True)
class Station:
    """A PM2.5 monitoring station."""

    station_id: str
    latitude: float
    longitude: float

    def __post_init__(self):
        if not (-90.0 <= self.latitude <= 90.0) or not (-180.0 <= self.longitude <= 180.0):
            raise DataError(
                f"Station {self.station_id} has invalid coordinates "
                f"({self.latitude}, {self.longitude})"
            )

    @property
    def position(self) -> LatLon:
        return (self.latitude, self.longitude)


@dataclass(frozen=True)
class StationReading:
    """Hourly PM2.5 concentration at one station."""

    station_id: str
    timestamp: Timestamp
    pm25: float  # ug/m3

    def __post_init__(self):
        if not math.isfinite(self.pm25) or self.pm25 < 0:
            raise DataError(f"PM2.5 reading must be finite and non-negative, got {self.pm25}")


@dataclass(frozen=True)
class StationTable:
    """Stations with their time-sorted readings, keyed by hour bucket."""

    stations: Tuple[Station, ...] = ()
    readings: Mapping[str, Tuple[StationReading, ...]] = field(default_factory=dict)

    def __post_init__(self):
        known = {s.station_id for s in self.stations}
        for station_id in self.readings:
            if station_id not in known:
                raise DataError(f"Readings reference unknown station: {station_id}")
        # hour bucket -> reading, per station
        index = {
            sid: {floor_hour(r.timestamp): r for r in rows} for sid, rows in self.readings.items()
        }
        object.__setattr__(self, "_hourly", index)

    @classmethod
    def build(
        cls, stations: Sequence[Station], readings: Sequence[StationReading]
    ) -> "StationTable":
        """
        Group and sort readings per station.

        A second reading for the same station and hour replaces the first.

        Raises:
            DataError: If a reading references an unknown station or a station id repeats
        """
        known = {s.station_id for s in stations}
        if len(known) != len(stations):
            raise DataError("Duplicate station id in station list")
        grouped: Dict[str, Dict[Timestamp, StationReading]] = {sid: {} for sid in known}
        replaced = 0
        for reading in readings:
            if reading.station_id not in known:
                raise DataError(f"Reading references unknown station: {reading.station_id}")
            hour = floor_hour(reading.timestamp)
            if hour in grouped[reading.station_id]:
                replaced += 1
            grouped[reading.station_id][hour] = reading
        if replaced:
            logger.warning(f"{replaced} duplicate station-hour readings replaced by later rows")
        return cls(
            stations=tuple(sorted(stations, key=lambda s: s.station_id)),
            readings={
                sid: tuple(rows[h] for h in sorted(rows)) for sid, rows in grouped.items()
            },
        )

    @property
    def reading_count(self) -> int:
        return sum(len(rows) for rows in self.readings.values())

    def reading_at(self, station_id: str, ts: Timestamp) -> Optional[StationReading]:
        """Reading whose hour bucket contains the timestamp, if any."""
        return self._hourly.get(station_id, {}).get(floor_hour(ts))  # type: ignore[attr-defined]


def haversine_km(a: LatLon, b: LatLon) -> float:
    """Great-circle distance in kilometers (Earth radius 6371.0 km)."""
    lat1, lon1 = map(math.radians, a)
    lat2, lon2 = map(math.radians, b)
    dlat = lat2 - lat1
    dlon = lon2 - lon1
    h = math.sin(dlat / 2) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2) ** 2
    return 2 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(h)))


def nearest_station(p: LatLon, t: StationTable, max_km: float = 50.0) -> Optional[Station]:
    """
    Station closest to p, or None when the table is empty or the closest is beyond max_km.

    Ties are broken by lexicographic station_id.
    """
    best: Optional[Tuple[float, str, Station]] = None
    for station in t.stations:
        candidate = (haversine_km(p, station.position), station.station_id, station)
        if best is None or candidate[:2] < best[:2]:
            best = candidate
    if best is None or best[0] > max_km:
        return None
    return best[2]


def concentration_stream(
    loc: Sequence[LocationSample], t: StationTable, max_km: float = 50.0
) -> List[Sample]:
    """
    PM2.5 concentration at each location sample from the nearest station's hourly reading.

    Location samples without a station within max_km, or whose hour has no
    reading, produce no output.
    """
    result: List[Sample] = []
    if not t.stations:
        return result
    cache: Dict[LatLon, Optional[Station]] = {}
    skipped = 0
    for sample in loc:
        key = (sample.latitude, sample.longitude)
        if key not in cache:
            cache[key] = nearest_station(key, t, max_km)
        station = cache[key]
        reading = t.reading_at(station.station_id, sample.timestamp) if station else None
        if reading is None:
            skipped += 1
            continue
        result.append(
            Sample(
                timestamp=sample.timestamp,
                value=reading.pm25,
                unit=PM25_UNIT,
                source=f"station:{station.station_id}",
            )
        )
    if skipped:
        logger.debug(f"No station reading for {skipped} of {len(loc)} location samples")
    return result


STATIONS_HEADER = ["station_id", "lat", "lon"]
READINGS_HEADER = ["station_id", "timestamp", "pm25_ugm3"]


def _rows(text: str, header: List[str], path: str) -> Iterator[Tuple[int, List[str]]]:
    reader = csv.reader(io.StringIO(text))
    first = next(reader, None)
    if first is None or [c.strip() for c in first] != header:
        raise IngestError(f"expected header {','.join(header)}", path, 1)
    for row in reader:
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise IngestError(
                f"expected {len(header)} fields, got {len(row)}", path, reader.line_num
            )
        yield reader.line_num, [c.strip() for c in row]


def parse_stations_csv(text: str, path: str = "<stations>") -> List[Station]:
    """
    Parse "station_id,lat,lon" rows.

    Raises:
        IngestError: Naming the offending line
    """
    stations = []
    for line, (station_id, lat, lon) in _rows(text, STATIONS_HEADER, path):
        try:
            stations.append(Station(station_id, float(lat), float(lon)))
        except (ValueError, DataError) as e:
            raise IngestError(str(e), path, line) from e
    return stations


def parse_readings_csv(text: str, path: str = "<readings>") -> List[StationReading]:
    """
    Parse "station_id,timestamp,pm25_ugm3" rows.

    Raises:
        IngestError: Naming the offending line
    """
    readings = []
    for line, (station_id, ts, pm25) in _rows(text, READINGS_HEADER, path):
        try:
            readings.append(StationReading(station_id, parse_timestamp(ts), float(pm25)))
        except (ValueError, DataError) as e:
            raise IngestError(str(e), path, line) from e
    return readings


def format_station_table(t: StationTable) -> Tuple[str, str]:
    """Render a table as (stations CSV, readings CSV) in the parse formats."""
    stations = io.StringIO()
    writer = csv.writer(stations, lineterminator="\n")
    writer.writerow(STATIONS_HEADER)
    for s in t.stations:
        writer.writerow([s.station_id, repr(s.latitude), repr(s.longitude)])
    readings = io.StringIO()
    writer = csv.writer(readings, lineterminator="\n")
    writer.writerow(READINGS_HEADER)
    for sid in sorted(t.readings):
        for r in t.readings[sid]:
            writer.writerow([sid, format_timestamp(r.timestamp), repr(r.pm25)])
    return stations.getvalue(), readings.getvalue()
