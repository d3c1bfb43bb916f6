"""
VITACEP - Exercise CSV Adapter

Reads per-second exercise exports. Each activity block starts with a
preamble and a header, followed by one row per second:

    #activity,Cycling,Morning ride,2019-06-01T08:00:00Z,2019-06-01T08:10:00Z
    timestamp,heartrate_bpm,power_w,cadence_rpm,altitude_m,lat,lon
    2019-06-01T08:00:00Z,121,180,85,412.5,46.05,14.50

Empty cells mean the channel was not recorded at that second.
"""

import logging
from typing import Any, Dict, List, Optional, Set, Tuple

from vitacep.core.errors import DataError, IngestError
from vitacep.core.types import EventRecord, Interval, LocationSample, Sample
from vitacep.core.utils import parse_timestamp
from vitacep.ingest.base import IngestBatch, IngestResult, SourceAdapter, csv_rows, source_name

logger = logging.getLogger(__name__)

ACTIVITY_MARKER = "#activity"

# channel -> (stream id, unit written in the column name, unit stored)
CHANNELS: Dict[str, Tuple[str, str, str]] = {
    "heartrate": ("Heartrate", "bpm", "bpm"),
    "power": ("Power", "w", "W"),
    "cadence": ("Cadence", "rpm", "rpm"),
    "altitude": ("Altitude", "m", "m"),
}
LOCATION_STREAM = "Location"


class _Block:
    def __init__(self, event_type: str, name: str, interval: Interval, line: int):
        self.event_type = event_type
        self.name = name
        self.interval = interval
        self.line = line
        self.columns: Optional[List[str]] = None
        self.streams: Set[str] = set()


def parse_header(cells: List[str], path: str, line: int) -> List[str]:
    """
    Map header cells to stream ids ("timestamp", stream id, "lat" or "lon").

    Raises:
        IngestError: On unknown columns or units
    """
    if not cells or cells[0].lower() != "timestamp":
        raise IngestError("header must start with timestamp", path, line)
    columns = ["timestamp"]
    for cell in cells[1:]:
        lowered = cell.lower()
        if lowered in ("lat", "lon"):
            columns.append(lowered)
            continue
        channel, _, unit = lowered.partition("_")
        if channel not in CHANNELS:
            raise IngestError(f"unknown column {cell!r}", path, line)
        stream_id, expected_unit, _ = CHANNELS[channel]
        if unit != expected_unit:
            raise IngestError(f"unknown unit {unit!r} for {channel}", path, line)
        columns.append(stream_id)
    if ("lat" in columns) != ("lon" in columns):
        raise IngestError("lat and lon columns must appear together", path, line)
    return columns


class ExerciseCsvAdapter(SourceAdapter):
    """exercise-csv: activity events plus per-second sensor streams."""

    name = "exercise-csv"

    def read(self, path: str) -> IngestBatch:
        text = self._text(path)
        source = source_name(path)
        batch = IngestBatch()
        block: Optional[_Block] = None
        blocks: List[_Block] = []

        for line, cells in csv_rows(text):
            if cells[0] == ACTIVITY_MARKER:
                block = self._preamble(cells, path, line)
                blocks.append(block)
                continue
            if block is None:
                raise IngestError("missing activity header", path, line)
            if block.columns is None:
                block.columns = parse_header(cells, path, line)
                continue
            self._row(block, cells, batch, source, path, line)

        if not blocks:
            raise IngestError("missing activity header", path, 1)
        for b in blocks:
            if b.columns is None:
                raise IngestError("activity block has no column header", path, b.line)
            batch.events.append(
                EventRecord(
                    event_type=b.event_type,
                    event_name=b.name,
                    interval=b.interval,
                    parameters={"source": source},
                    stream_refs=frozenset(b.streams),
                )
            )
        logger.debug(f"{path}: {len(blocks)} activity blocks")
        return batch

    def _preamble(self, cells: List[str], path: str, line: int) -> _Block:
        if len(cells) != 5:
            raise IngestError("activity line needs type, name, start and end", path, line)
        _, event_type, name, start, end = cells
        if not event_type:
            raise IngestError("activity type is empty", path, line)
        try:
            interval = Interval(parse_timestamp(start), parse_timestamp(end))
        except (ValueError, DataError) as e:
            raise IngestError(f"bad activity interval: {e}", path, line) from e
        return _Block(event_type, name, interval, line)

    def _row(
        self,
        block: _Block,
        cells: List[str],
        batch: IngestBatch,
        source: str,
        path: str,
        line: int,
    ) -> None:
        columns = block.columns or []
        if len(cells) != len(columns):
            raise IngestError(f"expected {len(columns)} fields, got {len(cells)}", path, line)
        values = dict(zip(columns, cells))
        try:
            ts = parse_timestamp(values["timestamp"])
            for stream_id, _, unit in CHANNELS.values():
                cell = values.get(stream_id, "")
                if cell:
                    batch.add_sample(stream_id, Sample(ts, float(cell), unit, source), unit)
                    block.streams.add(stream_id)
            lat, lon = values.get("lat", ""), values.get("lon", "")
            if bool(lat) != bool(lon):
                raise IngestError("lat and lon must both be present or both empty", path, line)
            if lat:
                location = LocationSample(ts, float(lat), float(lon), source)
                batch.add_sample(LOCATION_STREAM, location)
                block.streams.add(LOCATION_STREAM)
        except IngestError:
            raise
        except (ValueError, DataError) as e:
            raise IngestError(str(e), path, line) from e


def ingest_exercise_csv(path: str, store: Any) -> IngestResult:
    """Ingest an exercise export into the store."""
    return ExerciseCsvAdapter().ingest(path, store)
