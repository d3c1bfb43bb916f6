"""
VITACEP - Segment Files

Line codecs for the append-only segment files and crash recovery of a
partially written last line.

    streams/<id>.csv    timestamp,value,unit,source     (real streams)
    streams/<id>.csv    timestamp,lat,lon,source        (location streams)
    events/<type>.jsonl one EventRecord.to_dict() per line
"""

import csv
import io
import json
import logging
from typing import Callable, Iterable, List, Sequence, TypeVar, Union

from vitacep.core.errors import DataError, StoreError
from vitacep.core.types import EventRecord, LocationSample, Sample, event_from_dict
from vitacep.core.utils import format_timestamp, parse_timestamp
from vitacep.infrastructure.filesystem import FileSystemAdapter

logger = logging.getLogger(__name__)

REAL_HEADER = "timestamp,value,unit,source"
LOCATION_HEADER = "timestamp,lat,lon,source"

T = TypeVar("T")


def _csv_line(fields: Sequence[str]) -> str:
    buffer = io.StringIO()
    csv.writer(buffer, lineterminator="\n").writerow(fields)
    return buffer.getvalue()


def encode_sample(sample: Sample) -> str:
    return _csv_line(
        [format_timestamp(sample.timestamp), repr(sample.value), sample.unit, sample.source]
    )


def decode_sample(line: str) -> Sample:
    ts, value, unit, source = next(csv.reader([line]))
    return Sample(parse_timestamp(ts), float(value), unit, source)


def encode_location(sample: LocationSample) -> str:
    return _csv_line(
        [
            format_timestamp(sample.timestamp),
            repr(sample.latitude),
            repr(sample.longitude),
            sample.source,
        ]
    )


def decode_location(line: str) -> LocationSample:
    ts, lat, lon, source = next(csv.reader([line]))
    return LocationSample(parse_timestamp(ts), float(lat), float(lon), source)


def encode_event(event: EventRecord) -> str:
    return json.dumps(event.to_dict(), sort_keys=True) + "\n"


def decode_event(line: str) -> EventRecord:
    return event_from_dict(json.loads(line))


Record = Union[Sample, LocationSample, EventRecord]


def recover(fs: FileSystemAdapter, path: str) -> str:
    """
    Read a segment file, cutting off a trailing line left by an interrupted write.

    Returns:
        The file content up to and including its last newline
    """
    content = fs.read(path)
    if content and not content.endswith("\n"):
        keep = content.rfind("\n") + 1
        logger.warning(
            f"Truncating partial record at end of {path} ({len(content) - keep} characters)"
        )
        fs.truncate(path, keep)
        content = content[:keep]
    return content


def read_segment(
    fs: FileSystemAdapter, path: str, decode: Callable[[str], T], header: str = ""
) -> List[T]:
    """
    Decode every complete record of a segment file.

    Raises:
        StoreError: If a complete line cannot be decoded
    """
    records: List[T] = []
    for number, line in enumerate(recover(fs, path).splitlines(), start=1):
        if not line or (number == 1 and header and line == header):
            continue
        try:
            records.append(decode(line))
        except (ValueError, KeyError, TypeError, DataError) as e:
            raise StoreError(f"{path}:{number}: corrupt record: {e}") from e
    return records


def append_segment(
    fs: FileSystemAdapter,
    path: str,
    records: Iterable[Record],
    encode: Callable,
    header: str = "",
) -> None:
    """Append encoded records, writing the header first for a new file."""
    content = "".join(encode(r) for r in records)
    if not content:
        return
    if header and not fs.exists(path):
        content = header + "\n" + content
    fs.append(path, content)
