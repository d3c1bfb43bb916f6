"""
VITACEP - Location CSV Adapter

Reads location history exports into the Location stream:

    timestamp,lat,lon,source
    2019-06-01T08:00:00Z,46.0511,14.5051,phone
"""

from typing import Any

from vitacep.core.errors import DataError, IngestError
from vitacep.core.types import LocationSample
from vitacep.core.utils import parse_timestamp
from vitacep.ingest.base import IngestBatch, IngestResult, SourceAdapter, csv_rows, source_name

LOCATION_HEADER = ["timestamp", "lat", "lon", "source"]
LOCATION_STREAM = "Location"


class LocationCsvAdapter(SourceAdapter):
    """location-csv: geographic positions; an empty source cell means the file name."""

    name = "location-csv"

    def read(self, path: str) -> IngestBatch:
        default_source = source_name(path)
        batch = IngestBatch()
        rows = csv_rows(self._text(path))
        first = next(rows, None)
        if first is None or [c.lower() for c in first[1]] != LOCATION_HEADER:
            raise IngestError(f"expected header {','.join(LOCATION_HEADER)}", path, 1)

        for line, cells in rows:
            if len(cells) != len(LOCATION_HEADER):
                raise IngestError(f"expected 4 fields, got {len(cells)}", path, line)
            ts, lat, lon, source = cells
            try:
                sample = LocationSample(
                    parse_timestamp(ts), float(lat), float(lon), source or default_source
                )
            except (ValueError, DataError) as e:
                raise IngestError(str(e), path, line) from e
            batch.add_sample(LOCATION_STREAM, sample)
        return batch


def ingest_location_csv(path: str, store: Any) -> IngestResult:
    """Ingest a location history export into the store."""
    return LocationCsvAdapter().ingest(path, store)
