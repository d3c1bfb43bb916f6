"""
VITACEP - Health CSV Adapter

Reads sparse daily-health exports (step count, weight, stairs, ...):

    timestamp,stream,value,unit
    2019-06-01T00:00:00Z,StepCount,10234,count
"""

from typing import Any

from vitacep.core.errors import DataError, IngestError
from vitacep.core.types import Sample
from vitacep.core.utils import parse_timestamp
from vitacep.ingest.base import IngestBatch, IngestResult, SourceAdapter, csv_rows, source_name

HEALTH_HEADER = ["timestamp", "stream", "value", "unit"]


class HealthCsvAdapter(SourceAdapter):
    """health-csv: one sample per row, stream named in the row."""

    name = "health-csv"

    def read(self, path: str) -> IngestBatch:
        source = source_name(path)
        batch = IngestBatch()
        rows = csv_rows(self._text(path))
        first = next(rows, None)
        if first is None or [c.lower() for c in first[1]] != HEALTH_HEADER:
            raise IngestError(f"expected header {','.join(HEALTH_HEADER)}", path, 1)

        for line, cells in rows:
            if len(cells) != len(HEALTH_HEADER):
                raise IngestError(f"expected 4 fields, got {len(cells)}", path, line)
            ts, stream_id, value, unit = cells
            if not stream_id:
                raise IngestError("stream is empty", path, line)
            known = batch.units.get(stream_id)
            if known is not None and known != unit:
                raise IngestError(
                    f"{stream_id} switches unit from {known!r} to {unit!r}", path, line
                )
            try:
                sample = Sample(parse_timestamp(ts), float(value), unit, source)
            except (ValueError, DataError) as e:
                raise IngestError(str(e), path, line) from e
            batch.add_sample(stream_id, sample, unit)
        return batch


def ingest_health_csv(path: str, store: Any) -> IngestResult:
    """Ingest a daily-health export into the store."""
    return HealthCsvAdapter().ingest(path, store)
