"""
VITACEP - Polar Day-Ring Export

Arcs for a polar plot in which every day of a calendar year is a ring and
the angle is the time of day. Events crossing midnight become one arc per
day they touch.
"""

import csv
import io
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Any, List

from vitacep.algebra import Window
from vitacep.core.utils import SECONDS_PER_DAY, to_datetime

POLAR_HEADER = ["day_index", "start_fraction", "end_fraction", "event_type"]


@dataclass(frozen=True)
class PolarRow:
    day_index: int  # 1..366
    start_fraction: float  # of the day, in [0, 1)
    end_fraction: float  # (0, 1]; 1.0 when the arc reaches midnight
    event_type: str


def _year_start(year: int) -> int:
    return int(datetime(year, 1, 1, tzinfo=timezone.utc).timestamp())


def export_polar(event_type: str, year: int, store: Any) -> List[PolarRow]:
    """
    Day-ring arcs of an event type within a calendar year (UTC).

    Returns:
        Rows sorted by (day_index, start_fraction)
    """
    start, end = _year_start(year), _year_start(year + 1)
    rows: List[PolarRow] = []
    for event in store.query_events(event_type, Window(start, end)):
        cursor = max(event.start, start)
        stop = min(event.end, end)
        while cursor < stop:
            midnight = cursor - cursor % SECONDS_PER_DAY
            piece_end = min(stop, midnight + SECONDS_PER_DAY)
            rows.append(
                PolarRow(
                    day_index=to_datetime(midnight).timetuple().tm_yday,
                    start_fraction=(cursor - midnight) / SECONDS_PER_DAY,
                    end_fraction=(piece_end - midnight) / SECONDS_PER_DAY,
                    event_type=event.event_type,
                )
            )
            cursor = piece_end
    return sorted(rows, key=lambda r: (r.day_index, r.start_fraction, r.end_fraction))


def polar_csv(rows: List[PolarRow]) -> str:
    """CSV with fractions written to 4 decimals."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(POLAR_HEADER)
    for row in rows:
        writer.writerow(
            [row.day_index, f"{row.start_fraction:.4f}", f"{row.end_fraction:.4f}", row.event_type]
        )
    return buffer.getvalue()
