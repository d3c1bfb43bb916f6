"""
VITACEP - Weekly Event Report

Frequency and total duration of one event type for every ISO week of a year.
Events belong to the week containing their start; durations are not split
across weeks.
"""

import csv
import io
from dataclasses import dataclass
from datetime import date, datetime, timezone
from typing import Any, Dict, List, Tuple

from vitacep.algebra import Window
from vitacep.core.utils import format_number, to_datetime

WEEKLY_HEADER = ["iso_week", "event_count", "total_minutes"]


@dataclass(frozen=True)
class WeeklyReportRow:
    iso_week: str  # "2019-W23"
    event_count: int
    total_minutes: float


def iso_week_label(year: int, week: int) -> str:
    return f"{year}-W{week:02d}"


def iso_weeks_in_year(year: int) -> int:
    """52 or 53; December 28th always falls in the last ISO week."""
    return date(year, 12, 28).isocalendar()[1]


def iso_year_bounds(year: int) -> Tuple[int, int]:
    """Epoch seconds of the first Monday of ISO year `year` and of the next ISO year."""

    def monday(y: int) -> int:
        d = date.fromisocalendar(y, 1, 1)
        return int(datetime(d.year, d.month, d.day, tzinfo=timezone.utc).timestamp())

    return monday(year), monday(year + 1)


def report_weekly(event_type: str, year: int, store: Any) -> List[WeeklyReportRow]:
    """
    One row per ISO week of the ISO year, including weeks without events.

    Args:
        event_type: Event type to summarize, e.g. "Cycling"
        year: ISO year
        store: Store holding the events log
    """
    start, end = iso_year_bounds(year)
    counts: Dict[int, int] = {}
    seconds: Dict[int, int] = {}
    for event in store.query_events(event_type, Window(start, end)):
        if not start <= event.start < end:
            continue
        week = to_datetime(event.start).isocalendar()[1]
        counts[week] = counts.get(week, 0) + 1
        seconds[week] = seconds.get(week, 0) + event.interval.duration

    return [
        WeeklyReportRow(
            iso_week=iso_week_label(year, week),
            event_count=counts.get(week, 0),
            total_minutes=seconds.get(week, 0) / 60,
        )
        for week in range(1, iso_weeks_in_year(year) + 1)
    ]


def weekly_csv(rows: List[WeeklyReportRow]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(WEEKLY_HEADER)
    for row in rows:
        writer.writerow([row.iso_week, row.event_count, format_number(round(row.total_minutes, 4))])
    return buffer.getvalue()
