"""
VITACEP - Reports Module

Plot-ready tables over the events log: weekly exercise summaries and
polar day-ring arcs.
"""

from vitacep.reports.polar import PolarRow, export_polar, polar_csv
from vitacep.reports.weekly import WeeklyReportRow, report_weekly, weekly_csv

__all__ = [
    "PolarRow",
    "WeeklyReportRow",
    "export_polar",
    "polar_csv",
    "report_weekly",
    "weekly_csv",
]
