"""
VITACEP - Station Data Adapter

Loads PM2.5 monitoring stations and their hourly readings:

    station_id,lat,lon                 (stations file)
    station_id,timestamp,pm25_ugm3     (readings file)
"""

import logging
from typing import Optional

from vitacep.core.errors import DataError, IngestError
from vitacep.exposome.stations import StationTable, parse_readings_csv, parse_stations_csv
from vitacep.infrastructure.filesystem import FileSystemAdapter, RealFileSystem

logger = logging.getLogger(__name__)


def ingest_stations(
    stations_path: str, readings_path: str, fs: Optional[FileSystemAdapter] = None
) -> StationTable:
    """
    Build a validated StationTable from the two station files.

    Raises:
        IngestError: On malformed rows or readings of unknown stations
    """
    fs = fs or RealFileSystem()
    for path in (stations_path, readings_path):
        if not fs.exists(path):
            raise IngestError("file not found", path)
    stations = parse_stations_csv(fs.read(stations_path), stations_path)
    readings = parse_readings_csv(fs.read(readings_path), readings_path)
    try:
        table = StationTable.build(stations, readings)
    except DataError as e:
        raise IngestError(str(e), readings_path) from e
    logger.info(f"Loaded {len(table.stations)} stations with {table.reading_count} readings")
    return table
