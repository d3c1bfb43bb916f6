"""
VITACEP - Event and Data Stream Store

Append-only persistence of samples and events with an in-memory time index
rebuilt on open. Layout under the store root:

    registry.json
    streams/<id>.csv
    events/<type>.jsonl
    exposome/stations.csv, exposome/readings.csv
"""

import logging
import os
import re
from bisect import bisect_left
from typing import Any, Callable, Dict, Generic, Iterable, List, Mapping, Optional, Sequence
from typing import TypeVar, Union

from vitacep.algebra import Window
from vitacep.config.settings import AppConfig
from vitacep.core.errors import KindMismatchError, StoreError, UnitMismatchError
from vitacep.core.events import Event, EventBus, EventType
from vitacep.core.types import EventRecord, LocationSample, Sample, StreamKind, Timestamp
from vitacep.exposome.stations import (
    StationTable,
    format_station_table,
    parse_readings_csv,
    parse_stations_csv,
)
from vitacep.infrastructure.filesystem import FileSystemAdapter, RealFileSystem
from vitacep.store import segments
from vitacep.store.registry import StreamRegistry

logger = logging.getLogger(__name__)

STREAM_ID_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9_.-]*$")

R = TypeVar("R")


class SortedIndex(Generic[R]):
    """Records kept sorted by a unique key whose first element is a timestamp."""

    def __init__(self, key: Callable[[R], tuple], span: Optional[Callable[[R], int]] = None):
        self._key = key
        self._span = span
        self.keys: List[tuple] = []
        self.records: List[R] = []
        self.max_span = 0  # longest record duration, for overlap queries

    def __len__(self) -> int:
        return len(self.records)

    def add(self, record: R) -> bool:
        """Insert a record; returns False if its key is already present."""
        k = self._key(record)
        if self.keys and k <= self.keys[-1]:
            i = bisect_left(self.keys, k)
            if i < len(self.keys) and self.keys[i] == k:
                return False
            self.keys.insert(i, k)
            self.records.insert(i, record)
        else:
            self.keys.append(k)
            self.records.append(record)
        if self._span is not None:
            self.max_span = max(self.max_span, self._span(record))
        return True

    def __contains__(self, record: R) -> bool:
        k = self._key(record)
        i = bisect_left(self.keys, k)
        return i < len(self.keys) and self.keys[i] == k

    def between(self, start: Timestamp, end: Timestamp) -> List[R]:
        """Records whose key timestamp lies in [start, end)."""
        lo = bisect_left(self.keys, (start,))
        hi = bisect_left(self.keys, (end,))
        return self.records[lo:hi]

    @property
    def first_timestamp(self) -> Optional[Timestamp]:
        return self.keys[0][0] if self.keys else None


def _sample_key(s: Union[Sample, LocationSample]) -> tuple:
    return (s.timestamp, s.source)


def _event_span(e: EventRecord) -> int:
    return e.end - e.start


def _event_key(e: EventRecord) -> tuple:
    return (e.start, e.end, e.event_name)


class Store:
    """
    Append-only store of data streams and event logs.

    Single writer per store directory; reads never touch the disk after open.
    """

    def __init__(
        self,
        root: str,
        fs: Optional[FileSystemAdapter] = None,
        event_bus: Optional[EventBus] = None,
        config: Optional[AppConfig] = None,
    ):
        """
        Open (or create) a store directory.

        Args:
            root: Store directory
            fs: Filesystem adapter (RealFileSystem if None)
            event_bus: Bus for append notifications (a private bus if None)
            config: Settings used by definitions and derived streams
        """
        self.root = root
        self.fs: FileSystemAdapter = fs or RealFileSystem()
        self.event_bus = event_bus or EventBus()
        self.config = config or AppConfig()
        self._samples: Dict[str, SortedIndex[Any]] = {}
        self._events: Dict[str, SortedIndex[EventRecord]] = {}
        self._stations: Optional[StationTable] = None
        self._continuous: Any = None
        self._open()

    # Layout

    def _path(self, *parts: str) -> str:
        return os.path.join(self.root, *parts)

    def _stream_path(self, stream_id: str) -> str:
        return self._path("streams", f"{stream_id}.csv")

    def _events_path(self, event_type: str) -> str:
        return self._path("events", f"{event_type}.jsonl")

    def _open(self) -> None:
        for directory in ("", "streams", "events", "exposome"):
            self.fs.makedirs(self._path(directory) if directory else self.root)

        registry_path = self._path("registry.json")
        if self.fs.exists(registry_path):
            self.registry = StreamRegistry.from_json(self.fs.read(registry_path))
        else:
            self.registry = StreamRegistry.with_defaults()
            self.save_registry()

        for stream_id, entry in self.registry.entries.items():
            if entry.kind is StreamKind.EVENT:
                self._events[stream_id] = self._load(
                    SortedIndex(_event_key, _event_span),
                    self._events_path(stream_id),
                    segments.decode_event,
                )
            elif entry.kind is StreamKind.LOCATION:
                self._samples[stream_id] = self._load(
                    SortedIndex(_sample_key),
                    self._stream_path(stream_id),
                    segments.decode_location,
                    segments.LOCATION_HEADER,
                )
            else:
                self._samples[stream_id] = self._load(
                    SortedIndex(_sample_key),
                    self._stream_path(stream_id),
                    segments.decode_sample,
                    segments.REAL_HEADER,
                )
        logger.debug(
            f"Opened store {self.root}: {len(self._samples)} streams, "
            f"{len(self._events)} event types"
        )

    def _load(
        self, index: SortedIndex, path: str, decode: Callable, header: str = ""
    ) -> SortedIndex:
        if self.fs.exists(path):
            for record in segments.read_segment(self.fs, path, decode, header):
                index.add(record)
        return index

    def save_registry(self) -> None:
        self.fs.write(self._path("registry.json"), self.registry.to_json())

    # Registry

    def register_stream(self, stream_id: str, kind: StreamKind, unit: str = "") -> None:
        """
        Register a data stream or event type (idempotent for identical entries).

        Raises:
            StoreError: If the id is unusable as a file name or conflicts with an entry
        """
        if not STREAM_ID_RE.match(stream_id):
            raise StoreError(f"Invalid stream id: {stream_id!r}")
        known = stream_id in self.registry
        self.registry.register(stream_id, kind, unit)
        if kind is StreamKind.EVENT:
            self._events.setdefault(stream_id, SortedIndex(_event_key, _event_span))
        else:
            self._samples.setdefault(stream_id, SortedIndex(_sample_key))
        if not known:
            logger.info(f"Registered {kind.value} stream {stream_id}")
            self.save_registry()

    @property
    def watermark(self) -> Optional[Timestamp]:
        """Store-wide watermark: one past the latest appended sample or event start."""
        return self.registry.watermark.overall

    @property
    def origin(self) -> Optional[Timestamp]:
        """Earliest timestamp held by any stream or event log."""
        firsts = [
            index.first_timestamp
            for index in [*self._samples.values(), *self._events.values()]
            if index.first_timestamp is not None
        ]
        return min(firsts) if firsts else None

    # Writes

    def append_samples(
        self, stream_id: str, samples: Iterable[Union[Sample, LocationSample]]
    ) -> int:
        """
        Persist samples of one stream, dropping (source, timestamp) duplicates.

        Returns:
            Number of samples written

        Raises:
            UnknownStreamError: If the stream is not registered
            KindMismatchError: If records do not fit the stream kind
            UnitMismatchError: If a sample's unit differs from the registered unit
        """
        entry = self.registry.get(stream_id)
        samples = list(samples)
        if entry.kind is StreamKind.EVENT:
            raise KindMismatchError(f"{stream_id} is an event type, not a data stream")
        expected = LocationSample if entry.kind is StreamKind.LOCATION else Sample
        for sample in samples:
            if not isinstance(sample, expected):
                raise KindMismatchError(
                    f"{stream_id} holds {entry.kind.value} samples, got {type(sample).__name__}"
                )
            if isinstance(sample, Sample) and entry.unit and sample.unit != entry.unit:
                raise UnitMismatchError(
                    f"{stream_id} is registered in {entry.unit!r}, sample has {sample.unit!r}"
                )

        index = self._samples[stream_id]
        written = [s for s in samples if index.add(s)]
        if not written:
            return 0

        if entry.kind is StreamKind.LOCATION:
            encode, header = segments.encode_location, segments.LOCATION_HEADER
        else:
            encode, header = segments.encode_sample, segments.REAL_HEADER
            if not entry.unit:
                entry.unit = written[0].unit  # type: ignore[union-attr]
        segments.append_segment(self.fs, self._stream_path(stream_id), written, encode, header)

        entry.sources.update(s.source for s in written)
        self.registry.watermark.advance(stream_id, max(s.timestamp for s in written) + 1)
        self.save_registry()
        logger.debug(f"Appended {len(written)} samples to {stream_id}")
        self.event_bus.publish(
            Event.create(
                EventType.SAMPLES_APPENDED,
                stream_id=stream_id,
                count=len(written),
                watermark=self.watermark,
            )
        )
        return len(written)

    def append_events(self, events: Iterable[EventRecord]) -> int:
        """
        Persist events, dropping (event_type, start, end, event_name) duplicates.

        Unknown event types are registered on first use.

        Returns:
            Number of events written

        Raises:
            KindMismatchError: If an event type is registered as a data stream
        """
        by_type: Dict[str, List[EventRecord]] = {}
        for event in events:
            by_type.setdefault(event.event_type, []).append(event)

        total = 0
        for event_type, batch in by_type.items():
            self.register_stream(event_type, StreamKind.EVENT)
            index = self._events[event_type]
            written = [e for e in batch if index.add(e)]
            if not written:
                continue
            segments.append_segment(
                self.fs, self._events_path(event_type), written, segments.encode_event
            )
            self.registry.watermark.advance(event_type, max(e.start for e in written) + 1)
            self.save_registry()
            total += len(written)
            logger.debug(f"Appended {len(written)} {event_type} events")
            self.event_bus.publish(
                Event.create(EventType.EVENTS_APPENDED, event_type=event_type, count=len(written))
            )
        return total

    # Reads

    def query_samples(self, stream_id: str, window: Window) -> List[Any]:
        """
        Samples with timestamp in [window.start, window.end), time-sorted.

        Raises:
            UnknownStreamError: If the stream is not registered
        """
        entry = self.registry.get(stream_id)
        if entry.kind is StreamKind.EVENT:
            raise KindMismatchError(f"{stream_id} is an event type, not a data stream")
        return self._samples[stream_id].between(window.start, window.end)

    def query_events(self, event_type: str, window: Window) -> List[EventRecord]:
        """Events of a type whose interval intersects the window, sorted by start."""
        index = self._events.get(event_type)
        if index is None:
            return []
        candidates = index.between(window.start - index.max_span, window.end)
        return [e for e in candidates if e.end > window.start]

    def has_event(self, event: EventRecord) -> bool:
        """Check whether an event with the same identity is already stored."""
        index = self._events.get(event.event_type)
        return index is not None and event in index

    def samples_of(self, stream_id: str) -> Sequence[Any]:
        """Every sample of a stream, time-sorted."""
        self.registry.get(stream_id)
        return list(self._samples.get(stream_id, SortedIndex(_sample_key)).records)

    def events_of(self, event_type: str) -> Sequence[EventRecord]:
        """Every event of a type, sorted by start."""
        index = self._events.get(event_type)
        return list(index.records) if index else []

    # Station table

    @property
    def stations(self) -> StationTable:
        """Station table saved with save_stations(); empty if none."""
        if self._stations is None:
            stations_path = self._path("exposome", "stations.csv")
            readings_path = self._path("exposome", "readings.csv")
            if self.fs.exists(stations_path) and self.fs.exists(readings_path):
                self._stations = StationTable.build(
                    parse_stations_csv(self.fs.read(stations_path), stations_path),
                    parse_readings_csv(self.fs.read(readings_path), readings_path),
                )
            else:
                self._stations = StationTable()
        return self._stations

    def save_stations(self, table: StationTable) -> None:
        """Replace the stored station table."""
        stations_text, readings_text = format_station_table(table)
        self.fs.write(self._path("exposome", "stations.csv"), stations_text)
        self.fs.write(self._path("exposome", "readings.csv"), readings_text)
        self._stations = table
        logger.info(
            f"Saved {len(table.stations)} stations with {table.reading_count} readings"
        )

    # Continuous evaluation

    @property
    def continuous(self):
        """Continuous evaluator bound to this store (created on first use)."""
        if self._continuous is None:
            from vitacep.store.continuous import ContinuousEvaluator

            self._continuous = ContinuousEvaluator(self)
        return self._continuous

    def register_definition(self, definition):
        """Compile and register a definition for continuous evaluation."""
        return self.continuous.register_definition(definition)

    def advance(
        self,
        stream_id: Union[str, Mapping[str, Sequence[Any]]],
        items: Optional[Sequence[Any]] = None,
    ) -> List[EventRecord]:
        """Append an increment and return the newly finalized events."""
        return self.continuous.advance(stream_id, items)
