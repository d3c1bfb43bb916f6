"""
Unit tests for the append-only store, its segment files and the registry.
"""

import logging
import random

import pytest

from vitacep.algebra import Window
from vitacep.core.errors import (
    DataError,
    InvalidIntervalError,
    KindMismatchError,
    StoreError,
    UnitMismatchError,
    UnknownStreamError,
)
from vitacep.core.types import EventRecord, Interval, LocationSample, Sample, StreamKind
from vitacep.infrastructure.filesystem import MockFileSystem
from vitacep.store import Store, StreamRegistry
from vitacep.tests.fixtures.synthetic import T0, hr, memory_store, station_table

HR_PATH = "/store/streams/Heartrate.csv"


def ride(start, end, name="ride"):
    return EventRecord("Cycling", name, Interval(start, end), {"source": "bike"}, {"Power"})


class TestSamples:
    def test_query_is_half_open(self):
        store = memory_store()
        store.append_samples("Heartrate", [hr(T0 + i, 60 + i) for i in range(10)])
        result = store.query_samples("Heartrate", Window(T0 + 2, T0 + 5))
        assert [s.timestamp for s in result] == [T0 + 2, T0 + 3, T0 + 4]

    def test_append_is_idempotent(self):
        store = memory_store()
        samples = [hr(T0 + i, 70) for i in range(5)]
        assert store.append_samples("Heartrate", samples) == 5
        assert store.append_samples("Heartrate", samples) == 0
        assert len(store.samples_of("Heartrate")) == 5

    def test_out_of_order_appends_are_sorted(self):
        store = memory_store()
        rng = random.Random(70)
        timestamps = list(range(T0, T0 + 200))
        rng.shuffle(timestamps)
        for ts in timestamps:
            store.append_samples("Heartrate", [hr(ts, 70)])
        assert [s.timestamp for s in store.samples_of("Heartrate")] == list(range(T0, T0 + 200))

    def test_sources_share_a_timestamp(self):
        store = memory_store()
        store.append_samples("Heartrate", [hr(T0, 100, "chest"), hr(T0, 110, "wrist")])
        assert len(store.samples_of("Heartrate")) == 2
        assert store.registry.get("Heartrate").sources == {"chest", "wrist"}

    def test_unknown_stream(self):
        with pytest.raises(UnknownStreamError):
            memory_store().append_samples("Mood", [Sample(T0, 1.0, "score")])

    def test_kind_mismatch(self):
        store = memory_store()
        with pytest.raises(KindMismatchError):
            store.append_samples("Heartrate", [LocationSample(T0, 46.0, 14.5)])
        with pytest.raises(KindMismatchError):
            store.append_samples("Location", [hr(T0, 80)])
        store.append_events([ride(T0, T0 + 60)])
        with pytest.raises(KindMismatchError):
            store.query_samples("Cycling", Window(T0, T0 + 60))

    def test_unit_mismatch(self):
        with pytest.raises(UnitMismatchError):
            memory_store().append_samples("Heartrate", [Sample(T0, 80.0, "W")])

    def test_invalid_samples(self):
        with pytest.raises(DataError):
            Sample(T0, float("nan"), "bpm")
        with pytest.raises(DataError):
            LocationSample(T0, 91.0, 0.0)

    def test_location_round_trip(self):
        store = memory_store()
        points = [LocationSample(T0 + i, 46.05 + i / 1000, 14.5, "phone") for i in range(3)]
        store.append_samples("Location", points)
        reopened = Store("/store", fs=store.fs)
        assert list(reopened.samples_of("Location")) == points


class TestEvents:
    def test_auto_registration_and_dedup(self):
        store = memory_store()
        assert store.append_events([ride(T0, T0 + 600)]) == 1
        assert store.append_events([ride(T0, T0 + 600)]) == 0
        assert store.registry.kind_of("Cycling") is StreamKind.EVENT
        assert store.has_event(ride(T0, T0 + 600))
        assert not store.has_event(ride(T0, T0 + 601))

    def test_same_interval_different_names(self):
        store = memory_store()
        store.append_events([ride(T0, T0 + 600, "a"), ride(T0, T0 + 600, "b")])
        assert len(store.events_of("Cycling")) == 2

    def test_query_finds_long_events_started_before_the_window(self):
        store = memory_store()
        store.append_events([ride(T0, T0 + 10000), ride(T0 + 20000, T0 + 20100)])
        found = store.query_events("Cycling", Window(T0 + 5000, T0 + 6000))
        assert [e.start for e in found] == [T0]
        assert store.query_events("Cycling", Window(T0 + 10000, T0 + 20000)) == []
        assert store.query_events("Sleep", Window(T0, T0 + 1)) == []

    def test_event_on_a_data_stream_id(self):
        store = memory_store()
        with pytest.raises(KindMismatchError):
            store.append_events([EventRecord("Heartrate", "x", Interval(T0, T0 + 1))])

    def test_invalid_events(self):
        with pytest.raises(DataError):
            EventRecord("", "x", Interval(T0, T0 + 1))
        with pytest.raises(InvalidIntervalError):
            Interval(T0, T0)

    def test_invalid_event_type_name(self):
        with pytest.raises(StoreError):
            memory_store().append_events([EventRecord("../escape", "x", Interval(T0, T0 + 1))])


class TestWatermark:
    def test_samples_and_events_advance_it(self):
        store = memory_store()
        assert store.watermark is None
        assert store.origin is None
        store.append_samples("Heartrate", [hr(T0 + 10, 80), hr(T0 + 20, 80)])
        assert store.watermark == T0 + 21
        store.append_events([ride(T0 + 30, T0 + 900)])
        assert store.watermark == T0 + 31
        assert store.origin == T0 + 10

    def test_never_moves_back(self):
        store = memory_store()
        store.append_samples("Heartrate", [hr(T0 + 100, 80)])
        store.append_samples("Heartrate", [hr(T0, 80)])
        assert store.watermark == T0 + 101
        assert store.registry.watermark.get("Heartrate") == T0 + 101


class TestPersistence:
    def test_reopen_on_disk(self, tmp_path):
        store = Store(str(tmp_path))
        store.append_samples("Heartrate", [hr(T0 + i, 70 + i) for i in range(5)])
        store.append_events([ride(T0, T0 + 60)])

        reopened = Store(str(tmp_path))
        assert list(reopened.samples_of("Heartrate")) == list(store.samples_of("Heartrate"))
        assert list(reopened.events_of("Cycling")) == [ride(T0, T0 + 60)]
        assert reopened.watermark == store.watermark
        assert reopened.registry.get("Heartrate").sources == {"watch"}

    def test_partial_last_line_is_truncated(self, caplog):
        fs = MockFileSystem()
        store = Store("/store", fs=fs)
        store.append_samples("Heartrate", [hr(T0, 70), hr(T0 + 1, 71)])
        fs.append(HR_PATH, "2019-06-01T00:00:02Z,7")

        with caplog.at_level(logging.WARNING):
            reopened = Store("/store", fs=fs)

        assert len(reopened.samples_of("Heartrate")) == 2
        assert fs.read(HR_PATH).endswith("\n")
        assert "partial record" in caplog.text
        reopened.append_samples("Heartrate", [hr(T0 + 2, 72)])
        assert len(Store("/store", fs=fs).samples_of("Heartrate")) == 3

    def test_corrupt_complete_line(self):
        fs = MockFileSystem()
        Store("/store", fs=fs).append_samples("Heartrate", [hr(T0, 70)])
        fs.append(HR_PATH, "not-a-time,1,bpm,watch\n")
        with pytest.raises(StoreError, match="Heartrate.csv:3"):
            Store("/store", fs=fs)

    def test_header_written_once(self):
        store = memory_store()
        store.append_samples("Heartrate", [hr(T0, 70)])
        store.append_samples("Heartrate", [hr(T0 + 1, 71)])
        lines = store.fs.read(HR_PATH).splitlines()
        assert lines[0] == "timestamp,value,unit,source"
        assert lines[1:] == [
            "2019-06-01T00:00:00Z,70.0,bpm,watch",
            "2019-06-01T00:00:01Z,71.0,bpm,watch",
        ]

    def test_stations_survive_reopen(self):
        store = memory_store()
        table = station_table(12.0, start=T0, hours=2)
        store.save_stations(table)
        reopened = Store("/store", fs=store.fs)
        assert reopened.stations.stations == table.stations
        assert reopened.stations.reading_count == 2


class TestRegistry:
    def test_defaults(self):
        registry = StreamRegistry.with_defaults()
        assert registry.get("Heartrate").unit == "bpm"
        assert registry.kind_of("Location") is StreamKind.LOCATION
        assert registry.event_types() == []

    def test_kind_is_fixed(self):
        registry = StreamRegistry.with_defaults()
        with pytest.raises(KindMismatchError):
            registry.register("Heartrate", StreamKind.EVENT)
        with pytest.raises(StoreError):
            registry.register("Heartrate", StreamKind.REAL, "W")
        assert registry.register("Heartrate", StreamKind.REAL, "bpm").unit == "bpm"

    def test_json_round_trip(self):
        store = memory_store()
        store.append_samples("Heartrate", [hr(T0, 70, "chest")])
        store.append_events([ride(T0, T0 + 60)])
        restored = StreamRegistry.from_json(store.registry.to_json())
        assert restored.entries == store.registry.entries

    def test_corrupt_registry(self):
        with pytest.raises(StoreError):
            StreamRegistry.from_json("{not json")
        fs = MockFileSystem()
        fs.write("/store/registry.json", '{"streams": {"X": {"kind": "liquid"}}}')
        with pytest.raises(StoreError):
            Store("/store", fs=fs)
