"""
Integration tests: the interface-event definitions on planted synthetic data,
the exposome chain, blood-oxygen events and multi-source fusion.
"""

import random

import pytest

from vitacep.algebra import Window
from vitacep.core.types import Sample
from vitacep.dsl import compile_definition, evaluate, parse
from vitacep.dsl.plan import EvaluationContext
from vitacep.infrastructure.filesystem import MockFileSystem
from vitacep.ingest.exercise import ExerciseCsvAdapter
from vitacep.physio.catalogue import get_derived
from vitacep.store import Store
from vitacep.tests.fixtures.synthetic import (
    DAY,
    EXPOSURE_EVENT,
    HOUR,
    PRESS_OVERLOAD,
    T0,
    UPHILL_CYCLE,
    VOL_OVERLOAD,
    exercise_csv,
    fixed_location,
    hr,
    memory_store,
    station_table,
    synthetic_day,
)


def run(text, store, window):
    plan = compile_definition(parse(text)[0], store.registry)
    return evaluate(plan, window, store)


def spans(events):
    return [(e.start, e.end) for e in events]


def assert_close(found, expected, tolerance=1):
    assert len(found) == len(expected), f"{found} != {expected}"
    for (start, end), (want_start, want_end) in zip(found, expected):
        assert abs(start - want_start) <= tolerance
        assert abs(end - want_end) <= tolerance


@pytest.fixture(scope="module")
def day():
    planted = synthetic_day()
    return planted, planted.load(memory_store())


class TestSyntheticDay:
    def test_volume_overload(self, day):
        planted, store = day
        found = run(VOL_OVERLOAD, store, Window(T0, T0 + DAY))
        assert_close(spans(found), planted.vol_overload)
        assert all(e.event_type == "VolOverload" for e in found)

    def test_pressure_overload(self, day):
        planted, store = day
        found = run(PRESS_OVERLOAD, store, Window(T0, T0 + DAY))
        assert_close(spans(found), planted.press_overload)

    def test_uphill_cycle_is_the_climb(self, day):
        planted, store = day
        (climb,) = run(UPHILL_CYCLE, store, Window(T0, T0 + DAY))
        climbing = [iv for iv in planted.vol_overload if planted.cycling.interval.contains(iv[0])]
        assert_close([(climb.start, climb.end)], climbing)
        assert climb.parameters["coverage.Cycling"] == climb.end - climb.start

    def test_coverage_names_the_branch_that_held(self, day):
        _, store = day
        found = run(VOL_OVERLOAD, store, Window(T0, T0 + DAY))
        ride = [e for e in found if e.parameters["coverage.Cycling"] > 0]
        assert len(ride) == 1
        assert ride[0].parameters["coverage.HR > 140"] == 0


def intake_store(pm25, heartrate):
    store = memory_store()
    start = heartrate[0].timestamp
    store.save_stations(station_table(pm25, start=T0, hours=6))
    store.append_samples("Location", fixed_location(start - 60, start + 300))
    store.append_samples("Heartrate", heartrate)
    return store


class TestExposomeChain:
    START = T0 + HOUR

    def ramp(self):
        # 150 bpm rising 1 bpm per second to 190 bpm
        return [hr(self.START + k, min(150 + k, 190)) for k in range(120)]

    def test_intake_events_start_at_the_crossing(self):
        store = intake_store(10.0, self.ramp())
        (event,) = run("Inhaled := PM25Intake > 0.7", store, Window(self.START, self.START + 600))
        # at 176 bpm breathing rate times tidal volume first exceeds 70 L/min
        assert event.start == self.START + 26
        assert event.end == self.START + 119 + 60
        assert event.stream_refs == {"Heartrate", "Location"}

    def test_doubling_concentration_doubles_intake(self):
        window = Window(self.START, self.START + 300)
        derived = get_derived("PM25Intake")
        single = derived.compute(EvaluationContext(intake_store(10.0, self.ramp())), window)
        double = derived.compute(EvaluationContext(intake_store(20.0, self.ramp())), window)
        assert len(single) == 120
        assert [s.value for s in double] == [2 * s.value for s in single]

    def test_zero_concentration_means_no_intake(self):
        store = intake_store(0.0, self.ramp())
        window = Window(self.START, self.START + 300)
        samples = get_derived("PM25Intake").compute(EvaluationContext(store), window)
        assert {s.value for s in samples} == {0.0}
        assert run("Inhaled := PM25Intake > 0", store, window) == []

    def test_exposure_event(self):
        heartrate = [hr(self.START + k, 130 if 60 <= k < 180 else 100) for k in range(240)]
        store = intake_store(12.0, heartrate)
        (event,) = run(EXPOSURE_EVENT, store, Window(self.START, self.START + 600))
        assert (event.start, event.end) == (self.START + 60, self.START + 180)

    def test_far_from_any_station(self):
        store = memory_store()
        store.save_stations(station_table(30.0, start=T0, hours=6, position=(40.0, 10.0)))
        store.append_samples("Location", fixed_location(self.START, self.START + 120))
        store.append_samples("Heartrate", self.ramp())
        assert run("E := PM25 > 1", store, Window(self.START, self.START + 600)) == []


class TestBloodOxygen:
    START = T0 + 5 * HOUR

    def altitude_store(self, altitudes):
        store = memory_store()
        store.append_samples(
            "Altitude",
            [Sample(self.START + k, float(a), "m", "watch") for k, a in enumerate(altitudes)],
        )
        return store

    def test_events_exactly_above_2500_m(self):
        altitudes = [2000 + 10 * k for k in range(101)]
        store = self.altitude_store(altitudes)
        (event,) = run("Hypoxia := SpO2 < 95", store, Window(self.START, self.START + 600))
        assert event.start == self.START + 51
        assert altitudes[51] == 2510
        assert event.end == self.START + 100 + 60

    def test_random_altitudes(self):
        rng = random.Random(110)
        altitudes = [rng.choice([rng.uniform(0, 5000), 2500.0]) for _ in range(1000)]
        store = self.altitude_store(altitudes)
        plan = compile_definition(parse("Hypoxia := SpO2 < 95")[0], store.registry)
        window = Window(self.START, self.START + len(altitudes))
        result, _ = plan.intervals(EvaluationContext(store), window)
        for k, altitude in enumerate(altitudes):
            assert result.covers(self.START + k) == (altitude > 2500)


class TestFusion:
    GRID = 5

    def heartrate(self, t):
        return 150 if (1000 <= t < 2500 or 4000 <= t < 4500) else 100

    def export(self, name, start, end):
        times = range(start, end, self.GRID)
        rows = [(T0 + t, {"heartrate_bpm": self.heartrate(t)}) for t in times]
        return exercise_csv(("Cycling", name, T0 + start, T0 + end), rows)

    def store_with(self, *files):
        fs = MockFileSystem()
        store = Store("/store", fs=fs)
        for name, start, end in files:
            fs.write(f"/in/{name}.csv", self.export(name, start, end))
            ExerciseCsvAdapter(fs).ingest(f"/in/{name}.csv", store)
        return store

    def test_two_sources_fill_each_other(self):
        window = Window(T0, T0 + 6000)
        a = spans(run("Hard := HR > 140", self.store_with(("a", 0, 3600)), window))
        b = spans(run("Hard := HR > 140", self.store_with(("b", 1800, 5400)), window))
        both_store = self.store_with(("a", 0, 3600), ("b", 1800, 5400))
        both = spans(run("Hard := HR > 140", both_store, window))

        assert a == [(T0 + 1000, T0 + 2500)]
        assert b == [(T0 + 1800, T0 + 2500), (T0 + 4000, T0 + 4500)]
        assert both == [(T0 + 1000, T0 + 2500), (T0 + 4000, T0 + 4500)]
        assert both_store.registry.get("Heartrate").sources == {"a", "b"}

    def test_overlapping_rides_merge(self):
        store = self.store_with(("a", 0, 3600), ("b", 1800, 5400))
        assert len(store.events_of("Cycling")) == 2
        assert spans(run("Riding := Cycling", store, Window(T0, T0 + 6000))) == [
            (T0, T0 + 5400)
        ]

    def test_union_query_is_a_superset(self):
        window = Window(T0, T0 + 6000)
        union = self.store_with(("a", 0, 3600), ("b", 1800, 5400))
        for single in (self.store_with(("a", 0, 3600)), self.store_with(("b", 1800, 5400))):
            single_times = {s.timestamp for s in single.query_samples("Heartrate", window)}
            union_times = {s.timestamp for s in union.query_samples("Heartrate", window)}
            assert single_times < union_times

    def test_union_matches_one_merged_file(self):
        window = Window(T0, T0 + 6000)
        union = self.store_with(("a", 0, 3600), ("b", 1800, 5400))
        merged = self.store_with(("merged", 0, 5400))
        assert spans(run(VOL_OVERLOAD, union, window)) == spans(run(VOL_OVERLOAD, merged, window))
