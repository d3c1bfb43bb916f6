"""
Unit tests for continuous evaluation: finalization by watermark, frontiers,
the scheduled queue and equivalence with evaluating everything at once.
"""

import random

import pytest

from vitacep.algebra import Window
from vitacep.core.errors import DuplicateDefinitionError, UnresolvedReferenceError
from vitacep.core.events import EventType
from vitacep.core.types import EventRecord, Interval, StreamKind
from vitacep.dsl import evaluate, parse
from vitacep.store import Store
from vitacep.tests.fixtures.synthetic import (
    DAY,
    T0,
    UPHILL_CYCLE,
    chunk_randomly,
    hr,
    memory_store,
    minute_heartrate,
)

DEFINITIONS = """
High := HR > 140
Recovery := DELAY(HR > 140, 30m) AND HR < 100
Rest := NOT (HR > 100)
"""


def define(store, text):
    return [store.register_definition(d) for d in parse(text)]


def minutes(first, last, high=()):
    """Minute samples from T0+first to T0+last inclusive; 150 bpm inside high, else 100."""
    lo, hi = high or (0, 0)
    return [hr(T0 + t, 150 if lo <= t < hi else 100) for t in range(first, last + 1, 60)]


def as_dicts(events):
    return sorted((e.to_dict() for e in events), key=lambda d: (d["event_type"], d["start"]))


class TestFinalization:
    def test_withheld_until_one_lookback_before_watermark(self):
        store = memory_store()
        (plan,) = define(store, "Shifted := DELAY(HR > 140, 1h)")
        assert plan.lookback == 3660

        first = store.advance("Heartrate", minutes(0, 9540, high=(3600, 4200)))
        # the delayed event ends at +7800, 29 minutes before the watermark
        assert store.watermark == T0 + 9541
        assert first == []

        second = store.advance("Heartrate", minutes(9600, 14400))
        assert [(e.start, e.end) for e in second] == [(T0 + 7200, T0 + 7800)]
        assert second[0].event_type == "Shifted"
        assert list(store.events_of("Shifted")) == second

    def test_nothing_before_one_lookback_of_data(self):
        store = memory_store()
        define(store, "High := HR > 140")
        assert store.advance("Heartrate", [hr(T0, 150), hr(T0 + 30, 150)]) == []

    def test_events_are_emitted_once(self):
        store = memory_store()
        define(store, "High := HR > 140")
        samples = minutes(0, 7200, high=(600, 1200))
        emitted = store.advance("Heartrate", samples)
        assert [(e.start, e.end) for e in emitted] == [(T0 + 600, T0 + 1200)]
        assert store.advance("Heartrate", samples) == []
        assert store.continuous.finalize() == []
        assert len(store.events_of("High")) == 1

    def test_frontier_persists_across_reopen(self):
        store = memory_store()
        define(store, "High := HR > 140")
        store.advance("Heartrate", minutes(0, 3600, high=(600, 1200)))
        frontier = store.registry.definitions["High"].frontier

        reopened = Store("/store", fs=store.fs)
        assert reopened.registry.definitions["High"].frontier == frontier
        assert set(reopened.continuous.plans) == {"High"}
        later = reopened.advance("Heartrate", minutes(3660, 7200, high=(5000, 5400)))
        assert [(e.start, e.end) for e in later] == [(T0 + 5040, T0 + 5400)]
        assert len(reopened.events_of("High")) == 2

    def test_finalized_notification(self):
        store = memory_store()
        define(store, "High := HR > 140")
        seen = []
        store.event_bus.subscribe(EventType.EVENTS_FINALIZED, seen.append)
        store.advance("Heartrate", minutes(0, 3600, high=(600, 1200)))
        assert [e.data["count"] for e in seen] == [1]

    def test_mapping_increment(self):
        store = memory_store()
        store.register_stream("Cycling", StreamKind.EVENT)
        define(store, "Ride := Cycling AND HR > 140")
        ride = EventRecord("Cycling", "ride", Interval(T0 + 300, T0 + 900))
        emitted = store.advance(
            {"Heartrate": minutes(0, 3600, high=(0, 3660)), "Cycling": [ride]}
        )
        assert [(e.start, e.end) for e in emitted] == [(T0 + 300, T0 + 900)]


class TestRegistration:
    def test_scheduled_queue_follows_inputs(self):
        store = memory_store()
        store.register_stream("Cycling", StreamKind.EVENT)
        define(store, UPHILL_CYCLE)
        assert store.continuous.scheduled == ["UphillCycle"]

        store.continuous.scheduled.clear()
        store.append_samples("Heartrate", [hr(T0, 80)])
        assert store.continuous.scheduled == []

        store.append_events([EventRecord("Cycling", "ride", Interval(T0, T0 + 60))])
        assert store.continuous.scheduled == ["UphillCycle"]

    def test_reregistering_same_text_is_a_no_op(self):
        store = memory_store()
        (plan,) = define(store, "High := HR > 140")
        assert define(store, "High := (HR > 140)") == [plan]
        with pytest.raises(DuplicateDefinitionError):
            define(store, "High := HR > 150")

    def test_name_of_a_data_stream_is_taken(self):
        store = memory_store()
        store.register_stream("Meal", StreamKind.EVENT)
        with pytest.raises(DuplicateDefinitionError):
            define(store, "Heartrate := Meal")

    def test_compile_errors_surface_at_registration(self):
        store = memory_store()
        with pytest.raises(UnresolvedReferenceError):
            define(store, "Nap := Sleeep")
        assert "Nap" not in store.registry.definitions

    def test_definitions_can_reference_each_other(self):
        store = memory_store()
        define(store, "High := HR > 140\nLateHigh := DELAY(High, 1h)")
        assert store.continuous.plans["LateHigh"].lookback == 3660
        assert store.registry.kind_of("LateHigh") is StreamKind.EVENT


class TestEquivalence:
    def run(self, chunks):
        store = memory_store()
        define(store, DEFINITIONS)
        emitted = []
        for chunk in chunks:
            emitted.extend(store.advance("Heartrate", chunk))
        return store, emitted

    def test_random_chunkings_match_one_batch(self):
        samples = minute_heartrate(days=2, seed=80)
        _, whole = self.run([samples])
        assert {e.event_type for e in whole} == {"High", "Recovery", "Rest"}

        rng = random.Random(81)
        for _ in range(100):
            store, chunked = self.run(chunk_randomly(samples, rng))
            assert as_dicts(chunked) == as_dicts(whole)
            keys = [e.dedup_key for e in chunked]
            assert len(keys) == len(set(keys))

    def test_matches_batch_evaluation_up_to_the_horizon(self):
        samples = minute_heartrate(days=2, seed=82)
        store, emitted = self.run([samples[i : i + 60] for i in range(0, len(samples), 60)])
        origin, watermark = store.origin, store.watermark
        for name in ("High", "Recovery"):
            plan = store.continuous.plans[name]
            batch = [
                e
                for e in evaluate(plan, Window(origin, watermark), store)
                if e.end <= watermark - plan.lookback
            ]
            assert as_dicts([e for e in emitted if e.event_type == name]) == as_dicts(batch)
        assert watermark == origin + 2 * DAY - 59
