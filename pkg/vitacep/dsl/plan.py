"""
VITACEP - Evaluation Plans

Executable form of a compiled definition: leaves invoke detectors on stored
or derived streams (or read the events log) and inner nodes apply the
interval algebra. Every node knows its lookback and the stored inputs it reads.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Dict, FrozenSet, List, Optional, Sequence, Tuple

from vitacep.algebra import Window, and_, clip, delay, extend, not_, or_
from vitacep.config.settings import AppConfig
from vitacep.core.types import EventRecord, Interval, IntervalSet, total_duration
from vitacep.detectors.base import Detector
from vitacep.detectors.events import events_to_intervalset
from vitacep.dsl.ast import Definition
from vitacep.exposome.stations import StationTable
from vitacep.physio.catalogue import DerivedStream

logger = logging.getLogger(__name__)

Trace = Dict[str, IntervalSet]


class EvaluationContext:
    """Read access to a store plus the settings derivations need."""

    def __init__(self, store: Any, config: Optional[AppConfig] = None):
        self.store = store
        self.config = config or store.config

    @property
    def stations(self) -> StationTable:
        return self.store.stations

    def samples(self, stream_id: str, window: Window) -> Sequence[Any]:
        return self.store.query_samples(stream_id, window)

    def locations(self, stream_id: str, window: Window) -> Sequence[Any]:
        return self.store.query_samples(stream_id, window)

    def events(self, event_type: str, window: Window) -> List[EventRecord]:
        return self.store.query_events(event_type, window)


class PlanNode(ABC):
    """Node of an evaluation plan."""

    label: str = ""

    @property
    @abstractmethod
    def lookback(self) -> int:
        """Seconds of history the node's value at time t depends on."""

    @property
    @abstractmethod
    def inputs(self) -> FrozenSet[str]:
        """Stored streams and event types the node reads."""

    @abstractmethod
    def evaluate(self, ctx: EvaluationContext, window: Window, trace: Trace) -> IntervalSet:
        """Truth set of the node within the window; leaves record themselves in trace."""


class SampleLeaf(PlanNode):
    """Detector applied to a stored or derived stream."""

    def __init__(
        self,
        label: str,
        stream_id: str,
        detector: Detector,
        derived: Optional[DerivedStream] = None,
        extend_by: int = 0,
        max_gap: int = 0,
    ):
        self.label = label
        self.stream_id = stream_id
        self.detector = detector
        self.derived = derived
        self.extend_by = extend_by
        self.max_gap = max_gap

    @property
    def lookback(self) -> int:
        alignment = self.max_gap if self.derived else 0
        return self.detector.lookback + self.extend_by + alignment

    @property
    def inputs(self) -> FrozenSet[str]:
        return frozenset(self.derived.inputs) if self.derived else frozenset({self.stream_id})

    def evaluate(self, ctx: EvaluationContext, window: Window, trace: Trace) -> IntervalSet:
        span = window.expanded(self.lookback)
        if self.derived is not None:
            samples = self.derived.compute(ctx, span)
        else:
            samples = ctx.samples(self.stream_id, span)
        detected = self.detector.detect(samples)
        if self.extend_by:
            result = extend(detected, self.extend_by, window)
        else:
            result = clip(detected, window)
        trace[self.label] = result
        return result


class EventLeaf(PlanNode):
    """Intervals of an event type from the events log."""

    def __init__(self, event_type: str):
        self.label = event_type
        self.event_type = event_type

    @property
    def lookback(self) -> int:
        return 0

    @property
    def inputs(self) -> FrozenSet[str]:
        return frozenset({self.event_type})

    def evaluate(self, ctx: EvaluationContext, window: Window, trace: Trace) -> IntervalSet:
        events = ctx.events(self.event_type, window)
        result = clip(events_to_intervalset(events, self.event_type), window)
        trace[self.label] = result
        return result


class NotNode(PlanNode):
    """Complement within the evaluation window."""

    def __init__(self, child: PlanNode):
        self.child = child

    @property
    def lookback(self) -> int:
        return self.child.lookback

    @property
    def inputs(self) -> FrozenSet[str]:
        return self.child.inputs

    def evaluate(self, ctx: EvaluationContext, window: Window, trace: Trace) -> IntervalSet:
        return not_(self.child.evaluate(ctx, window, trace), window)


class _NaryNode(PlanNode):
    def __init__(self, children: Sequence[PlanNode]):
        self.children = tuple(children)

    @property
    def lookback(self) -> int:
        return max(c.lookback for c in self.children)

    @property
    def inputs(self) -> FrozenSet[str]:
        return frozenset().union(*(c.inputs for c in self.children))


class AndNode(_NaryNode):
    def evaluate(self, ctx: EvaluationContext, window: Window, trace: Trace) -> IntervalSet:
        result = self.children[0].evaluate(ctx, window, trace)
        for child in self.children[1:]:
            result = and_(result, child.evaluate(ctx, window, trace))
        return result


class OrNode(_NaryNode):
    def evaluate(self, ctx: EvaluationContext, window: Window, trace: Trace) -> IntervalSet:
        result = self.children[0].evaluate(ctx, window, trace)
        for child in self.children[1:]:
            result = or_(result, child.evaluate(ctx, window, trace))
        return result


class DelayNode(PlanNode):
    """Child shifted forward in time by a fixed duration."""

    def __init__(self, child: PlanNode, duration: int):
        self.child = child
        self.duration = duration

    @property
    def lookback(self) -> int:
        return self.duration + self.child.lookback

    @property
    def inputs(self) -> FrozenSet[str]:
        return self.child.inputs

    def evaluate(self, ctx: EvaluationContext, window: Window, trace: Trace) -> IntervalSet:
        # leaf traces hold undelayed child intervals
        earlier = window.expanded(self.duration)
        return delay(self.child.evaluate(ctx, earlier, trace), self.duration, window)


@dataclass(frozen=True)
class EvaluationPlan:
    """Compiled definition ready to run against a store."""

    definition: Definition
    root: PlanNode

    @property
    def name(self) -> str:
        return self.definition.name

    @property
    def lookback(self) -> int:
        return self.root.lookback

    @property
    def inputs(self) -> FrozenSet[str]:
        return self.root.inputs

    def intervals(self, ctx: EvaluationContext, window: Window) -> Tuple[IntervalSet, Trace]:
        """Truth set over the window plus each leaf's own truth set."""
        trace: Trace = {}
        return self.root.evaluate(ctx, window, trace), trace

    def records(self, intervals: Sequence[Interval], trace: Trace) -> List[EventRecord]:
        """
        One EventRecord per interval.

        Parameters carry the definition name and, per leaf, the seconds of the
        event during which that leaf held ("coverage.<leaf>").
        """
        records = []
        refs = frozenset(self.inputs)
        for iv in intervals:
            parameters: Dict[str, Any] = {"definition": self.name}
            event_span = IntervalSet((iv,))
            for label in sorted(trace):
                parameters[f"coverage.{label}"] = total_duration(and_(trace[label], event_span))
            records.append(
                EventRecord(
                    event_type=self.name,
                    event_name=self.name,
                    interval=iv,
                    parameters=parameters,
                    stream_refs=refs,
                )
            )
        return records


def evaluate(
    plan: EvaluationPlan, w: Window, store: Any, config: Optional[AppConfig] = None
) -> List[EventRecord]:
    """
    Evaluate a compiled definition over a window.

    Args:
        plan: Result of compile_definition()
        w: Evaluation window; NOT complements within it
        store: Store to read samples, events and stations from
        config: Settings for derived streams (the store's if None)

    Returns:
        Events sorted by start, event_type = definition name
    """
    result, trace = plan.intervals(EvaluationContext(store, config), w)
    logger.debug(f"{plan.name}: {len(result)} intervals in {w}")
    return plan.records(result.intervals, trace)
