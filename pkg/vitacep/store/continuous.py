"""
VITACEP - Continuous Evaluation

Re-evaluates registered definitions as increments arrive and emits only
finalized events: intervals that end at least one lookback before the
store watermark. Each definition keeps a frontier, the earliest start of an
interval that may still change; frontiers persist in the registry so a
resumed watch neither repeats nor skips events.
"""

import logging
import threading
from typing import Any, Dict, List, Mapping, Optional, Sequence, Union

from vitacep.algebra import Window
from vitacep.core.errors import DuplicateDefinitionError
from vitacep.core.events import Event, EventType
from vitacep.core.types import EventRecord, StreamKind
from vitacep.dsl.ast import Definition
from vitacep.dsl.compiler import compile_definition
from vitacep.dsl.formatter import format_definition
from vitacep.dsl.parser import parse
from vitacep.dsl.plan import EvaluationContext, EvaluationPlan
from vitacep.store.registry import DefinitionEntry

logger = logging.getLogger(__name__)


class ContinuousEvaluator:
    """
    Keeps compiled plans of registered definitions and finalizes their events.

    Listens on the store's event bus: an append touching a definition's inputs
    puts the definition on the scheduled queue. advance() is serialized.
    """

    def __init__(self, store: Any):
        """
        Initialize evaluator and compile definitions already in the registry.

        Args:
            store: Store whose registry, bus and data are used
        """
        self.store = store
        self.plans: Dict[str, EvaluationPlan] = {}
        self.scheduled: List[str] = []
        self._lock = threading.RLock()

        for name, entry in store.registry.definitions.items():
            definition = parse(entry.text)[0]
            self.plans[name] = compile_definition(definition, store.registry, store.config)

        store.event_bus.subscribe(EventType.SAMPLES_APPENDED, self._on_samples_appended)
        store.event_bus.subscribe(EventType.EVENTS_APPENDED, self._on_events_appended)

    def _schedule(self, stream_id: str) -> None:
        with self._lock:
            for name, plan in self.plans.items():
                if stream_id in plan.inputs and name not in self.scheduled:
                    self.scheduled.append(name)
                    logger.debug(f"Scheduled {name} after append to {stream_id}")

    def _on_samples_appended(self, event: Event) -> None:
        self._schedule(event.data["stream_id"])

    def _on_events_appended(self, event: Event) -> None:
        self._schedule(event.data["event_type"])

    def register_definition(self, d: Definition) -> EvaluationPlan:
        """
        Compile and register a definition.

        Re-registering identical text is a no-op returning the existing plan.

        Raises:
            DuplicateDefinitionError: If the name is taken by another definition or a data stream
            PatternError: If the definition does not compile
        """
        registry = self.store.registry
        canonical = format_definition(d)
        with self._lock:
            existing = registry.definitions.get(d.name)
            if existing is not None:
                if existing.text == canonical and d.name in self.plans:
                    return self.plans[d.name]
                raise DuplicateDefinitionError(d.name)
            if registry.kind_of(d.name) in (StreamKind.REAL, StreamKind.LOCATION):
                raise DuplicateDefinitionError(d.name)

            plan = compile_definition(d, registry, self.store.config)
            self.store.register_stream(d.name, StreamKind.EVENT)
            registry.definitions[d.name] = DefinitionEntry(text=canonical)
            self.store.save_registry()
            self.plans[d.name] = plan
            self.scheduled.append(d.name)

        logger.info(f"Registered definition {d.name} (lookback {plan.lookback}s)")
        self.store.event_bus.publish(
            Event.create(EventType.DEFINITION_REGISTERED, name=d.name, lookback=plan.lookback)
        )
        return plan

    def advance(
        self,
        stream_id: Union[str, Mapping[str, Sequence[Any]]],
        items: Optional[Sequence[Any]] = None,
    ) -> List[EventRecord]:
        """
        Ingest an increment and emit the events it finalizes.

        Args:
            stream_id: Stream id or event type of the increment, or a mapping
                of several ids to their increments
            items: Samples, or EventRecords for an event type

        Returns:
            Newly finalized events, sorted by (start, event_type)
        """
        if isinstance(stream_id, Mapping):
            increments = dict(stream_id)
        else:
            increments = {stream_id: list(items or [])}

        with self._lock:
            for sid, batch in increments.items():
                batch = list(batch)
                if batch and all(isinstance(r, EventRecord) for r in batch):
                    self.store.append_events(batch)
                elif batch:
                    self.store.append_samples(sid, batch)
            return self.finalize()

    def finalize(self) -> List[EventRecord]:
        """Evaluate every registered definition up to the current watermark."""
        watermark = self.store.watermark
        origin = self.store.origin
        emitted: List[EventRecord] = []
        if watermark is None or origin is None:
            return emitted

        registry = self.store.registry
        ctx = EvaluationContext(self.store)
        with self._lock:
            for name, plan in self.plans.items():
                entry = registry.definitions[name]
                frontier = entry.frontier if entry.frontier is not None else origin
                horizon = watermark - plan.lookback
                if horizon <= frontier:
                    continue

                window = Window(frontier - 2 * plan.lookback - 1, watermark)
                result, trace = plan.intervals(ctx, window)
                ready = [iv for iv in result if iv.start >= frontier and iv.end <= horizon]
                pending = [iv.start for iv in result if iv.start >= frontier and iv.end > horizon]

                records = [r for r in plan.records(ready, trace) if not self.store.has_event(r)]
                self.store.append_events(records)
                emitted.extend(records)
                entry.frontier = min([horizon] + pending)
                logger.debug(
                    f"{name}: {len(records)} finalized, frontier {entry.frontier}, "
                    f"{len(pending)} pending"
                )
            self.store.save_registry()
            self.scheduled.clear()

        if emitted:
            self.store.event_bus.publish(
                Event.create(EventType.EVENTS_FINALIZED, count=len(emitted))
            )
        return sorted(emitted, key=lambda e: (e.start, e.event_type, e.end))
