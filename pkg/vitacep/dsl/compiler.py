"""
VITACEP - Event-Pattern Compiler

Resolves the names in a parsed definition against the store registry and
builds its EvaluationPlan. Resolution rules:

- A comparison or detector call reads a data stream: configured alias first,
  then a stored real-valued stream, then a derived stream of the catalogue.
- A bare name is another registered definition (inlined), an event type, or
  a data stream (true wherever the stream holds a value). A name that is
  both an event type and a data stream is ambiguous.
"""

import dataclasses
import logging
from typing import Optional, Tuple

from vitacep.config.settings import AppConfig
from vitacep.core.errors import (
    AmbiguousReferenceError,
    PatternError,
    UnitMismatchError,
    UnresolvedReferenceError,
)
from vitacep.core.types import StreamKind
from vitacep.detectors import DetectorRegistry, create_registry
from vitacep.detectors.threshold import SupportDetector, ThresholdDetector, ThresholdSpec
from vitacep.dsl.ast import (
    And,
    Comparison,
    Definition,
    Delay,
    DetectorCall,
    EventRef,
    Node,
    Not,
    Or,
)
from vitacep.dsl.formatter import format_node
from vitacep.dsl.parser import parse
from vitacep.dsl.plan import (
    AndNode,
    DelayNode,
    EvaluationPlan,
    EventLeaf,
    NotNode,
    OrNode,
    PlanNode,
    SampleLeaf,
)
from vitacep.physio.catalogue import DerivedStream, get_derived
from vitacep.store.registry import StreamRegistry

logger = logging.getLogger(__name__)

EXTEND_ARGUMENT = "extend"


class Compiler:
    """Compiles definitions against one registry and configuration."""

    def __init__(
        self,
        registry: StreamRegistry,
        config: Optional[AppConfig] = None,
        detectors: Optional[DetectorRegistry] = None,
    ):
        self.registry = registry
        self.config = config or AppConfig()
        self.detectors = detectors or create_registry()

    def compile(self, definition: Definition) -> EvaluationPlan:
        root = self._node(definition.body, (definition.name,))
        compiled = dataclasses.replace(definition, lookback=root.lookback)
        logger.debug(
            f"Compiled {definition.name}: lookback {root.lookback}s, "
            f"inputs {sorted(root.inputs)}"
        )
        return EvaluationPlan(definition=compiled, root=root)

    def _node(self, node: Node, stack: Tuple[str, ...]) -> PlanNode:
        if isinstance(node, Comparison):
            return self._comparison(node)
        if isinstance(node, DetectorCall):
            return self._detector_call(node)
        if isinstance(node, EventRef):
            return self._reference(node, stack)
        if isinstance(node, Not):
            return NotNode(self._node(node.child, stack))
        if isinstance(node, And):
            return AndNode([self._node(c, stack) for c in node.children])
        if isinstance(node, Or):
            return OrNode([self._node(c, stack) for c in node.children])
        if isinstance(node, Delay):
            return DelayNode(self._node(node.child, stack), node.duration)
        raise TypeError(f"Not a pattern node: {node!r}")

    def _resolve_stream(self, name: str) -> Tuple[str, str, Optional[DerivedStream]]:
        """Return (stream id, unit, derived stream or None) for a data-stream name."""
        stream_id = self.config.stream_aliases.get(name, name)
        kind = self.registry.kind_of(stream_id)
        if kind is StreamKind.REAL:
            return stream_id, self.registry.get(stream_id).unit, None
        if kind is StreamKind.EVENT:
            raise UnresolvedReferenceError(name, "an event type, not a data stream")
        if kind is StreamKind.LOCATION:
            raise UnresolvedReferenceError(name, "a location stream has no values to compare")
        derived = get_derived(stream_id)
        if derived is None:
            raise UnresolvedReferenceError(name, "no such stream or event type")
        missing = [i for i in derived.inputs if i not in self.registry]
        if missing:
            raise UnresolvedReferenceError(name, f"derived from unregistered {missing}")
        return stream_id, derived.unit, derived

    def _comparison(self, node: Comparison) -> PlanNode:
        stream_id, unit, derived = self._resolve_stream(node.stream)
        if node.unit is not None and node.unit != unit:
            raise UnitMismatchError(
                f"{node.stream} is measured in {unit!r}, threshold is in {node.unit!r}"
            )
        detector = ThresholdDetector(
            ThresholdSpec(
                stream=stream_id,
                op=node.op,
                value=node.value,
                unit=unit,
                min_duration=self.config.threshold_min_duration,
                max_gap=self.config.max_gap,
            )
        )
        return SampleLeaf(
            format_node(node), stream_id, detector, derived, max_gap=self.config.max_gap
        )

    def _detector_call(self, node: DetectorCall) -> PlanNode:
        stream_id, _, derived = self._resolve_stream(node.stream)
        kwargs = dict(node.kwargs)
        extend_by = kwargs.pop(EXTEND_ARGUMENT, 0.0)
        if extend_by < 0 or not float(extend_by).is_integer():
            raise PatternError(f"{EXTEND_ARGUMENT} must be a non-negative whole number of seconds")
        detector = self.detectors.create(node.name, self.config, kwargs)
        return SampleLeaf(
            format_node(node),
            stream_id,
            detector,
            derived,
            extend_by=int(extend_by),
            max_gap=self.config.max_gap,
        )

    def _reference(self, node: EventRef, stack: Tuple[str, ...]) -> PlanNode:
        name = self.config.stream_aliases.get(node.event_type, node.event_type)
        if name in stack:
            cycle = " -> ".join(stack + (name,))
            raise UnresolvedReferenceError(name, f"cyclic definition {cycle}")

        entry = self.registry.definitions.get(name)
        if entry is not None:
            inlined = parse(entry.text, self.detectors.list_detectors())[0]
            return self._node(inlined.body, stack + (name,))

        kind = self.registry.kind_of(name)
        is_stream = kind in (StreamKind.REAL, StreamKind.LOCATION) or get_derived(name) is not None
        if kind is StreamKind.EVENT:
            if get_derived(name) is not None:
                raise AmbiguousReferenceError(name)
            return EventLeaf(name)
        if is_stream:
            if kind is StreamKind.LOCATION:
                stream_id, derived = name, None
            else:
                stream_id, _, derived = self._resolve_stream(name)
            return SampleLeaf(
                name,
                stream_id,
                SupportDetector(self.config.max_gap),
                derived,
                max_gap=self.config.max_gap,
            )
        raise UnresolvedReferenceError(name, "no such event type or stream")


def compile_definition(
    d: Definition,
    registry: StreamRegistry,
    config: Optional[AppConfig] = None,
    detectors: Optional[DetectorRegistry] = None,
) -> EvaluationPlan:
    """
    Build the evaluation plan of a definition.

    The plan's lookback is the largest, over root-to-leaf paths, of the summed
    DELAY durations plus the leaf's own history requirement.

    Raises:
        UnresolvedReferenceError: If a name resolves to nothing usable
        AmbiguousReferenceError: If a bare name is both an event type and a stream
        UnitMismatchError: If a threshold unit differs from the stream's unit
    """
    return Compiler(registry, config, detectors).compile(d)
