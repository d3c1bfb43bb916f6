"""
VITACEP - Event-Pattern AST

Immutable nodes of parsed event-pattern definitions. Structural equality
(dataclass __eq__) is the identity used by round-trip checks.
"""

from dataclasses import dataclass
from typing import Iterator, Optional, Tuple, Union


@dataclass(frozen=True)
class Comparison:
    """Threshold on a data stream, e.g. Heartrate > 120."""

    stream: str
    op: str  # one of >, >=, <, <=
    value: float
    unit: Optional[str] = None


@dataclass(frozen=True)
class DetectorCall:
    """Call of a registered detector, e.g. detect-climb(Altitude, min_total_gain=20)."""

    name: str
    stream: str
    kwargs: Tuple[Tuple[str, float], ...] = ()


@dataclass(frozen=True)
class EventRef:
    """Reference to an event type in the events log (or another definition)."""

    event_type: str


@dataclass(frozen=True)
class Not:
    child: "Node"


@dataclass(frozen=True)
class And:
    children: Tuple["Node", ...]

    def __post_init__(self):
        if len(self.children) < 2:
            raise ValueError("And needs at least two children")


@dataclass(frozen=True)
class Or:
    children: Tuple["Node", ...]

    def __post_init__(self):
        if len(self.children) < 2:
            raise ValueError("Or needs at least two children")


@dataclass(frozen=True)
class Delay:
    child: "Node"
    duration: int  # seconds, > 0

    def __post_init__(self):
        if self.duration <= 0:
            raise ValueError("Delay duration must be positive")


Node = Union[Comparison, DetectorCall, EventRef, Not, And, Or, Delay]


@dataclass(frozen=True)
class Definition:
    """Named event-pattern definition; lookback is filled in by compile()."""

    name: str
    body: Node
    lookback: Optional[int] = None


def walk(node: Node) -> Iterator[Node]:
    """Yield a node and all of its descendants, depth first."""
    yield node
    if isinstance(node, (Not, Delay)):
        yield from walk(node.child)
    elif isinstance(node, (And, Or)):
        for child in node.children:
            yield from walk(child)
