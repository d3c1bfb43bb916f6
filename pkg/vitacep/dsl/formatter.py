"""
VITACEP - Event-Pattern Formatter

Canonical text for definitions. Operands of AND/OR/NOT are always
parenthesized, so parse(format_definition(d)) rebuilds the same tree.
"""

from vitacep.core.utils import format_duration, format_number
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


def format_node(node: Node) -> str:
    """Canonical text of one expression."""
    if isinstance(node, Comparison):
        text = f"{node.stream} {node.op} {format_number(node.value)}"
        return f"{text} {node.unit}" if node.unit else text
    if isinstance(node, DetectorCall):
        args = "".join(f", {key}={format_number(value)}" for key, value in node.kwargs)
        return f"{node.name}({node.stream}{args})"
    if isinstance(node, EventRef):
        return node.event_type
    if isinstance(node, Not):
        return f"NOT ({format_node(node.child)})"
    if isinstance(node, And):
        return " AND ".join(f"({format_node(c)})" for c in node.children)
    if isinstance(node, Or):
        return " OR ".join(f"({format_node(c)})" for c in node.children)
    if isinstance(node, Delay):
        return f"DELAY({format_node(node.child)}, {format_duration(node.duration)})"
    raise TypeError(f"Not a pattern node: {node!r}")


def format_definition(d: Definition) -> str:
    """Canonical "Name := expression" text."""
    return f"{d.name} := {format_node(d.body)}"
