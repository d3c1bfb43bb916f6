"""
VITACEP - Stream Registry

Source-relation mapping of the store: every stream id with its kind, unit,
contributing sources and watermark, plus registered definitions and their
continuous-evaluation frontiers. Persisted as registry.json.
"""

import json
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Optional, Set, Tuple

from vitacep.core.errors import KindMismatchError, StoreError, UnknownStreamError
from vitacep.core.types import StreamKind, Timestamp

REGISTRY_VERSION = 1

# Streams and units of the supported sources
DEFAULT_STREAMS: Tuple[Tuple[str, StreamKind, str], ...] = (
    ("Heartrate", StreamKind.REAL, "bpm"),
    ("Power", StreamKind.REAL, "W"),
    ("Cadence", StreamKind.REAL, "rpm"),
    ("Altitude", StreamKind.REAL, "m"),
    ("Location", StreamKind.LOCATION, "deg"),
    ("StepCount", StreamKind.REAL, "count"),
    ("Weight", StreamKind.REAL, "kg"),
    ("Stairs", StreamKind.REAL, "count/day"),
)


@dataclass
class StreamEntry:
    """Registry entry for one stream or event type."""

    kind: StreamKind
    unit: str = ""
    sources: Set[str] = field(default_factory=set)
    watermark: Optional[Timestamp] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "unit": self.unit,
            "sources": sorted(self.sources),
            "watermark": self.watermark,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "StreamEntry":
        return cls(
            kind=StreamKind(data["kind"]),
            unit=data.get("unit", ""),
            sources=set(data.get("sources", [])),
            watermark=data.get("watermark"),
        )


class Watermark:
    """Per-stream latest finalized timestamps, monotone non-decreasing."""

    def __init__(self, entries: Dict[str, StreamEntry]):
        self._entries = entries

    def get(self, stream_id: str) -> Optional[Timestamp]:
        entry = self._entries.get(stream_id)
        return entry.watermark if entry else None

    def advance(self, stream_id: str, ts: Timestamp) -> bool:
        """Move a stream's watermark to ts if that is later. Returns True if it moved."""
        entry = self._entries[stream_id]
        if entry.watermark is None or ts > entry.watermark:
            entry.watermark = ts
            return True
        return False

    @property
    def overall(self) -> Optional[Timestamp]:
        """Store-wide watermark: the latest over all streams."""
        marks = [e.watermark for e in self._entries.values() if e.watermark is not None]
        return max(marks) if marks else None


@dataclass
class DefinitionEntry:
    text: str
    frontier: Optional[Timestamp] = None


class StreamRegistry:
    """
    Stream ids with kinds and units; kinds never change once registered.
    """

    def __init__(self):
        self.entries: Dict[str, StreamEntry] = {}
        self.definitions: Dict[str, DefinitionEntry] = {}
        self.watermark = Watermark(self.entries)

    @classmethod
    def with_defaults(cls) -> "StreamRegistry":
        registry = cls()
        for stream_id, kind, unit in DEFAULT_STREAMS:
            registry.register(stream_id, kind, unit)
        return registry

    def register(self, stream_id: str, kind: StreamKind, unit: str = "") -> StreamEntry:
        """
        Register a stream, or return the existing entry if it matches.

        Raises:
            KindMismatchError: If the id is registered with another kind
            StoreError: If the id is registered with another unit
        """
        if not stream_id:
            raise StoreError("Stream id must be non-empty")
        existing = self.entries.get(stream_id)
        if existing is not None:
            if existing.kind is not kind:
                raise KindMismatchError(
                    f"{stream_id} is registered as {existing.kind.value}, not {kind.value}"
                )
            if unit and existing.unit and unit != existing.unit:
                raise StoreError(
                    f"{stream_id} is registered in {existing.unit!r}, not {unit!r}"
                )
            return existing
        entry = StreamEntry(kind=kind, unit=unit)
        self.entries[stream_id] = entry
        return entry

    def get(self, stream_id: str) -> StreamEntry:
        """
        Raises:
            UnknownStreamError: If the id is not registered
        """
        try:
            return self.entries[stream_id]
        except KeyError:
            raise UnknownStreamError(stream_id) from None

    def __contains__(self, stream_id: object) -> bool:
        return stream_id in self.entries

    def __iter__(self) -> Iterator[str]:
        return iter(sorted(self.entries))

    def kind_of(self, stream_id: str) -> Optional[StreamKind]:
        entry = self.entries.get(stream_id)
        return entry.kind if entry else None

    def event_types(self) -> List[str]:
        return sorted(k for k, e in self.entries.items() if e.kind is StreamKind.EVENT)

    def to_json(self) -> str:
        return json.dumps(
            {
                "version": REGISTRY_VERSION,
                "streams": {k: self.entries[k].to_dict() for k in sorted(self.entries)},
                "definitions": {
                    name: {"text": d.text, "frontier": d.frontier}
                    for name, d in self.definitions.items()
                },
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "StreamRegistry":
        """
        Raises:
            StoreError: If the document is not a registry
        """
        try:
            data = json.loads(text)
            registry = cls()
            for stream_id, entry in data.get("streams", {}).items():
                registry.entries[stream_id] = StreamEntry.from_dict(entry)
            for name, d in data.get("definitions", {}).items():
                registry.definitions[name] = DefinitionEntry(d["text"], d.get("frontier"))
        except (ValueError, KeyError, TypeError, AttributeError) as e:
            raise StoreError(f"Corrupt registry: {e}") from e
        return registry
