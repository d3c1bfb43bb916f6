"""
VITACEP - Source Adapter Interface

Defines the interface for source adapters: one parser per data source that
converts an export file into the unified schema and writes it to the store.
"""

import csv
import io
import logging
import os
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Optional, Tuple

from vitacep.core.errors import IngestError
from vitacep.core.types import EventRecord, LocationSample, StreamKind
from vitacep.infrastructure.filesystem import FileSystemAdapter, RealFileSystem

logger = logging.getLogger(__name__)


@dataclass
class IngestBatch:
    """Records parsed from one file, not yet written."""

    samples: Dict[str, List[Any]] = field(default_factory=dict)
    events: List[EventRecord] = field(default_factory=list)
    units: Dict[str, str] = field(default_factory=dict)  # unit of every stream in the batch

    def add_sample(self, stream_id: str, sample: Any, unit: str = "") -> None:
        self.samples.setdefault(stream_id, []).append(sample)
        if unit:
            self.units.setdefault(stream_id, unit)

    def kind_of(self, stream_id: str) -> StreamKind:
        first = self.samples[stream_id][0]
        return StreamKind.LOCATION if isinstance(first, LocationSample) else StreamKind.REAL


@dataclass
class IngestResult:
    """Counts of records actually written (duplicates excluded)."""

    events: int = 0
    samples: Dict[str, int] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return self.events + sum(self.samples.values())

    def to_dict(self) -> Dict[str, Any]:
        return {"events": self.events, "samples": dict(sorted(self.samples.items()))}


@dataclass(frozen=True)
class AdapterSpec:
    """Which adapter reads which file, with optional renames of its stream ids."""

    adapter: str
    path: str
    mappings: Tuple[Tuple[str, str], ...] = ()


class SourceAdapter(ABC):
    """
    Interface for source adapters.

    Subclasses implement read(); ingest() writes the batch through the store,
    whose deduplication makes re-ingesting a file a no-op.
    """

    name: str = ""

    def __init__(self, fs: Optional[FileSystemAdapter] = None):
        self.fs = fs or RealFileSystem()

    @abstractmethod
    def read(self, path: str) -> IngestBatch:
        """
        Parse and validate a source file.

        Raises:
            IngestError: Naming the file and line of the first bad record
        """
        pass

    def ingest(
        self, path: str, store: Any, mappings: Optional[Dict[str, str]] = None
    ) -> IngestResult:
        """
        Read a file and append its records to the store.

        Streams the store does not know yet are registered with the unit found
        in the file.

        Args:
            path: Source file
            store: Target store
            mappings: Optional renames from the adapter's stream ids to store ids
        """
        batch = self.read(path)
        rename = mappings or {}
        result = IngestResult()
        for stream_id, samples in batch.samples.items():
            target = rename.get(stream_id, stream_id)
            if target not in store.registry:
                unit = batch.units.get(stream_id, "")
                store.register_stream(target, batch.kind_of(stream_id), unit)
            result.samples[target] = store.append_samples(target, samples)
        result.events = store.append_events(batch.events)
        logger.info(f"Ingested {path} with {self.name}: {result.to_dict()}")
        return result

    def _text(self, path: str) -> str:
        if not self.fs.exists(path):
            raise IngestError("file not found", path)
        return self.fs.read(path)


def source_name(path: str) -> str:
    """Default source id of a file: its name without extension."""
    return os.path.splitext(os.path.basename(path))[0]


def csv_rows(text: str) -> Iterator[Tuple[int, List[str]]]:
    """Yield (line number, stripped cells) for every non-blank CSV row."""
    reader = csv.reader(io.StringIO(text))
    for row in reader:
        if not row or all(not cell.strip() for cell in row):
            continue
        yield reader.line_num, [cell.strip() for cell in row]
