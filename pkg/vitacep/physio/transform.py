"""
VITACEP - Transformation Functions

Enriches events with aggregates of the streams they reference and writes
derived streams back to the store as ordinary streams.
"""

import dataclasses
import logging
from typing import Any, Dict, Iterable, List, Optional

import numpy as np

from vitacep.algebra import Window
from vitacep.config.settings import AppConfig
from vitacep.core.errors import UnknownStreamError
from vitacep.core.types import EventRecord, Sample, StreamKind
from vitacep.detectors.base import fuse_samples, fused_samples
from vitacep.physio.catalogue import get_derived

logger = logging.getLogger(__name__)

DERIVED_SOURCE = "derived"
GAIN_STREAMS = ("Altitude",)


def stream_summary(stream_id: str, samples: List[Sample]) -> Dict[str, Any]:
    """Aggregate parameters of one stream over an event."""
    _, values = fuse_samples(samples)
    summary: Dict[str, Any] = {
        f"{stream_id}.mean": float(np.mean(values)),
        f"{stream_id}.max": float(np.max(values)),
        f"{stream_id}.min": float(np.min(values)),
        f"{stream_id}.samples": len(values),
    }
    if stream_id in GAIN_STREAMS:
        steps = np.diff(values)
        summary[f"{stream_id}.gain"] = float(steps[steps > 0].sum())
    return summary


def enrich_events(events: Iterable[EventRecord], store: Any) -> List[EventRecord]:
    """
    Copies of the events with aggregates of their referenced real-valued streams.

    Streams without samples inside an event add nothing. Stored events are
    never modified.
    """
    enriched = []
    for event in events:
        parameters = dict(event.parameters)
        window = Window(event.start, event.end)
        for stream_id in sorted(event.stream_refs):
            if store.registry.kind_of(stream_id) is not StreamKind.REAL:
                continue
            samples = store.query_samples(stream_id, window)
            if samples:
                parameters.update(stream_summary(stream_id, samples))
        enriched.append(dataclasses.replace(event, parameters=parameters))
    return enriched


def materialize_derived(
    name: str, window: Window, store: Any, config: Optional[AppConfig] = None
) -> int:
    """
    Compute a derived stream over a window and append it to the store.

    Samples carry source "derived"; readings from several sources at one
    second are averaged first.

    Returns:
        Number of samples written

    Raises:
        UnknownStreamError: If name is not a derived stream
    """
    from vitacep.dsl.plan import EvaluationContext

    derived = get_derived(name)
    if derived is None:
        raise UnknownStreamError(name)
    ctx = EvaluationContext(store, config)
    computed = [s for s in derived.compute(ctx, window) if window.start <= s.timestamp < window.end]
    samples = [
        dataclasses.replace(s, source=DERIVED_SOURCE)
        for s in fused_samples(sorted(computed, key=lambda s: s.timestamp))
    ]
    store.register_stream(name, StreamKind.REAL, derived.unit)
    written = store.append_samples(name, samples)
    logger.info(f"Materialized {written} {name} samples over {window}")
    return written
