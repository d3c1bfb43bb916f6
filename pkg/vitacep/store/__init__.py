"""
VITACEP - Store Module

Append-only event and data stream store with its registry.
"""

from vitacep.store.registry import StreamRegistry, Watermark
from vitacep.store.store import Store

__all__ = ["Store", "StreamRegistry", "Watermark"]
