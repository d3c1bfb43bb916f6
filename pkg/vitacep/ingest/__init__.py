"""
VITACEP - Ingest Module

Registry of source adapters that convert vendor exports into the unified
schema (exercise-csv, health-csv, location-csv) plus the station loader.
"""

from typing import Dict, List, Optional, Type

from vitacep.core.errors import ConfigurationError
from vitacep.infrastructure.filesystem import FileSystemAdapter
from vitacep.ingest.base import AdapterSpec, IngestResult, SourceAdapter


class AdapterRegistry:
    """Registry of source adapter classes by name."""

    def __init__(self):
        self._adapters: Dict[str, Type[SourceAdapter]] = {}

    def register(self, name: str, adapter_class: Type[SourceAdapter]) -> None:
        self._adapters[name] = adapter_class

    def __contains__(self, name: str) -> bool:
        return name in self._adapters

    def create(self, name: str, fs: Optional[FileSystemAdapter] = None) -> SourceAdapter:
        """
        Create an adapter instance by name.

        Raises:
            ConfigurationError: If no adapter has that name
        """
        if name not in self._adapters:
            raise ConfigurationError(
                f"Unknown adapter: {name}. Available: {self.list_adapters()}"
            )
        return self._adapters[name](fs)

    def list_adapters(self) -> List[str]:
        return sorted(self._adapters)


def create_registry() -> AdapterRegistry:
    """Create the registry with all file adapters registered."""
    from vitacep.ingest.exercise import ExerciseCsvAdapter
    from vitacep.ingest.health import HealthCsvAdapter
    from vitacep.ingest.location import LocationCsvAdapter

    registry = AdapterRegistry()
    for adapter in (ExerciseCsvAdapter, HealthCsvAdapter, LocationCsvAdapter):
        registry.register(adapter.name, adapter)
    return registry


def run_adapter(spec: AdapterSpec, store, fs: Optional[FileSystemAdapter] = None) -> IngestResult:
    """Run the adapter named by an AdapterSpec against a store."""
    adapter = create_registry().create(spec.adapter, fs)
    return adapter.ingest(spec.path, store, dict(spec.mappings))


__all__ = ["AdapterRegistry", "AdapterSpec", "IngestResult", "create_registry", "run_adapter"]
