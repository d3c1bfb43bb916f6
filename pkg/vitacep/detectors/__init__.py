"""
VITACEP - Detectors Module

Central registry for the user-defined event detection operators that
the event-pattern language can call by name.
"""

from typing import Any, Dict, Mapping, Type

from vitacep.core.errors import PatternError, UnknownDetectorError
from vitacep.detectors.base import Detector


class DetectorRegistry:
    """
    Registry for all available detectors.

    Manages detector registration and creation.
    """

    def __init__(self):
        self._detectors: Dict[str, Type[Detector]] = {}

    def register(self, name: str, detector_class: Type[Detector]) -> None:
        """
        Register a detector class.

        Args:
            name: Detector name as written in definitions (e.g. "detect-climb")
            detector_class: Detector class to register
        """
        self._detectors[name] = detector_class

    def __contains__(self, name: str) -> bool:
        return name in self._detectors

    def create(self, name: str, defaults: Any, kwargs: Mapping[str, float]) -> Detector:
        """
        Create a detector instance by name.

        Args:
            name: Detector name
            defaults: AppConfig with default parameters
            kwargs: Keyword arguments from the detector call

        Returns:
            Detector instance

        Raises:
            UnknownDetectorError: If detector name is unknown
            PatternError: If a keyword argument is not a detector parameter
        """
        if name not in self._detectors:
            raise UnknownDetectorError(name, self._detectors.keys())

        detector_class = self._detectors[name]
        allowed = set(getattr(detector_class, "parameters", ()))
        unknown = sorted(set(kwargs) - allowed)
        if unknown:
            raise PatternError(
                f"Unknown argument(s) {unknown} for {name}. Allowed: {sorted(allowed)}"
            )
        return detector_class.from_kwargs(defaults, kwargs)

    def list_detectors(self) -> list[str]:
        """Get list of all registered detector names."""
        return list(self._detectors.keys())


def create_registry() -> DetectorRegistry:
    """
    Create and populate the detector registry with all available detectors.

    Returns:
        DetectorRegistry with all detectors registered
    """
    from vitacep.detectors.climb import ClimbDetector
    from vitacep.detectors.spike import SpikeDetector

    registry = DetectorRegistry()
    registry.register(SpikeDetector.name, SpikeDetector)
    registry.register(ClimbDetector.name, ClimbDetector)
    return registry
