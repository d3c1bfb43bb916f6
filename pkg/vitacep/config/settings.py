"""
VITACEP - Configuration Management

Handles application configuration from environment variables and files:
physiological anchor tables, detector defaults, the sample-and-hold gap
cap and the station distance cutoff.
"""

import json
import os
from dataclasses import dataclass, field, fields
from typing import Any, Dict, List, Optional, Tuple

import yaml

from vitacep.core.errors import ConfigurationError
from vitacep.core.utils import is_strictly_increasing

DEFAULT_RR_ANCHORS: List[Tuple[float, float]] = [(60, 12), (120, 20), (150, 30), (190, 40)]
DEFAULT_SPO2_ANCHORS: List[Tuple[float, float]] = [
    (0, 98),
    (1500, 97),
    (2500, 95),
    (3500, 93),
    (4500, 88),
    (5500, 84),
]


@dataclass
class AppConfig:
    """Main application configuration."""

    # Sample-and-hold and exposome join
    max_gap: int = 60  # seconds a sample's value holds at most
    station_max_km: float = 50.0

    # Subject profile
    body_mass: float = 70.0  # kg
    vt_rest_per_kg: float = 0.007  # L/kg
    vt_max_per_kg: float = 0.030  # L/kg
    rr_anchors: List[Tuple[float, float]] = field(
        default_factory=lambda: list(DEFAULT_RR_ANCHORS)
    )  # HR bpm -> breaths/min
    spo2_anchors: List[Tuple[float, float]] = field(
        default_factory=lambda: list(DEFAULT_SPO2_ANCHORS)
    )  # altitude m -> SpO2 %

    # Detector defaults
    threshold_min_duration: int = 0
    spike_baseline_window: int = 120
    spike_delta: float = 25.0
    spike_max_duration: int = 60
    climb_smoothing_window: int = 30
    climb_min_ascent_rate: float = 0.2
    climb_min_total_gain: float = 10.0
    climb_max_gap: int = 30

    # Event-pattern language
    stream_aliases: Dict[str, str] = field(default_factory=lambda: {"HR": "Heartrate"})

    # Continuous mode
    watch_batch_seconds: int = 3600

    log_level: str = "INFO"

    def __post_init__(self):
        for f in fields(self):
            if f.type in (int, float):
                setattr(self, f.name, _number(f.name, getattr(self, f.name), f.type))
        # YAML/JSON deliver anchors as lists of lists
        self.rr_anchors = _anchors("rr_anchors", self.rr_anchors)
        self.spo2_anchors = _anchors("spo2_anchors", self.spo2_anchors)
        if not isinstance(self.stream_aliases, dict) or not all(
            isinstance(k, str) and isinstance(v, str) for k, v in self.stream_aliases.items()
        ):
            raise ConfigurationError("stream_aliases must map names to stream ids")
        if not isinstance(self.log_level, str):
            raise ConfigurationError(f"log_level must be a level name, got {self.log_level!r}")

    @classmethod
    def from_env(cls) -> "AppConfig":
        """
        Load configuration from environment variables.

        Environment variables:
        - VITACEP_MAX_GAP: Sample-and-hold cap (seconds)
        - VITACEP_BODY_MASS: Subject body mass (kg)
        - VITACEP_STATION_MAX_KM: Nearest-station cutoff (km)
        - VITACEP_LOG_LEVEL: Logging level name
        """
        return cls(
            max_gap=_env("VITACEP_MAX_GAP", cls.max_gap),
            body_mass=_env("VITACEP_BODY_MASS", cls.body_mass),
            station_max_km=_env("VITACEP_STATION_MAX_KM", cls.station_max_km),
            log_level=_env("VITACEP_LOG_LEVEL", cls.log_level),
        )

    @classmethod
    def from_file(cls, path: str) -> "AppConfig":
        """
        Load configuration from YAML or JSON file.

        Args:
            path: Path to configuration file (.yaml, .yml, or .json)

        Returns:
            AppConfig instance

        Raises:
            FileNotFoundError: If config file doesn't exist
            ConfigurationError: If config file format or keys are invalid
        """
        return cls(**cls._read_file(path))

    @staticmethod
    def _read_file(path: str) -> Dict[str, Any]:
        if not os.path.exists(path):
            raise FileNotFoundError(f"Configuration file not found: {path}")

        with open(path, "r") as f:
            try:
                if path.endswith((".yaml", ".yml")):
                    data = yaml.safe_load(f)
                elif path.endswith(".json"):
                    data = json.load(f)
                else:
                    raise ConfigurationError(f"Unsupported config file format: {path}")
            except (yaml.YAMLError, json.JSONDecodeError) as e:
                raise ConfigurationError(f"Cannot parse {path}: {e}") from e

        data = data or {}
        if not isinstance(data, dict):
            raise ConfigurationError(f"Configuration file must contain a mapping: {path}")
        known = {f.name for f in fields(AppConfig)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigurationError(f"Unknown configuration keys in {path}: {unknown}")
        return data

    @classmethod
    def load(cls, config_file: Optional[str] = None) -> "AppConfig":
        """
        Load configuration with priority: file > env > defaults.

        Args:
            config_file: Optional path to configuration file

        Returns:
            Validated AppConfig instance
        """
        config = cls.from_env()

        if config_file:
            # Merge: only keys present in the file override
            for key, value in cls._read_file(config_file).items():
                setattr(config, key, value)
            config.__post_init__()

        config.validate()
        return config

    def validate(self) -> None:
        """
        Validate configuration values.

        Raises:
            ConfigurationError: If configuration is invalid
        """
        if self.max_gap < 0:
            raise ConfigurationError("max_gap must be non-negative")

        if self.station_max_km <= 0:
            raise ConfigurationError("station_max_km must be positive")

        if self.body_mass <= 0:
            raise ConfigurationError("body_mass must be positive")

        if not (0 < self.vt_rest_per_kg <= self.vt_max_per_kg):
            raise ConfigurationError("vt_rest_per_kg must be positive and <= vt_max_per_kg")

        for name in ("rr_anchors", "spo2_anchors"):
            anchors = getattr(self, name)
            if len(anchors) < 2:
                raise ConfigurationError(f"{name} needs at least two anchors")
            if not is_strictly_increasing([a[0] for a in anchors]):
                raise ConfigurationError(f"{name} must be strictly increasing in x")

        if not is_strictly_increasing([a[1] for a in self.rr_anchors]):
            raise ConfigurationError("rr_anchors must be strictly increasing in breaths/min")

        for name in (
            "spike_baseline_window",
            "spike_delta",
            "spike_max_duration",
            "climb_smoothing_window",
            "climb_min_ascent_rate",
            "climb_min_total_gain",
            "climb_max_gap",
            "watch_batch_seconds",
        ):
            if getattr(self, name) <= 0:
                raise ConfigurationError(f"{name} must be positive")

        if self.threshold_min_duration < 0:
            raise ConfigurationError("threshold_min_duration must be non-negative")

    def subject_profile(self):
        """Build the SubjectProfile used by the physiological derivations."""
        from vitacep.physio.derive import SubjectProfile

        return SubjectProfile(
            body_mass=self.body_mass,
            vt_rest_per_kg=self.vt_rest_per_kg,
            vt_max_per_kg=self.vt_max_per_kg,
            rr_anchors=tuple(self.rr_anchors),
        )

    def spike_spec(self):
        """Build the default SpikeSpec."""
        from vitacep.detectors.spike import SpikeSpec

        return SpikeSpec(
            baseline_window=self.spike_baseline_window,
            delta=self.spike_delta,
            max_spike_duration=self.spike_max_duration,
        )

    def climb_spec(self):
        """Build the default ClimbSpec."""
        from vitacep.detectors.climb import ClimbSpec

        return ClimbSpec(
            smoothing_window=self.climb_smoothing_window,
            min_ascent_rate=self.climb_min_ascent_rate,
            min_total_gain=self.climb_min_total_gain,
            max_gap=self.climb_max_gap,
        )


def _number(name: str, value: Any, kind: type) -> Any:
    """Coerce an env string or file value to the field's numeric type."""
    if isinstance(value, bool):
        raise ConfigurationError(f"{name} must be a number, got {value!r}")
    try:
        number = float(value)
    except (TypeError, ValueError):
        raise ConfigurationError(f"{name} must be a number, got {value!r}") from None
    if kind is int:
        if not number.is_integer():
            raise ConfigurationError(f"{name} must be a whole number, got {value!r}")
        return int(number)
    return number


def _anchors(name: str, value: Any) -> List[Tuple[float, float]]:
    try:
        return [(float(x), float(y)) for x, y in value]
    except (TypeError, ValueError):
        raise ConfigurationError(f"{name} must be a list of [x, y] pairs") from None


def _env(name: str, default: Any) -> Any:
    return os.environ.get(name, default)
