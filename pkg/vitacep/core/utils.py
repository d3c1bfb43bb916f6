"""
VITACEP - Utility Functions

Timestamp conversion and small numeric helpers used across the application.
"""

import math
from datetime import datetime, timezone
from typing import Sequence, Tuple, Union

import numpy as np

SECONDS_PER_HOUR = 3600
SECONDS_PER_DAY = 86400

DURATION_UNITS = {"s": 1, "m": 60, "h": SECONDS_PER_HOUR, "d": SECONDS_PER_DAY}


def parse_timestamp(text: str) -> int:
    """
    Parse an ISO-8601 timestamp into UTC epoch seconds.

    Args:
        text: Timestamp such as "2019-06-01T14:03:00Z"; naive values are UTC

    Returns:
        Epoch seconds, sub-second parts truncated toward the past

    Raises:
        ValueError: If the text is not ISO-8601
    """
    text = text.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return math.floor(dt.timestamp())


def format_timestamp(ts: int) -> str:
    """Format epoch seconds as ISO-8601 UTC ("2019-06-01T14:03:00Z")."""
    return datetime.fromtimestamp(ts, tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def to_datetime(ts: int) -> datetime:
    """Convert epoch seconds to an aware UTC datetime."""
    return datetime.fromtimestamp(ts, tz=timezone.utc)


def floor_hour(ts: int) -> int:
    """Floor epoch seconds to the start of the hour."""
    return ts - (ts % SECONDS_PER_HOUR)


def format_duration(seconds: int) -> str:
    """
    Format a duration using the largest unit that divides it exactly.

    Args:
        seconds: Duration in seconds (> 0)

    Returns:
        Text such as "1h", "90s", "2d"
    """
    for unit in ("d", "h", "m"):
        size = DURATION_UNITS[unit]
        if seconds % size == 0:
            return f"{seconds // size}{unit}"
    return f"{seconds}s"


def format_number(value: float) -> str:
    """Format a threshold so that parsing the text yields the same float."""
    if float(value).is_integer():
        return str(int(value))
    return repr(float(value))


def piecewise_linear(
    x: Union[Sequence[float], np.ndarray], anchors: Sequence[Tuple[float, float]]
) -> np.ndarray:
    """
    Evaluate a piecewise-linear curve through anchor points, clamped at both ends.

    Args:
        x: Input values
        anchors: (x, y) pairs with strictly increasing x

    Returns:
        Array of interpolated values
    """
    xp = np.array([a[0] for a in anchors], dtype=float)
    fp = np.array([a[1] for a in anchors], dtype=float)
    return np.interp(np.asarray(x, dtype=float), xp, fp)


def is_strictly_increasing(values: Sequence[float]) -> bool:
    """Check that a sequence is strictly increasing."""
    return all(a < b for a, b in zip(values, values[1:]))
