"""
VITACEP - Interval Set Operators

Boolean algebra over canonical IntervalSets. Complement is only defined
relative to an evaluation Window. All functions are pure.
"""

from dataclasses import dataclass
from typing import List

from vitacep.core.errors import DataError, InvalidIntervalError
from vitacep.core.types import Interval, IntervalSet, Timestamp, normalize
from vitacep.core.utils import format_timestamp


@dataclass(frozen=True)
class Window:
    """Evaluation window [start, end); every evaluation is relative to one."""

    start: Timestamp
    end: Timestamp

    def __post_init__(self):
        if self.start >= self.end:
            raise InvalidIntervalError(
                f"Window start must precede end: [{self.start}, {self.end})"
            )

    @property
    def interval(self) -> Interval:
        return Interval(self.start, self.end)

    @property
    def duration(self) -> int:
        return self.end - self.start

    def expanded(self, before: int, after: int = 0) -> "Window":
        """Return a window widened by the given number of seconds on each side."""
        return Window(self.start - before, self.end + after)

    def __str__(self) -> str:
        return f"[{format_timestamp(self.start)}, {format_timestamp(self.end)})"


def and_(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    """Intersection: time points in both a and b."""
    result: List[Interval] = []
    i = j = 0
    left, right = a.intervals, b.intervals
    while i < len(left) and j < len(right):
        start = max(left[i].start, right[j].start)
        end = min(left[i].end, right[j].end)
        if start < end:
            result.append(Interval(start, end))
        # advance whichever interval finishes first
        if left[i].end < right[j].end:
            i += 1
        else:
            j += 1
    return normalize(result)


def or_(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    """Union of a and b; touching intervals merge."""
    return normalize(list(a.intervals) + list(b.intervals))


def clip(a: IntervalSet, w: Window) -> IntervalSet:
    """Restrict a set to the window."""
    return and_(a, IntervalSet((w.interval,)))


def not_(a: IntervalSet, w: Window) -> IntervalSet:
    """Complement of a within w; points outside w never appear."""
    result: List[Interval] = []
    cursor = w.start
    for iv in clip(a, w):
        if iv.start > cursor:
            result.append(Interval(cursor, iv.start))
        cursor = iv.end
    if cursor < w.end:
        result.append(Interval(cursor, w.end))
    return IntervalSet(tuple(result))


def delay(a: IntervalSet, d: int, w: Window) -> IntervalSet:
    """
    Shift every interval forward by d seconds, then clip to the window.

    Raises:
        DataError: If d is negative
    """
    if d < 0:
        raise DataError(f"Delay must be non-negative, got {d}")
    shifted = IntervalSet(tuple(Interval(iv.start + d, iv.end + d) for iv in a))
    return clip(shifted, w)


def extend(a: IntervalSet, d: int, w: Window) -> IntervalSet:
    """Stretch every interval's end by d seconds, then clip to the window."""
    if d < 0:
        raise DataError(f"Extension must be non-negative, got {d}")
    stretched = normalize(Interval(iv.start, iv.end + d) for iv in a)
    return clip(stretched, w)
