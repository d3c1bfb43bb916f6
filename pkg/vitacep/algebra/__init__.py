"""
VITACEP - Interval Algebra

The event operators NOT, AND, OR and DELAY over canonical interval sets.
"""

from vitacep.algebra.intervals import Window, and_, clip, delay, extend, not_, or_

__all__ = ["Window", "and_", "or_", "not_", "delay", "clip", "extend"]
