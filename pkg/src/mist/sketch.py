"""Bounded-memory KLL quantile sketch.

Levels hold sorted buffers; an item at level ``L`` represents ``2**L``
original items.  Level capacities follow the usual geometric schedule
(capacity ``k`` at the newest level, shrinking by 2/3 per level below,
floored at 2), so the total budget is ``k / (1 - 2/3) = 3k`` items.
Compaction is lazy: once the budget is exceeded, the lowest level at or
over its capacity is compacted by promoting alternating elements (fair
coin picks the parity) to the next level and discarding the rest.
Queries resolve to retained items only (nearest-rank lookup, no
interpolation).
"""

from __future__ import annotations

import math
from bisect import insort

import numpy as np

from .errors import EmptySketchError, InvalidInputError

_BUDGET_FACTOR = 3  # retained items never exceed _BUDGET_FACTOR * capacity


class QuantileSketch:
    """Streaming quantile summary with rank error targeted at ``1/capacity``."""

    __slots__ = ("capacity", "levels", "total_count", "_rng",
                 "_items", "_cumw", "_dirty")

    def __init__(self, capacity: int = 64, seed: int | None = None):
        if capacity < 2:
            raise InvalidInputError(f"capacity must be >= 2, got {capacity}")
        self.capacity = int(capacity)
        self.levels: list[list[float]] = [[]]
        self.total_count = 0
        self._rng = np.random.default_rng(seed)
        self._items: np.ndarray | None = None
        self._cumw: np.ndarray | None = None
        self._dirty = True

    # ------------------------------------------------------------------ update

    def update(self, value: float) -> None:
        """Insert one value; compacts lazily once the item budget is exceeded."""
        v = float(value)
        if not math.isfinite(v):
            raise InvalidInputError(f"sketch values must be finite, got {value!r}")
        insort(self.levels[0], v)
        self.total_count += 1
        self._dirty = True
        budget = _BUDGET_FACTOR * self.capacity
        while self.retained() > budget:
            self._compact_once()

    def _level_capacity(self, lvl: int) -> int:
        depth = len(self.levels) - 1 - lvl
        return max(2, math.ceil(self.capacity * (2.0 / 3.0) ** depth))

    def _compact_once(self) -> None:
        lvl = None
        for i, buf in enumerate(self.levels):
            if len(buf) >= max(2, self._level_capacity(i)):
                lvl = i
                break
        if lvl is None:
            lvl = max(range(len(self.levels)), key=lambda i: len(self.levels[i]))
        buf = self.levels[lvl]
        if len(buf) < 2:  # nothing pairable; cannot happen while over budget
            return
        work = buf
        leftover: list[float] = []
        if len(work) % 2 == 1:
            leftover = [work[-1]]
            work = work[:-1]
        offset = int(self._rng.integers(0, 2))
        promoted = work[offset::2]
        self.levels[lvl] = leftover
        if lvl + 1 == len(self.levels):
            self.levels.append([])
        merged = self.levels[lvl + 1] + promoted
        merged.sort()
        self.levels[lvl + 1] = merged

    # ----------------------------------------------------------------- queries

    def retained(self) -> int:
        """Number of items currently stored across all levels."""
        return sum(len(buf) for buf in self.levels)

    def is_empty(self) -> bool:
        return self.total_count == 0

    def _snapshot(self) -> tuple[np.ndarray, np.ndarray]:
        """Sorted retained items with cumulative weights, rebuilt lazily."""
        if self._dirty or self._items is None:
            vals: list[float] = []
            wts: list[float] = []
            for lvl, buf in enumerate(self.levels):
                if buf:
                    vals.extend(buf)
                    wts.extend([float(1 << lvl)] * len(buf))
            items = np.asarray(vals, dtype=np.float64)
            weights = np.asarray(wts, dtype=np.float64)
            order = np.argsort(items, kind="stable")
            self._items = items[order]
            self._cumw = np.cumsum(weights[order])
            self._dirty = False
        return self._items, self._cumw

    def rank(self, value: float) -> float:
        """Estimated fraction of inserted items <= value, in [0, 1]."""
        if self.total_count == 0:
            raise EmptySketchError("rank query on empty sketch")
        items, cumw = self._snapshot()
        idx = int(np.searchsorted(items, value, side="right"))
        if idx == 0:
            return 0.0
        return float(cumw[idx - 1]) / self.total_count

    def rank_many(self, values: np.ndarray) -> np.ndarray:
        """Vectorised :meth:`rank` for a sorted-or-not array of query values."""
        if self.total_count == 0:
            raise EmptySketchError("rank query on empty sketch")
        items, cumw = self._snapshot()
        idx = np.searchsorted(items, values, side="right")
        out = np.zeros(len(values), dtype=np.float64)
        nz = idx > 0
        out[nz] = cumw[idx[nz] - 1] / self.total_count
        return out

    def quantile(self, r: float) -> float:
        """Retained item whose estimated rank is nearest ``r`` (ties -> lower)."""
        if self.total_count == 0:
            raise EmptySketchError("quantile query on empty sketch")
        if not 0.0 <= r <= 1.0:
            raise InvalidInputError(f"quantile rank must be in [0, 1], got {r}")
        items, cumw = self._snapshot()
        # Mid-weight rank of each retained item: centre of its weight span.
        mid = (cumw - np.diff(cumw, prepend=0.0) / 2.0) / self.total_count
        diffs = np.abs(mid - r)
        best = diffs.min()
        idx = int(np.argmax(diffs <= best + 1e-12))
        return float(items[idx])

    def distinct_retained(self) -> int:
        """Number of distinct retained values (used for bandwidth fallbacks)."""
        if self.total_count == 0:
            return 0
        items, _ = self._snapshot()
        if len(items) == 1:
            return 1
        return int(1 + np.count_nonzero(np.diff(items)))
