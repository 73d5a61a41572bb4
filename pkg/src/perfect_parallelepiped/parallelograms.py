"""Perfect parallelograms: enumeration and the pair index used for assembly."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterator, TextIO

import numpy as np

from . import _kernels
from .exact import check_edge_budget, is_perfect_square, isqrt


@dataclass(frozen=True, order=True)
class PerfectParallelogram:
    """Integer edges ``x1 >= x2`` with integer minor and major diagonals."""

    x1: int
    x2: int
    d_minor: int
    d_major: int

    def __post_init__(self):
        x1, x2, d, big = self.x1, self.x2, self.d_minor, self.d_major
        if not 1 <= x2 <= x1:
            raise ValueError(f"edges must satisfy 1 <= x2 <= x1, got ({x1}, {x2})")
        if not (x1 - x2 < d and d * d <= x1 * x1 + x2 * x2):
            raise ValueError(f"minor diagonal {d} out of range for edges ({x1}, {x2})")
        if big * big != 2 * x1 * x1 + 2 * x2 * x2 - d * d:
            raise ValueError(f"major diagonal {big} inconsistent with ({x1}, {x2}, {d})")
        if not d <= big < x1 + x2:
            raise ValueError(f"major diagonal {big} out of range")


def _check_edges(x1: int, x2: int) -> None:
    if not 1 <= x2 <= x1:
        raise ValueError(f"edges must satisfy 1 <= x2 <= x1, got ({x1}, {x2})")


def enumerate_pair(x1: int, x2: int) -> list[PerfectParallelogram]:
    """Every perfect parallelogram on edges ``x1 >= x2``, ascending by minor diagonal.

    A rectangle contributes one entry with equal diagonals.
    """
    _check_edges(x1, x2)
    s = x1 * x1 + x2 * x2
    found = []
    for d in range(x1 - x2 + 1, isqrt(s) + 1):
        big = is_perfect_square(2 * s - d * d)
        if big is not None:
            found.append(PerfectParallelogram(x1, x2, d, big))
    return found


class ParallelogramIndex:
    """Minor diagonals of perfect parallelograms, keyed by edge pair.

    Storage is CSR-like: ``offsets`` has one slot per ordered key
    ``a * (max_edge + 1) + b`` (``a >= b``) and ``rows`` holds the
    ``(x1, x2, d_minor, d_major)`` records contiguously in ascending order.
    """

    def __init__(self, rows: np.ndarray, max_edge: int, min_edge: int = 1):
        rows = np.ascontiguousarray(rows, dtype=np.int64).reshape(-1, 4)
        self.max_edge = max_edge
        self.min_edge = min_edge
        self.stride = max_edge + 1
        self.rows = rows
        keys = rows[:, 0] * self.stride + rows[:, 1]
        if len(keys) and np.any(np.diff(keys) < 0):
            raise ValueError("parallelogram rows must be sorted by (x1, x2, d)")
        counts = np.bincount(keys, minlength=self.stride * self.stride)
        self.offsets = np.zeros(self.stride * self.stride + 1, dtype=np.int64)
        np.cumsum(counts, out=self.offsets[1:])
        self.diagonals = np.ascontiguousarray(rows[:, 2])

    def _span(self, a: int, b: int) -> tuple[int, int]:
        if a < b:
            a, b = b, a
        if b < 1 or a > self.max_edge:
            return 0, 0
        key = a * self.stride + b
        return int(self.offsets[key]), int(self.offsets[key + 1])

    def __getitem__(self, pair: tuple[int, int]) -> list[int]:
        lo, hi = self._span(*pair)
        return self.diagonals[lo:hi].tolist()

    def get(self, a: int, b: int) -> list[int]:
        return self[a, b]

    def __contains__(self, pair) -> bool:
        lo, hi = self._span(*pair)
        return hi > lo

    def __len__(self) -> int:
        return int(np.count_nonzero(np.diff(self.offsets)))

    @property
    def n_parallelograms(self) -> int:
        return len(self.rows)

    @property
    def nbytes(self) -> int:
        return self.rows.nbytes + self.offsets.nbytes + self.diagonals.nbytes

    def pairs(self) -> Iterator[tuple[int, int]]:
        """Nonempty edge pairs ``(a, b)``, ``a >= b``, in ascending order."""
        nonempty = np.flatnonzero(np.diff(self.offsets))
        for key in nonempty.tolist():
            yield divmod(key, self.stride)

    def items(self) -> Iterator[tuple[tuple[int, int], list[int]]]:
        for pair in self.pairs():
            yield pair, self[pair]

    def parallelograms(self) -> Iterator[PerfectParallelogram]:
        for x1, x2, d, big in self.rows.tolist():
            yield PerfectParallelogram(x1, x2, d, big)

    def without_rectangles(self) -> "ParallelogramIndex":
        """Copy of the index with every rectangle (minor == major) dropped."""
        keep = self.rows[:, 2] != self.rows[:, 3]
        return ParallelogramIndex(self.rows[keep], self.max_edge, self.min_edge)

    def write(self, fh: TextIO) -> None:
        """Dump one ``x1 x2 d_minor d_major`` line per parallelogram."""
        for x1, x2, d, big in self.rows.tolist():
            fh.write(f"{x1} {x2} {d} {big}\n")


def _chunks(lo: int, hi: int, parts: int) -> list[tuple[int, int]]:
    # Work grows roughly with x1^2, so split on equal cumulative x1^3.
    if parts <= 1 or hi - lo < parts:
        return [(lo, hi)]
    cuts = [lo]
    for i in range(1, parts):
        edge = int(round(((lo**3) + (hi**3 - lo**3) * i / parts) ** (1 / 3)))
        if cuts[-1] < edge <= hi:
            cuts.append(edge)
    cuts.append(hi + 1)
    return [(a, b - 1) for a, b in zip(cuts, cuts[1:]) if b > a]


def _enumerate_chunk(args: tuple[int, int, int]) -> np.ndarray:
    return _kernels.enumerate_parallelograms(*args)


def enumerate_range(max_edge: int, min_edge: int = 1, workers: int = 1) -> ParallelogramIndex:
    """Index every perfect parallelogram with ``min_edge <= x2 <= x1 <= max_edge``.

    The result does not depend on ``workers``; chunks of x1 are concatenated
    in order.
    """
    if not 1 <= min_edge <= max_edge:
        raise ValueError(
            f"need 1 <= min_edge <= max_edge, got min_edge={min_edge}, max_edge={max_edge}"
        )
    check_edge_budget(max_edge)
    tasks = [(lo, hi, min_edge) for lo, hi in _chunks(min_edge, max_edge, workers)]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_enumerate_chunk, tasks))
    else:
        parts = [_enumerate_chunk(t) for t in tasks]
    rows = np.concatenate(parts) if parts else np.empty((0, 4), dtype=np.int64)
    return ParallelogramIndex(rows, max_edge=max_edge, min_edge=min_edge)
