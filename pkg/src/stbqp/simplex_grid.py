"""Lattice points I(n, d) and the regular simplex grids built from them.

Lattice points are plain tuples of nonnegative ints.  Every enumeration here
runs in reverse-lexicographic order, so ``(d, 0, ..., 0)`` comes first and
``(0, ..., 0, d)`` last.  Scans and argmin tie-breaking depend on this order.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from itertools import islice
from typing import Iterator, Optional

import numpy as np

LatticePoint = tuple[int, ...]

INT64_MAX = 2**63 - 1


def lattice_count(n: int, d: int) -> int:
    """|I(n, d)| = C(n + d - 1, d)."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if d < 0:
        raise ValueError(f"d must be nonnegative, got {d}")
    return math.comb(n + d - 1, d)


def grid_cardinality(n: int, s: int) -> int:
    """Number of points of the grid with denominator s + 2, i.e. C(n+s+1, s+2)."""
    if s < 0:
        raise ValueError(f"s must be nonnegative, got {s}")
    count = lattice_count(n, s + 2)
    if count > INT64_MAX:
        raise OverflowError(f"grid of dimension {n} at s={s} has {count} points, beyond int64")
    return count


def _compositions(n: int, d: int) -> Iterator[LatticePoint]:
    if n == 1:
        yield (d,)
        return
    for first in range(d, -1, -1):
        for rest in _compositions(n - 1, d - first):
            yield (first,) + rest


def unrank(n: int, d: int, rank: int) -> LatticePoint:
    """The lattice point at position ``rank`` of the reverse-lex stream."""
    total = lattice_count(n, d)
    if not 0 <= rank < total:
        raise IndexError(f"rank {rank} out of range for I({n}, {d}) of size {total}")
    coords = []
    remaining = d
    for k in range(n - 1, 0, -1):
        # k coordinates remain after this one
        c = remaining
        while True:
            block = math.comb(remaining - c + k - 1, k - 1)
            if rank < block:
                break
            rank -= block
            c -= 1
        coords.append(c)
        remaining -= c
    coords.append(remaining)
    return tuple(coords)


def enumerate_lattice(n: int, d: int, start: int = 0, stop: Optional[int] = None) -> Iterator[LatticePoint]:
    """Yield I(n, d) in reverse-lex order, optionally only positions [start, stop)."""
    total = lattice_count(n, d)
    stop = total if stop is None else min(stop, total)
    if start >= stop:
        return
    if start == 0:
        yield from islice(_compositions(n, d), stop)
        return
    point = list(unrank(n, d, start))
    yield tuple(point)
    for _ in range(stop - start - 1):
        _advance(point)
        yield tuple(point)


def _advance(z: list[int]) -> None:
    # successor in reverse-lex order: move one unit from the last nonzero
    # coordinate before the tail into the next slot, collapsing the tail
    n = len(z)
    t = n - 2
    while z[t] == 0:
        t -= 1
    tail = z[n - 1]
    z[n - 1] = 0
    z[t] -= 1
    z[t + 1] = tail + 1


def chunk_bounds(total: int, workers: int) -> list[tuple[int, int]]:
    """Split ``range(total)`` into ``workers`` contiguous, nearly equal pieces."""
    if workers < 1:
        raise ValueError(f"workers must be positive, got {workers}")
    workers = min(workers, max(total, 1))
    base, extra = divmod(total, workers)
    bounds = []
    lo = 0
    for w in range(workers):
        hi = lo + base + (1 if w < extra else 0)
        bounds.append((lo, hi))
        lo = hi
    return bounds


def lattice_chunks(n: int, d: int, workers: int) -> list[Iterator[LatticePoint]]:
    """Independent contiguous sub-streams whose concatenation is the full stream."""
    return [enumerate_lattice(n, d, lo, hi) for lo, hi in chunk_bounds(lattice_count(n, d), workers)]


@lru_cache(maxsize=64)
def _lattice_array_cached(n: int, d: int) -> np.ndarray:
    if n == 1:
        out = np.array([[d]], dtype=np.int64)
    else:
        blocks = []
        for first in range(d, -1, -1):
            rest = _lattice_array_cached(n - 1, d - first)
            block = np.empty((rest.shape[0], n), dtype=np.int64)
            block[:, 0] = first
            block[:, 1:] = rest
            blocks.append(block)
        out = np.concatenate(blocks)
    out.setflags(write=False)
    return out


def lattice_array(n: int, d: int) -> np.ndarray:
    """All of I(n, d) as a read-only ``(count, n)`` int64 array, reverse-lex rows."""
    lattice_count(n, d)
    return _lattice_array_cached(n, d)


@lru_cache(maxsize=None)
def _factorial(k: int) -> int:
    return math.factorial(k)


def multinomial(alpha: LatticePoint) -> int:
    """|alpha|! / (alpha_1! ... alpha_n!), exact."""
    if any(a < 0 for a in alpha):
        raise ValueError(f"multinomial needs nonnegative coordinates, got {alpha}")
    out = _factorial(sum(alpha))
    for a in alpha:
        out //= _factorial(a)
    return out


def shift_down(xi: LatticePoint, i: int, j: int) -> Optional[LatticePoint]:
    """``xi - e_i - e_j``, or ``None`` when a coordinate would go negative."""
    n = len(xi)
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"indices ({i}, {j}) out of range for dimension {n}")
    out = list(xi)
    out[i] -= 1
    out[j] -= 1
    if out[i] < 0 or out[j] < 0:
        return None
    return tuple(out)


def grid_point(xi: LatticePoint) -> tuple[Fraction, ...]:
    """The exact simplex point ``xi / |xi|``."""
    d = sum(xi)
    if d <= 0:
        raise ValueError("grid point needs a positive degree")
    return tuple(Fraction(c, d) for c in xi)
