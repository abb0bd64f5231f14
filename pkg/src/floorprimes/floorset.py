"""The floor function set S(x) = {[x/n] : 1 <= n <= x}.

Every routine here works with the split at ``r = isqrt(x)``:

* the *large* values ``[x/n]`` for ``n <= r`` are pairwise distinct and all
  exceed ``B = [x/(r+1)]``;
* the *small* values are exactly ``1, 2, ..., B``.

So ``S(x)`` is a disjoint union of ``r`` large and ``B`` small members, and a
sweep over ``n <= r`` touches everything in ``O(sqrt(x))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, List

import numpy as np

from .errors import DomainError

CHUNK = 1 << 18


@dataclass(frozen=True, slots=True)
class FloorValueBlock:
    """Maximal run ``n in (n_lo, n_hi]`` on which ``[x/n] == q``."""

    q: int
    n_lo: int
    n_hi: int

    @property
    def length(self) -> int:
        return self.n_hi - self.n_lo


@dataclass(frozen=True)
class FloorSetSummary:
    x: int
    values: List[int]
    cardinality: int


def _check_x(x: int) -> int:
    if int(x) != x or x < 1:
        raise DomainError(f"x must be an integer >= 1, got {x!r}")
    return int(x)


def split_point(x: int) -> tuple[int, int]:
    """Return ``(r, B)`` with ``r = isqrt(x)`` and ``B = x // (r + 1)``."""
    r = math.isqrt(x)
    return r, x // (r + 1)


def blocks(x: int) -> Iterator[FloorValueBlock]:
    """Yield every maximal constant block of ``n -> [x/n]`` in increasing ``q``."""
    x = _check_x(x)
    r, small = split_point(x)
    for q in range(1, small + 1):
        yield FloorValueBlock(q, x // (q + 1), x // q)
    last = small
    for n in range(r, 0, -1):
        q = x // n
        if q != last:
            yield FloorValueBlock(q, x // (q + 1), x // q)
            last = q


def large_values(x: int, chunk: int = CHUNK) -> Iterator[np.ndarray]:
    """Distinct values ``[x/n]`` for ``n <= isqrt(x)`` in chunks, descending.

    Consecutive duplicates are dropped (the sequence is non-increasing in n),
    also across chunk boundaries.
    """
    x = _check_x(x)
    r, small = split_point(x)
    prev = None
    for lo in range(1, r + 1, chunk):
        n = np.arange(lo, min(lo + chunk, r + 1), dtype=np.int64)
        q = x // n
        keep = np.ones(q.shape, dtype=bool)
        keep[1:] = q[1:] != q[:-1]
        if prev is not None:
            keep[0] = q[0] != prev
        prev = int(q[-1])
        q = q[keep & (q > small)]
        if q.size:
            yield q


def contains(x: int, m: int) -> bool:
    """``m in S(x)``, decided in O(1) by ``[x/m] - [x/(m+1)] > 0``."""
    x = _check_x(x)
    if m < 1:
        raise DomainError("m must be >= 1")
    if m > x:
        return False
    return x // m - x // (m + 1) > 0


def cardinality(x: int) -> int:
    """``|S(x)|`` without materializing the set."""
    x = _check_x(x)
    _, small = split_point(x)
    return small + sum(int(q.size) for q in large_values(x))


def count_in_progression(x: int, q: int, a: int) -> int:
    """Members ``m`` of ``S(x)`` with ``m = a (mod q)``; ``a == q`` stands for residue 0."""
    x = _check_x(x)
    if q < 1 or not 1 <= a <= q:
        raise DomainError(f"need q >= 1 and 1 <= a <= q, got q={q}, a={a}")
    _, small = split_point(x)
    count = (small - a) // q + 1 if small >= a else 0
    target = a % q
    for vals in large_values(x):
        count += int(np.count_nonzero(vals % q == target))
    return count


def summary(x: int) -> FloorSetSummary:
    """Materialize ``S(x)``; memory is ``O(sqrt(x))``."""
    x = _check_x(x)
    _, small = split_point(x)
    large = [v for chunk in large_values(x) for v in chunk.tolist()]
    values = list(range(1, small + 1)) + large[::-1]
    return FloorSetSummary(x=x, values=values, cardinality=len(values))
