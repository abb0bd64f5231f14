"""Sawtooth sums over primes and prime powers.

``psi(t) = t - [t] - 1/2``.  At the arguments used here, ``t = x/m`` with
integers ``x, m``, ``psi`` is the exact rational ``(2 (x mod m) - m) / (2m)``,
so each term is correctly rounded and the sums are accumulated with
``math.fsum`` in a fixed chunk order.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .errors import DomainError
from .primes import PrimeTable, is_prime_many, prime_power_base_many, prime_table

MAX_D = 10**9
CHUNK = 1 << 18
_BELOW_HALF = math.nextafter(0.5, 0.0)


class PsiWeight(str, enum.Enum):
    LAMBDA = "lambda"
    LOG_PRIME = "log_prime"
    PRIME_INDICATOR = "prime_indicator"


class RemainderWeight(str, enum.Enum):
    PRIME = "prime"
    PRIME_POWER = "prime_power"
    LAMBDA = "lambda"
    ONE = "one"


@dataclass(frozen=True)
class PsiSumResult:
    x: int
    D: int
    D_prime: int
    delta: int
    weight: str
    value: float
    term_count: int
    envelope: float
    ratio: float


def psi(t: float) -> float:
    """Sawtooth ``t - [t] - 1/2``; equals -1/2 at integers."""
    # t - [t] rounds up to 1.0 for tiny negative t; keep the result in [-1/2, 1/2)
    return min(t - math.floor(t) - 0.5, _BELOW_HALF)


def psi_ratio(x: int, m):
    """``psi(x/m)`` as ``(2 (x mod m) - m) / (2m)``: exact integers, one rounding.

    ``m`` may be an int or an ``int64`` array (``m < 2**62``).
    """
    if isinstance(m, np.ndarray):
        return (2 * (np.int64(x) % m) - m) / (2 * m)
    return (2 * (x % m) - m) / (2 * m)


def envelope(x: int, D: int) -> float:
    """``(x^2 D^7)^(1/12)`` evaluated in logs (the ``x^eps`` factor is dropped)."""
    return math.exp((2.0 * math.log(x) + 7.0 * math.log(D)) / 12.0)


WeightFn = Callable[[np.ndarray], np.ndarray]


def _weight_fn(weight: str, table: PrimeTable) -> WeightFn:
    if weight == "lambda":
        def fn(d):
            base = prime_power_base_many(d, table)
            out = np.zeros(d.shape)
            nz = base > 0
            out[nz] = np.log(base[nz].astype(np.float64))
            return out
    elif weight == "log_prime":
        def fn(d):
            return np.where(is_prime_many(d, table), np.log(d.astype(np.float64)), 0.0)
    elif weight in ("prime_indicator", "prime"):
        def fn(d):
            return is_prime_many(d, table).astype(np.float64)
    elif weight == "prime_power":
        def fn(d):
            return (prime_power_base_many(d, table) > 0).astype(np.float64)
    elif weight == "one":
        def fn(d):
            return np.ones(d.shape)
    else:
        raise DomainError(f"unknown weight {weight!r}")
    return fn


def _weighted_psi_sum(x: int, lo: int, hi: int, delta: int, fn: WeightFn):
    """``sum_{lo < d <= hi} fn(d) psi(x/(d+delta))`` and the number of nonzero-weight terms."""
    partials, count = [], 0
    for start in range(lo + 1, hi + 1, CHUNK):
        d = np.arange(start, min(start + CHUNK, hi + 1), dtype=np.int64)
        w = np.asarray(fn(d), dtype=np.float64)
        nz = w != 0
        if not nz.any():
            continue
        w, dd = w[nz], d[nz]
        terms = w * psi_ratio(x, dd + delta)
        partials.append(math.fsum(terms.tolist()))
        count += int(dd.size)
    return math.fsum(partials), count


def _check_delta(delta: int) -> int:
    if delta not in (0, 1):
        raise DomainError(f"delta must be 0 or 1, got {delta}")
    return int(delta)


def frak_S(
    x: int,
    D: int,
    D_prime: int,
    delta: int = 0,
    weight: Union[PsiWeight, str] = PsiWeight.LAMBDA,
    table: Optional[PrimeTable] = None,
) -> PsiSumResult:
    """``sum_{D < d <= D'} w(d) psi(x/(d+delta))`` for ``w`` in {Lambda, log p on primes, 1 on primes}."""
    weight = PsiWeight(weight)
    delta = _check_delta(delta)
    if not (int(x) == x and int(D) == D and int(D_prime) == D_prime):
        raise DomainError("x, D, D' must be integers")
    if not 1 <= D < D_prime <= x:
        raise DomainError(f"need 1 <= D < D' <= x, got D={D}, D'={D_prime}, x={x}")
    if D_prime > MAX_D:
        raise DomainError(f"D' = {D_prime} exceeds the direct summation budget {MAX_D}")
    table = table if table is not None and table.limit >= D_prime else prime_table(D_prime)
    value, count = _weighted_psi_sum(int(x), int(D), int(D_prime), delta, _weight_fn(weight.value, table))
    env = envelope(x, D)
    return PsiSumResult(int(x), int(D), int(D_prime), delta, weight.value, value, count, env, abs(value) / env)


def remainder_R(
    x: int,
    N: int,
    delta: int = 0,
    f: Union[RemainderWeight, str, WeightFn] = RemainderWeight.PRIME,
    table: Optional[PrimeTable] = None,
) -> PsiSumResult:
    """``sum_{N < d <= x/N} f(d) psi(x/(d+delta))`` for ``x^(1/3) <= N <= sqrt(x)``.

    ``f`` is a weight name or any vectorized callable on ``int64`` arrays.  The
    attached envelope is ``N`` itself, the size the remainder is compared with.
    """
    delta = _check_delta(delta)
    x, N = int(x), int(N)
    if N < 1 or N**3 < x or N * N > x:
        raise DomainError(f"N = {N} outside [x^(1/3), x^(1/2)] for x = {x}")
    hi = x // N
    if callable(f):
        fn, name = f, getattr(f, "__name__", "custom")
    else:
        name = RemainderWeight(f).value
        table = table if table is not None and table.limit >= hi else prime_table(hi)
        fn = _weight_fn(name, table)
    value, count = _weighted_psi_sum(x, N, hi, delta, fn) if hi > N else (0.0, 0)
    return PsiSumResult(x, N, hi, delta, name, value, count, float(N), abs(value) / N)
