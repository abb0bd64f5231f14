"""Prime tables, deterministic primality, prime powers and the von Mangoldt function.

The sieve stores its flags as a little-endian bitset (``limit // 8 + 1`` bytes)
plus a sorted ``int64`` array of the primes.  Values beyond the sieve are
handled by a deterministic Miller-Rabin test that is exact for every
``n < 2**64``.
"""

from __future__ import annotations

import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Tuple

import numpy as np

from .errors import DomainError, RangeError, ResourceError

DEFAULT_SEGMENT = 1 << 20

# First twelve primes: a deterministic witness set for n < 3.3e24 (Sorenson & Webster).
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_SMALL_PRIMES = (
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71,
    73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151,
    157, 163, 167, 173, 179, 181, 191, 193, 197, 199,
)
_U64 = 1 << 64
_TRIAL_BOUND = 199 * 199


def _gcd_groups(primes, cap=(1 << 63) - 1):
    groups, prod = [], 1
    for p in primes:
        if prod * p > cap:
            groups.append(prod)
            prod = 1
        prod *= p
    groups.append(prod)
    return tuple(groups)


# products of the small primes, each fitting in int64, for vectorized trial division
_GCD_GROUPS = _gcd_groups(_SMALL_PRIMES)
_SMALL_FLAGS = np.zeros(_SMALL_PRIMES[-1] + 1, dtype=bool)
_SMALL_FLAGS[list(_SMALL_PRIMES)] = True


@dataclass(frozen=True, eq=False)
class PrimeTable:
    """Immutable sieve result for ``[0, limit]``.

    Attributes:
        limit: Inclusive upper bound of the table.
        bits: Packed primality flags, bit ``m & 7`` of byte ``m >> 3``.
        primes: Ascending ``int64`` array of all primes ``<= limit``.
    """

    limit: int
    bits: np.ndarray
    primes: np.ndarray
    _powers: dict = field(default_factory=dict, repr=False, compare=False)

    def is_prime(self, m: int) -> bool:
        if m < 0 or m > self.limit:
            raise RangeError(f"{m} outside sieve range [0, {self.limit}]")
        return bool((self.bits[m >> 3] >> (m & 7)) & 1)

    def flags_at(self, values: np.ndarray) -> np.ndarray:
        """Vectorized flag lookup; every value must lie in ``[0, limit]``."""
        v = np.asarray(values, dtype=np.int64)
        return ((self.bits[v >> 3] >> (v & 7).astype(np.uint8)) & 1).astype(bool)

    @cached_property
    def flags(self) -> np.ndarray:
        """Unpacked boolean view of the flags, length ``limit + 1``."""
        return np.unpackbits(self.bits, bitorder="little")[: self.limit + 1].astype(bool)

    def higher_powers(self, bound: int) -> Tuple[np.ndarray, np.ndarray]:
        """Sorted prime powers ``p**k <= bound`` with ``k >= 2``, and their bases.

        Requires ``isqrt(bound) <= limit``.
        """
        if math.isqrt(bound) > self.limit:
            raise RangeError(f"prime powers up to {bound} need a sieve to {math.isqrt(bound)}")
        cached = self._powers.get("bound", -1)
        if cached >= bound:
            powers, bases = self._powers["data"]
            cut = np.searchsorted(powers, bound, side="right")
            return powers[:cut], bases[:cut]
        powers, bases = [], []
        for p in self.primes[: np.searchsorted(self.primes, math.isqrt(bound), side="right")].tolist():
            pk = p * p
            while pk <= bound:
                powers.append(pk)
                bases.append(p)
                pk *= p
        order = np.argsort(np.asarray(powers, dtype=np.int64), kind="stable")
        data = (np.asarray(powers, dtype=np.int64)[order], np.asarray(bases, dtype=np.int64)[order])
        self._powers["bound"] = bound
        self._powers["data"] = data
        return data


def _base_sieve(n: int) -> np.ndarray:
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    for i in range(2, math.isqrt(n) + 1):
        if flags[i]:
            flags[i * i :: i] = False
    return np.flatnonzero(flags).astype(np.int64)


def _sieve_segment(lo: int, hi: int, base: np.ndarray) -> np.ndarray:
    seg = np.ones(hi - lo, dtype=bool)
    for p in base.tolist():
        if p * p >= hi:
            break
        start = max(p * p, -(-lo // p) * p)
        seg[start - lo :: p] = False
    if lo <= 1:
        seg[: 2 - lo] = False
    return seg


def sieve(limit: int, segment: int = DEFAULT_SEGMENT, threads: int = 1) -> PrimeTable:
    """Segmented sieve of Eratosthenes over ``[0, limit]``.

    The peak transient working set is one boolean segment per worker; the
    result does not depend on ``segment`` or ``threads``.
    """
    limit = int(limit)
    if limit < 2:
        raise DomainError(f"sieve limit must be >= 2, got {limit}")
    if segment < 8 or segment % 8:
        raise DomainError("segment size must be a positive multiple of 8")
    try:
        base = _base_sieve(math.isqrt(limit))
        bounds = [(lo, min(lo + segment, limit + 1)) for lo in range(0, limit + 1, segment)]

        def work(span):
            seg = _sieve_segment(span[0], span[1], base)
            return np.packbits(seg, bitorder="little"), span[0] + np.flatnonzero(seg)

        if threads > 1 and len(bounds) > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                parts = list(pool.map(work, bounds))
        else:
            parts = [work(b) for b in bounds]
        bits = np.concatenate([b for b, _ in parts])
        primes = np.concatenate([p for _, p in parts]).astype(np.int64)
    except MemoryError as exc:  # pragma: no cover
        raise ResourceError(f"cannot allocate sieve up to {limit}") from exc
    return PrimeTable(limit=limit, bits=bits, primes=primes)


_cache_lock = threading.Lock()
_cached: Optional[PrimeTable] = None


def prime_table(limit: int) -> PrimeTable:
    """Shared table covering at least ``[0, limit]``, grown geometrically on demand."""
    global _cached
    limit = max(int(limit), 2)
    with _cache_lock:
        if _cached is None or _cached.limit < limit:
            grow = 2 * _cached.limit if _cached is not None else 1 << 16
            _cached = sieve(max(limit, min(grow, 1 << 28)))
        return _cached


def _miller_rabin(n: int) -> bool:
    d, s = n - 1, 0
    while not d & 1:
        d >>= 1
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def is_prime(m: int) -> bool:
    """Deterministic primality test for ``0 <= m < 2**64``."""
    m = int(m)
    if m < 0 or m >= _U64:
        raise DomainError(f"is_prime expects 0 <= m < 2**64, got {m}")
    if m < 2:
        return False
    for p in _SMALL_PRIMES:
        if m % p == 0:
            return m == p
    if m < _TRIAL_BOUND:
        return True
    return _miller_rabin(m)


def is_prime_many(
    values: np.ndarray, table: Optional[PrimeTable] = None, lookup_limit: Optional[int] = None
) -> np.ndarray:
    """Primality flags for an ``int64`` array.

    Values up to ``lookup_limit`` (default: the whole table) are looked up in
    ``table``; the rest pass a vectorized small-prime filter and then
    Miller-Rabin one by one.  Capping the lookup keeps results independent of
    how large a shared table happens to be.
    """
    v = np.asarray(values, dtype=np.int64)
    out = np.zeros(v.shape, dtype=bool)
    if v.size == 0:
        return out
    if table is None:
        inside = np.zeros(v.shape, dtype=bool)
    else:
        cap = table.limit if lookup_limit is None else min(lookup_limit, table.limit)
        inside = v <= cap
    if inside.any():
        out[inside] = table.flags_at(v[inside])
    rest = np.flatnonzero(~inside & (v >= 2))
    if rest.size:
        w = v[rest]
        keep = np.ones(w.shape, dtype=bool)
        for g in _GCD_GROUPS:
            keep &= np.gcd(w, g) == 1
        tiny = w <= _SMALL_PRIMES[-1]
        out[rest] = (keep & (w < _TRIAL_BOUND)) | (tiny & _SMALL_FLAGS[np.where(tiny, w, 0)])
        survivors = rest[keep & (w >= _TRIAL_BOUND)]
        if survivors.size:
            out[survivors] = [_miller_rabin(n) for n in v[survivors].tolist()]
    return out


def prime_pi(t: float, table: PrimeTable) -> int:
    """Number of primes ``<= t``; ``t`` may be real."""
    if t < 0:
        raise DomainError("prime_pi expects t >= 0")
    if t > table.limit:
        raise RangeError(f"t = {t} exceeds table limit {table.limit}")
    return int(np.searchsorted(table.primes, math.floor(t), side="right"))


def integer_root(n: int, k: int) -> int:
    """Largest ``r`` with ``r**k <= n`` (exact integer arithmetic)."""
    if n < 0 or k < 1:
        raise DomainError("integer_root expects n >= 0 and k >= 1")
    if k == 1 or n < 2:
        return n
    if k == 2:
        return math.isqrt(n)
    r = int(round(n ** (1.0 / k)))
    while r**k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r


def is_prime_power(n: int) -> Optional[Tuple[int, int]]:
    """Return ``(p, nu)`` with ``n == p**nu`` and ``p`` prime, else ``None``."""
    n = int(n)
    if n < 1 or n >= _U64:
        raise DomainError(f"is_prime_power expects 1 <= n < 2**64, got {n}")
    if n < 2:
        return None
    if is_prime(n):
        return n, 1
    for k in range(2, min(n.bit_length(), 63) + 1):
        r = integer_root(n, k)
        if r < 2:
            break
        if r**k == n and is_prime(r):
            return r, k
    return None


def prime_power_base_many(
    values: np.ndarray, table: PrimeTable, lookup_limit: Optional[int] = None
) -> np.ndarray:
    """Base ``p`` of each value if it is a prime power ``p**nu``, else 0.

    ``table`` must reach ``isqrt(max(values))``.
    """
    v = np.asarray(values, dtype=np.int64)
    base = np.where(is_prime_many(v, table, lookup_limit), v, 0)
    top = int(v.max()) if v.size else 0
    if top >= 4:
        powers, bases = table.higher_powers(top)
        idx = np.minimum(np.searchsorted(powers, v), powers.size - 1)
        hit = powers[idx] == v
        base = np.where(hit, bases[idx], base)
    return base


def von_mangoldt(n: int) -> float:
    """``log p`` if ``n`` is a power of the prime ``p``, else 0."""
    pp = is_prime_power(n)
    return math.log(pp[0]) if pp else 0.0


def von_mangoldt_many(
    values: np.ndarray, table: PrimeTable, lookup_limit: Optional[int] = None
) -> np.ndarray:
    base = prime_power_base_many(values, table, lookup_limit)
    out = np.zeros(base.shape, dtype=np.float64)
    nz = base > 0
    out[nz] = np.log(base[nz].astype(np.float64))
    return out
