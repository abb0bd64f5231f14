"""Exact values of pi_S(x) and S_f(x).

The block method groups ``n`` by the value ``q = [x/n]``: the block of ``q``
is ``x//(q+1) < n <= x//q``, so

    S_f(x) = sum over q in S(x) of f(q) * (x//q - x//(q+1)),

and pi_S(x) counts the prime ``q``.  Both cost O(sqrt(x)) block evaluations
plus one primality test per large member.  ``brute_force`` is the literal
O(x) loop used as a test oracle.
"""

from __future__ import annotations

import enum
import math
import sys
import threading
import time
from dataclasses import dataclass
from typing import Dict, Iterable, Optional, Tuple, Union

import numpy as np

from . import floorset
from .errors import DomainError, RangeError
from .primes import (
    PrimeTable,
    is_prime_many,
    prime_pi,
    prime_power_base_many,
    prime_table,
    von_mangoldt_many,
)

MAX_X = 1 << 50
BRUTE_MAX_X = 10**8
_EPS = sys.float_info.epsilon


class Quantity(str, enum.Enum):
    PI_S = "pi_S"
    S_PRIME = "S_prime"
    S_PRIME_POWER = "S_prime_power"
    S_LAMBDA = "S_lambda"
    S_ONE = "S_one"


class Weight(str, enum.Enum):
    PRIME = "prime"
    PRIME_POWER = "prime_power"
    LAMBDA = "lambda"
    ONE = "one"


_QUANTITY_OF = {
    Weight.PRIME: Quantity.S_PRIME,
    Weight.PRIME_POWER: Quantity.S_PRIME_POWER,
    Weight.LAMBDA: Quantity.S_LAMBDA,
    Weight.ONE: Quantity.S_ONE,
}
_WEIGHT_OF = {v: k for k, v in _QUANTITY_OF.items()}


@dataclass(frozen=True)
class ExactResult:
    """An exactly evaluated quantity.

    ``value`` is an ``int`` for counting quantities and a correctly rounded
    ``float`` for ``S_lambda``, with ``error_bound`` bounding its distance to
    the true real number.
    """

    x: int
    quantity: Union[Quantity, str]
    value: Union[int, float]
    method: str
    elapsed: float
    blocks: int = 0
    error_bound: float = 0.0


def _check_x(x: int, upper: int = MAX_X) -> int:
    if int(x) != x or x < 1:
        raise DomainError(f"x must be an integer >= 1, got {x!r}")
    if x >= upper:
        raise RangeError(f"x = {x} beyond supported range (< {upper})")
    return int(x)


def weights(values: np.ndarray, f: Weight, table: PrimeTable, lookup_limit: Optional[int] = None) -> np.ndarray:
    """Evaluate ``f`` on an integer array (``int64`` for indicators, ``float64`` for Lambda)."""
    f = Weight(f)
    if f is Weight.PRIME:
        return is_prime_many(values, table, lookup_limit).astype(np.int64)
    if f is Weight.PRIME_POWER:
        return (prime_power_base_many(values, table, lookup_limit) > 0).astype(np.int64)
    if f is Weight.LAMBDA:
        return von_mangoldt_many(values, table, lookup_limit)
    return np.ones(np.shape(values), dtype=np.int64)


def _block_arrays(x: int) -> Iterable[np.ndarray]:
    _, small = floorset.split_point(x)
    if small:
        yield np.arange(1, small + 1, dtype=np.int64)
    yield from floorset.large_values(x)


def pi_S(x: int) -> ExactResult:
    """Number of primes in S(x).

    Primes ``p <= B = x // (isqrt(x) + 1)`` are all members and are counted
    from the sieve; each large member ``[x/n]``, ``n <= isqrt(x)``, is tested
    individually.
    """
    t0 = time.perf_counter()
    x = _check_x(x)
    r, small = floorset.split_point(x)
    table = prime_table(r)
    count = prime_pi(small, table)
    blocks = small
    for q in floorset.large_values(x):
        count += int(np.count_nonzero(is_prime_many(q, table, lookup_limit=r)))
        blocks += q.size
    return ExactResult(x, Quantity.PI_S, count, "block", time.perf_counter() - t0, blocks)


def S_f(x: int, f: Union[Weight, str]) -> ExactResult:
    """``sum_{n <= x} f([x/n])`` by block arithmetic."""
    t0 = time.perf_counter()
    x = _check_x(x)
    f = Weight(f)
    r, _ = floorset.split_point(x)
    table = prime_table(r)
    blocks = 0
    if f is Weight.LAMBDA:
        terms = []
        for q in _block_arrays(x):
            blocks += q.size
            w = weights(q, f, table, lookup_limit=r)
            nz = w > 0
            terms.extend((w[nz] * (x // q[nz] - x // (q[nz] + 1))).tolist())
        value = math.fsum(terms)
        # per-term rounding of log p and of the product, plus the final fsum rounding
        bound = 2.0 * _EPS * value
        return ExactResult(x, _QUANTITY_OF[f], value, "block", time.perf_counter() - t0, blocks, bound)
    total = 0
    for q in _block_arrays(x):
        blocks += q.size
        w = weights(q, f, table, lookup_limit=r)
        total += int(np.dot(w, x // q - x // (q + 1)))
    return ExactResult(x, _QUANTITY_OF[f], total, "block", time.perf_counter() - t0, blocks)


def evaluate(x: int, quantity: Union[Quantity, str]) -> ExactResult:
    quantity = Quantity(quantity)
    if quantity is Quantity.PI_S:
        return pi_S(x)
    return S_f(x, _WEIGHT_OF[quantity])


_dense_lock = threading.Lock()
_dense: Dict[int, Tuple[np.ndarray, np.ndarray]] = {}


def _dense_lookup(table: PrimeTable) -> Tuple[np.ndarray, np.ndarray]:
    """Per-value arrays over ``[0, table.limit]``: prime flags and prime-power base (0 if none)."""
    with _dense_lock:
        hit = _dense.get(id(table))
        if hit is None:
            flags = table.flags
            base = np.where(flags, np.arange(flags.size, dtype=np.int32), 0).astype(np.int32)
            powers, bases = table.higher_powers(table.limit)
            base[powers] = bases
            _dense.clear()
            _dense[id(table)] = hit = (flags, base)
        return hit


def brute_force_many(
    x: int,
    quantities: Iterable[Union[Quantity, str]] = tuple(Quantity),
    progressions: Iterable[Tuple[int, int]] = (),
) -> Dict[object, ExactResult]:
    """The literal O(x) loop ``v[n] = x // n``, evaluated once and shared.

    Besides the :class:`Quantity` members the result holds ``"cardinality"``
    and ``("progression", q, a)`` keys for each requested progression.
    """
    t0 = time.perf_counter()
    x = _check_x(x, BRUTE_MAX_X + 1)
    flags, base = _dense_lookup(prime_table(x))
    v = x // np.arange(1, x + 1, dtype=np.int64)
    change = np.ones(v.shape, dtype=bool)
    change[1:] = v[1:] != v[:-1]
    distinct = v[change]
    out: Dict[object, ExactResult] = {}

    def put(key, quantity, value, bound=0.0):
        out[key] = ExactResult(x, quantity, value, "brute_force", time.perf_counter() - t0, x, bound)

    for quantity in map(Quantity, quantities):
        if quantity is Quantity.PI_S:
            put(quantity, quantity, int(np.count_nonzero(flags[distinct])))
        elif quantity is Quantity.S_PRIME:
            put(quantity, quantity, int(np.count_nonzero(flags[v])))
        elif quantity is Quantity.S_PRIME_POWER:
            put(quantity, quantity, int(np.count_nonzero(base[v])))
        elif quantity is Quantity.S_LAMBDA:
            # group the n-loop's terms log p by p; each group sum is count * log p
            hits = np.bincount(base[v])
            p = np.flatnonzero(hits[2:]) + 2
            value = math.fsum((hits[p] * np.log(p.astype(np.float64))).tolist())
            put(quantity, quantity, value, 2.0 * _EPS * value)
        else:
            put(quantity, quantity, int(np.ones_like(v).sum()))
    put("cardinality", "cardinality", int(distinct.size))
    for q, a in progressions:
        put(("progression", q, a), "progression", int(np.count_nonzero(distinct % q == a % q)))
    return out


def brute_force(x: int, quantity: Union[Quantity, str]) -> ExactResult:
    """Oracle for :func:`pi_S` and :func:`S_f` by direct enumeration (``x <= 1e8``)."""
    quantity = Quantity(quantity)
    return brute_force_many(x, (quantity,))[quantity]
