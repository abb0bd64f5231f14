import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from floorprimes.errors import DomainError, RangeError
from floorprimes.primes import (
    integer_root,
    is_prime,
    is_prime_many,
    is_prime_power,
    prime_pi,
    prime_power_base_many,
    prime_table,
    sieve,
    von_mangoldt,
    von_mangoldt_many,
)

from oracles import factorize, lam, prime_power_by_factorization, trial_division_is_prime


def test_sieve_small():
    assert sieve(10).primes.tolist() == [2, 3, 5, 7]
    assert sieve(2).primes.tolist() == [2]


def test_sieve_rejects_tiny_limit():
    with pytest.raises(DomainError):
        sieve(1)


def test_sieve_count_1e6():
    # 78498 = number of primes <= 1e6, counted by trial division (tests/oracles.py)
    assert len(sieve(10**6).primes) == 78498


@pytest.mark.parametrize("segment", [8, 64, 1000, 1 << 20])
def test_sieve_independent_of_segment_and_threads(segment):
    ref = sieve(50_000)
    other = sieve(50_000, segment=segment - segment % 8 or 8, threads=3)
    assert np.array_equal(ref.primes, other.primes)
    assert np.array_equal(ref.bits, other.bits)


def test_table_invariants():
    t = sieve(10_000)
    flags = t.flags
    assert flags.size == 10_001
    assert not flags[0] and not flags[1]
    assert np.array_equal(np.flatnonzero(flags), t.primes)
    assert np.all(np.diff(t.primes) > 0)
    for m in range(10_001):
        assert t.is_prime(m) == trial_division_is_prime(m)


def test_is_prime_exhaustive_small():
    for n in range(10_001):
        assert is_prime(n) == trial_division_is_prime(n), n


def test_is_prime_examples():
    assert not is_prime(1)
    assert is_prime(2)
    # trial division by the primes <= 1e6 finds no factor
    assert is_prime(10**12 + 39)
    assert not is_prime(10**12 + 37)


@pytest.mark.parametrize(
    "n, expected",
    [
        (2**61 - 1, True),  # Mersenne prime
        (2**64 - 59, True),  # largest prime below 2^64
        (3215031751, False),  # strong pseudoprime to bases 2, 3, 5, 7
        (3825123056546413051, False),  # strong pseudoprime to bases 2..23
        (318665857834031151167461, None),  # beyond 2^64: rejected
    ],
)
def test_is_prime_hard_cases(n, expected):
    if expected is None:
        with pytest.raises(DomainError):
            is_prime(n)
    else:
        assert is_prime(n) is expected


def test_is_prime_many_matches_scalar():
    rng = np.random.default_rng(7)
    values = np.concatenate([np.arange(0, 3000), rng.integers(10**9, 10**15, 3000)])
    table = sieve(1000)
    got = is_prime_many(values, table)
    assert got.tolist() == [is_prime(int(v)) for v in values]
    capped = is_prime_many(values, prime_table(10**5), lookup_limit=10)
    assert np.array_equal(got, capped)


def test_prime_pi():
    t = sieve(10**6)
    assert prime_pi(1.9, t) == 0
    assert prime_pi(10, t) == 4
    assert prime_pi(10**6, t) == 78498
    with pytest.raises(RangeError):
        prime_pi(10**6 + 1, t)


def test_prime_pi_monotone_and_right_continuous():
    t = sieve(2000)
    values = [prime_pi(m, t) for m in range(2001)]
    assert values == sorted(values)
    for m in range(1, 2000):
        assert prime_pi(m + 0.5, t) == values[m]
        assert prime_pi(m - 1e-9, t) == values[m - 1]


def test_is_prime_power_examples():
    assert is_prime_power(8) == (2, 3)
    assert is_prime_power(6) is None
    assert is_prime_power(1) is None
    assert 3**20 == 3486784401
    assert is_prime_power(3**20) == (3, 20)


def test_is_prime_power_exhaustive_small():
    for n in range(1, 10_001):
        assert is_prime_power(n) == prime_power_by_factorization(n), n


def test_is_prime_power_large():
    assert is_prime_power(2**63) == (2, 63)
    assert is_prime_power((2**31 - 1) ** 2) == (2**31 - 1, 2)
    assert is_prime_power(2**62 * 3) is None
    assert is_prime_power((2**32 - 5) ** 2) == (2**32 - 5, 2)
    assert is_prime_power(6**24) is None


@given(st.integers(min_value=0, max_value=2**64 - 1), st.integers(min_value=1, max_value=63))
def test_integer_root_is_floor_root(n, k):
    r = integer_root(n, k)
    assert r**k <= n < (r + 1) ** k


def test_prime_power_base_many_matches_scalar():
    t = sieve(10**4)
    values = np.arange(1, 10**5, dtype=np.int64)
    base = prime_power_base_many(values, t)
    for v, b in zip(values.tolist(), base.tolist()):
        pp = is_prime_power(v)
        assert b == (pp[0] if pp else 0), v


def test_von_mangoldt_examples():
    assert von_mangoldt(1) == 0
    assert von_mangoldt(8) == pytest.approx(0.693147, abs=1e-6)
    assert von_mangoldt(8) == math.log(2)
    assert von_mangoldt(6) == 0


def test_chebyshev_psi_agrees_with_factorization():
    n_max = 10**5
    t = sieve(n_max)
    ours = math.fsum(von_mangoldt_many(np.arange(1, n_max + 1), t).tolist())
    direct = 0.0
    for n in range(2, n_max + 1):
        f = factorize(n)
        if len(f) == 1:
            direct += math.log(next(iter(f)))
    assert abs(ours - direct) <= 1e-9 * n_max
    assert abs(ours / math.log(n_max) - direct / math.log(n_max)) < 1e-9


@settings(max_examples=300)
@given(st.integers(min_value=1, max_value=5000))
def test_von_mangoldt_scalar_vs_oracle(n):
    assert von_mangoldt(n) == pytest.approx(lam(n), abs=1e-15)
