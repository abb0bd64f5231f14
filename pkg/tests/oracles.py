"""Independent reference implementations used only by the tests."""

import math


def trial_division_is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def factorize(n: int) -> dict:
    out, d = {}, 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def prime_power_by_factorization(n: int):
    if n < 2:
        return None
    f = factorize(n)
    if len(f) != 1:
        return None
    (p, k), = f.items()
    return p, k


def floor_set(x: int) -> set:
    return {x // n for n in range(1, x + 1)}


def naive_psi_sum(x: int, lo: int, hi: int, delta: int, weight) -> float:
    """Plain double-precision loop with running ``+=``."""
    total = 0.0
    for d in range(lo + 1, hi + 1):
        w = weight(d)
        if w:
            t = x / (d + delta)
            total += w * (t - math.floor(t) - 0.5)
    return total


def lam(n: int) -> float:
    pp = prime_power_by_factorization(n)
    return math.log(pp[0]) if pp else 0.0


def lambda_table(n: int) -> list:
    """Lambda(d) for 0 <= d <= n from a plain bytearray sieve."""
    composite = bytearray(n + 1)
    out = [0.0] * (n + 1)
    for p in range(2, n + 1):
        if composite[p]:
            continue
        composite[p * p :: p] = b"\x01" * len(range(p * p, n + 1, p))
        logp, q = math.log(p), p
        while q <= n:
            out[q] = logp
            q *= p
    return out
