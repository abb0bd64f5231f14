"""Main terms: Li, the two-integral Li_S, its asymptotic coefficients, the
density constants C_f and the de la Vallee Poussin type error envelope.
"""

from __future__ import annotations

import enum
import math
import sys
from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Sequence, Tuple, Union

import mpmath
import numpy as np
from scipy import integrate

from .errors import DomainError, PreconditionError
from .primes import PrimeTable

QUAD_RTOL = 1e-13
MAX_COEFFS = 12
_EPS = sys.float_info.epsilon
_LOG2 = math.log(2.0)


def li_with_error(x: float, rtol: float = QUAD_RTOL) -> Tuple[float, float]:
    """``int_2^x dt / log t`` and QUADPACK's error estimate.

    Integrated in ``u = log t`` where the integrand ``e^u / u`` is smooth.
    """
    if x < 2:
        raise DomainError(f"li expects x >= 2, got {x}")
    hi = math.log(x)
    if hi <= _LOG2:
        return 0.0, 0.0
    value, err = integrate.quad(
        lambda u: math.exp(u - hi) / u, _LOG2, hi, epsabs=0.0, epsrel=rtol, limit=500
    )
    scale = math.exp(hi)
    return value * scale, err * scale


def li(x: float) -> float:
    return li_with_error(x)[0]


def li_S_with_error(x: float, rtol: float = QUAD_RTOL) -> Tuple[float, float]:
    """Li_S(x) = int_2^sqrt(x) dt/log t + int_2^sqrt(x) dt/log(x/t), with error estimate."""
    if x < 4:
        raise DomainError(f"li_S expects x >= 4, got {x}")
    big_l = math.log(x)
    half = big_l / 2.0
    first, e1 = li_with_error(math.exp(half), rtol)
    if half <= _LOG2:
        return first, e1
    # t = e^u: int e^u / (log x - u) du, with log x - u >= log(x)/2
    second, e2 = integrate.quad(
        lambda u: math.exp(u - half) / (big_l - u), _LOG2, half, epsabs=0.0, epsrel=rtol, limit=500
    )
    scale = math.exp(half)
    return first + second * scale, e1 + e2 * scale


def li_S(x: float) -> float:
    return li_S_with_error(x)[0]


def weak_main_term(x: float) -> float:
    """The leading term ``4 sqrt(x) / log x``."""
    return 4.0 * math.sqrt(x) / math.log(x)


@dataclass(frozen=True)
class AsymptoticCoeffs:
    """Coefficients ``a_1..a_N`` of ``Li_S(x) ~ sqrt(x) * sum a_n / (log x)**n``.

    ``first`` and ``second`` hold each integral's contribution, in powers of
    ``1/log sqrt(x)``, before rescaling by ``2**n``.
    """

    N: int
    a: List[int]
    first: List[int] = field(repr=False)
    second: List[int] = field(repr=False)


def coeffs(N: int) -> AsymptoticCoeffs:
    """Derive ``a_n`` by repeated integration by parts.

    With ``y = sqrt(x)`` and ``L = log y``:

    * ``int dt/log^k t = t/log^k t + k int dt/log^(k+1) t`` gives the first
      integral's coefficients ``c_1 = 1``, ``c_(k+1) = k c_k`` of ``y / L^k``;
    * after ``t -> x/u`` the second integral is ``x int_y du / (u^2 log u)``, and
      ``int du/(u^2 log^k u) = -1/(u log^k u) - k int du/(u^2 log^(k+1) u)``
      gives ``d_1 = 1``, ``d_(k+1) = -k d_k``.

    Since ``1/L^n = 2^n / (log x)^n``, ``a_n = 2^n (c_n + d_n)``.
    """
    if int(N) != N or not 1 <= N <= MAX_COEFFS:
        raise DomainError(f"N must be an integer in [1, {MAX_COEFFS}], got {N}")
    first, second = [1], [1]
    for k in range(1, N):
        first.append(k * first[-1])
        second.append(-k * second[-1])
    a = [2 ** (n + 1) * (c + d) for n, (c, d) in enumerate(zip(first, second))]
    return AsymptoticCoeffs(N=int(N), a=a, first=first, second=second)


def expansion(x: float, a: Sequence[float]) -> float:
    """``sqrt(x) * sum_n a_n / (log x)**n``."""
    big_l = math.log(x)
    return math.sqrt(x) * math.fsum(c / big_l ** (n + 1) for n, c in enumerate(a))


def fit_coefficients(
    known: Sequence[float] = (4,),
    degree: int = 6,
    exponents: Sequence[int] = tuple(range(8, 301, 4)),
) -> np.ndarray:
    """Recover the next expansion coefficients from quadrature alone.

    For ``x = 10**k`` the scaled residual
    ``(Li_S(x)/sqrt(x) - sum_{n<=m} known_n / L^n) * L^(m+1)`` is fitted by a
    polynomial of ``degree`` in ``1/L`` (``L = log x``); its coefficients
    estimate ``a_(m+1), a_(m+2), ...``.  The grid reaches far beyond any
    computable ``pi_S`` because the estimate is only as good as the spread of
    ``1/L``.
    """
    m = len(known)
    rows, rhs = [], []
    for k in exponents:
        x = 10.0**k
        big_l = math.log(x)
        head = math.fsum(c / big_l ** (n + 1) for n, c in enumerate(known))
        rhs.append((li_S(x) / math.sqrt(x) - head) * big_l ** (m + 1))
        rows.append([big_l**-j for j in range(degree + 1)])
    sol, *_ = np.linalg.lstsq(np.asarray(rows), np.asarray(rhs), rcond=None)
    return sol


class ConstantKind(str, enum.Enum):
    PRIME = "prime"
    PRIME_POWER = "prime_power"
    LAMBDA = "lambda"


@dataclass(frozen=True)
class ConstantInterval:
    """Rigorous enclosure ``lower <= C_f <= upper`` from a partial sum and a tail bound."""

    f: ConstantKind
    lower: float
    upper: float
    cutoff: int
    partial: float = 0.0
    tail: float = 0.0

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper


def _tail_bound(kind: ConstantKind, cutoff: int) -> float:
    if kind is ConstantKind.LAMBDA:
        # sum_{n>P} log n/(n(n+1)) <= int_P^inf log t/t^2 dt = (log P + 1)/P <= 2 log P / P
        return 2.0 * math.log(cutoff) / cutoff
    # odd n > P: 1/(n(n+1)) <= (1/(n-1) - 1/(n+1))/2, telescoping to <= 1/(2P);
    # the only even prime powers are 2^k, contributing <= sum_{2^k > P} 4^-k <= 4/(3P^2)
    bound = 1.0 / (2 * cutoff)
    if kind is ConstantKind.PRIME_POWER:
        bound += 4.0 / (3.0 * cutoff * cutoff)
    return bound


# every C_f is below 2, so the rounding enclosure 2 * 3 eps * partial stays under this
_ROUNDING_SLACK = 12.0 * _EPS


def required_cutoff(kind: Union[ConstantKind, str], tol: float) -> int:
    """Smallest sieve limit for which :func:`constant` meets ``tol``."""
    kind = ConstantKind(kind)
    if not tol > _ROUNDING_SLACK:
        raise DomainError(f"tol must exceed the rounding floor {_ROUNDING_SLACK:.3g}, got {tol}")

    def too_wide(cutoff: int) -> bool:
        return _tail_bound(kind, cutoff) + _ROUNDING_SLACK > tol

    lo, hi = 8, 16
    while too_wide(hi):
        lo, hi = hi, hi * 2
    if not too_wide(lo):
        return lo
    while hi - lo > 1:
        mid = (lo + hi) // 2
        lo, hi = (mid, hi) if too_wide(mid) else (lo, mid)
    return hi


def constant(f: Union[ConstantKind, str], tol: float, table: PrimeTable) -> ConstantInterval:
    """Enclose ``C_f = sum_d f(d)/(d(d+1))`` using every term with ``d <= table.limit``."""
    kind = ConstantKind(f)
    if not tol > 0:
        raise DomainError("tol must be positive")
    cutoff = table.limit
    if cutoff < 8:
        raise PreconditionError("constant() needs a table with limit >= 8")
    p = table.primes.astype(np.float64)
    if kind is ConstantKind.PRIME:
        terms = 1.0 / (p * (p + 1.0))
    else:
        powers, bases = table.higher_powers(cutoff)
        n = np.concatenate([p, powers.astype(np.float64)])
        w = 1.0 if kind is ConstantKind.PRIME_POWER else np.log(
            np.concatenate([p, bases.astype(np.float64)])
        )
        terms = w / (n * (n + 1.0))
    partial = math.fsum(terms.tolist())
    # each term carries <= 2.5 eps relative rounding; fsum adds half an ulp
    rounding = 3.0 * _EPS * partial
    tail = _tail_bound(kind, cutoff)
    lower, upper = partial - rounding, partial + tail + rounding
    if upper - lower > tol:
        raise PreconditionError(
            f"sieve limit {cutoff} too small for tol={tol}; need limit >= {required_cutoff(kind, tol)}"
        )
    return ConstantInterval(kind, lower, upper, cutoff, partial, tail)


@lru_cache(maxsize=None)
def _constant_series(kind: ConstantKind, dps: int) -> mpmath.mpf:
    with mpmath.workdps(dps + 10):
        target = mpmath.mpf(10) ** -(dps + 5)
        total = mpmath.mpf(0)
        k = 2
        while True:
            if kind is ConstantKind.PRIME:
                term = mpmath.primezeta(k)
            elif kind is ConstantKind.PRIME_POWER:
                term, nu = mpmath.mpf(0), 1
                while True:
                    part = mpmath.primezeta(nu * k)
                    term += part
                    if part < target:
                        break
                    nu += 1
            else:
                term = -mpmath.zeta(k, derivative=1) / mpmath.zeta(k)
            total += term if k % 2 == 0 else -term
            if abs(term) < target:
                return +total
            k += 1


def constant_value(f: Union[ConstantKind, str], dps: int = 30) -> float:
    """High-precision ``C_f`` from the absolutely convergent expansion

    ``1/(d(d+1)) = sum_{k>=2} (-1)^k d^(-k)``, which turns ``C_f`` into an
    alternating series of prime zeta values (``P(k)``, ``sum_nu P(nu k)``) or of
    ``-zeta'(k)/zeta(k)`` for Lambda.  Independent of any sieve.
    """
    return float(_constant_series(ConstantKind(f), int(dps)))


def pnt_envelope(x: float, c: float = 1.0) -> float:
    """``sqrt(x) * exp(-c (log x)^(3/5) (log log x)^(-1/5))``; a normalizer for reports."""
    if x <= math.e:
        raise DomainError(f"pnt_envelope needs log log x > 0, got x = {x}")
    big_l = math.log(x)
    return math.sqrt(x) * math.exp(-c * big_l**0.6 * math.log(big_l) ** -0.2)
