"""Gamma and Riemann zeta on the positive real axis."""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import DomainError

# Lanczos approximation, g = 7, n = 9
_LANCZOS_G = 7
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

# Bernoulli numbers B_2 .. B_24
_BERNOULLI = (
    Fraction(1, 6), Fraction(-1, 30), Fraction(1, 42), Fraction(-1, 30), Fraction(5, 66),
    Fraction(-691, 2730), Fraction(7, 6), Fraction(-3617, 510), Fraction(43867, 798),
    Fraction(-174611, 330), Fraction(854513, 138), Fraction(-236364091, 2730),
)
_ZETA_N = 12


def _lanczos(x):
    x -= 1.0
    acc = _LANCZOS[0]
    for i, c in enumerate(_LANCZOS[1:], start=1):
        acc += c / (x + i)
    t = x + _LANCZOS_G + 0.5
    half = t ** (0.5 * (x + 0.5))  # split so t^(x + 1/2) does not overflow before e^-t
    return math.sqrt(2 * math.pi) * half * math.exp(-t) * half * acc


def gamma_fn(x: float) -> float:
    if not (math.isfinite(x) and x > 0):
        raise DomainError(f"gamma_fn needs x > 0, got {x}")
    if x > 171.6:
        raise DomainError(f"gamma({x}) overflows double precision")
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * _lanczos(1.0 - x))
    return _lanczos(x)


def zeta_fn(s: float) -> float:
    """Riemann zeta for real s > 1 by Euler-Maclaurin summation.

    Twelve direct terms, the integral tail and twelve Bernoulli corrections
    leave a truncation error far below double precision for s > 1.
    """
    if not (math.isfinite(s) and s > 1):
        raise DomainError(f"zeta_fn needs s > 1, got {s}")
    N = _ZETA_N
    terms = [n ** -s for n in range(1, N)]
    terms.append(N ** (1 - s) / (s - 1))
    terms.append(0.5 * N ** -s)
    rising = s  # s (s+1) ... (s+2m-2)
    fact = 2.0  # (2m)!
    power = N ** (-s - 1)
    for m, bern in enumerate(_BERNOULLI, start=1):
        terms.append(float(bern) / fact * rising * power)
        rising *= (s + 2 * m - 1) * (s + 2 * m)
        fact *= (2 * m + 1) * (2 * m + 2)
        power /= N * N
    return math.fsum(terms)
