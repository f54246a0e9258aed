"""Two-block portfolios: m short debts of value s1 and duration L1, n long
debts of value s2 and duration L2 > L1.

``short_dominant_approx`` gives the m >> n estimates ``V ~ s1 L2 / L1`` and
``sigma0 ~ s1 (L2 / L1) ln m``; ``exact_path`` pushes the same portfolio
through the aggregate formulas for V and sigma0 so the two can be compared.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .critical import SMALL_K, critical_from_aggregates
from .errors import DomainError, LowDominance, SmallK

DOMINANCE_RATIO = 10


@dataclass(frozen=True)
class MixedPortfolio:
    m: int
    n: int
    s1: float
    s2: float
    L1: float
    L2: float

    def __post_init__(self):
        for name in ("m", "n"):
            v = getattr(self, name)
            if int(v) != v or v < 0:
                raise DomainError(f"{name} must be a non-negative integer, got {v}")
        if self.m + self.n < 1:
            raise DomainError("portfolio needs at least one debt")
        for name in ("s1", "s2", "L1", "L2"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be positive, got {v}")
        if not self.L2 > self.L1:
            raise DomainError(f"long duration L2 ({self.L2}) must exceed L1 ({self.L1})")

    @classmethod
    def from_raw(cls, m, n, s1_raw, s2_raw, L1, L2):
        """Divide raw debt values by their mean ``(m s1 + n s2) / (m + n)``."""
        s_hat = (m * s1_raw + n * s2_raw) / (m + n)
        return cls(m, n, s1_raw / s_hat, s2_raw / s_hat, L1, L2)

    @property
    def k(self):
        return self.m + self.n

    @property
    def ratio(self):
        return self.L2 / self.L1


def mixed_aggregates(p: MixedPortfolio):
    """(sigma, E) with the short block weighted by L2 / L1."""
    sigma = p.m * p.s1 + p.n * p.s2
    E = p.m * p.s1 * p.ratio + p.n * p.s2
    return sigma, E


def mixed_critical(m, n, V):
    k = m + n
    if int(k) != k or k < 2:
        raise DomainError(f"m + n must be an integer >= 2, got {k}")
    if not (math.isfinite(V) and V > 0):
        raise DomainError(f"velocity V must be positive, got {V}")
    if k < SMALL_K:
        warnings.warn(SmallK(f"m + n = {k} < {SMALL_K}; large-k critical formulas are unreliable"),
                      stacklevel=2)
    return V * math.log(k)


@dataclass(frozen=True)
class ShortDominant:
    V: float
    sigma0: float
    validity: float


def short_dominant_approx(p: MixedPortfolio) -> ShortDominant:
    """Short-dominant estimates plus ``validity = n/m + L1/L2``, the largest neglected ratio.

    Single-block books (n = 0 or m = 0) use the block's own value and
    duration ratio and report ``validity = 0``.
    """
    if p.n == 0:
        V = p.s1 * p.ratio
        return ShortDominant(V=V, sigma0=V * math.log(p.m), validity=0.0)
    if p.m == 0:
        V = p.s2
        return ShortDominant(V=V, sigma0=V * math.log(p.n), validity=0.0)
    if p.m < DOMINANCE_RATIO * p.n:
        warnings.warn(LowDominance(
            f"m = {p.m} < {DOMINANCE_RATIO} n = {DOMINANCE_RATIO * p.n}; "
            "short-dominant approximation is outside its regime"), stacklevel=2)
    V = p.s1 * p.ratio
    return ShortDominant(V=V, sigma0=V * math.log(p.m), validity=p.n / p.m + 1 / p.ratio)


def exact_path(p: MixedPortfolio):
    """(V, sigma0) from the block aggregates via ``V = (E - k sigma) / k`` and ``V ln k``.

    Raises ``NonPositiveVelocity`` whenever ``E <= k sigma``.
    """
    sigma, E = mixed_aggregates(p)
    V, _ = critical_from_aggregates(E, sigma, p.k)
    return V, mixed_critical(p.m, p.n, V)
