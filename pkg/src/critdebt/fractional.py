"""Critical debt for fractional dimension 1 < d < 2, with alpha = d / 2.

The sum over slots picks up the weight ``alpha j^(alpha - 1)``, the critical
value becomes ``sigma0 = alpha / (1 - alpha) V`` and alpha and V are tied by
``E = f(alpha) V^(1 + alpha)`` with ``f(alpha) = alpha^2 Gamma(alpha) zeta(1 + alpha)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .parastat import ParastatParams, _checked_sum, _validate, occupations, solve_weighted
from .quadrature import integrate
from .solvers import DEFAULT_CONFIG, SolveConfig, fixed_point
from .specfun import gamma_fn, zeta_fn

F_ALPHA_MAX = 1.7


@dataclass(frozen=True)
class Dimension:
    d: float

    def __post_init__(self):
        if not (math.isfinite(self.d) and 1 <= self.d < 2):
            raise DomainError(f"fractional dimension must satisfy 1 <= d < 2, got {self.d}")

    @property
    def alpha(self):
        return self.d / 2

    @property
    def delta(self):
        return 2 - self.d


def _check_alpha(alpha):
    # alpha = 0.5 (d = 1) is admitted as the closed end of the range
    if not (math.isfinite(alpha) and 0.5 <= alpha < 1):
        if alpha >= 1:
            raise DomainError(f"alpha = {alpha} >= 1: the d = 2 lambda-point is excluded here")
        raise DomainError(f"alpha must lie in [0.5, 1), got {alpha}")


def f_alpha(alpha):
    if not (math.isfinite(alpha) and 0 < alpha <= F_ALPHA_MAX):
        raise DomainError(f"f_alpha is defined here for 0 < alpha <= {F_ALPHA_MAX}, got {alpha}")
    return alpha * alpha * gamma_fn(alpha) * zeta_fn(1 + alpha)


def velocity_from_energy(E, alpha):
    """Invert ``E = f(alpha) V^(1 + alpha)`` for V."""
    _check_alpha(alpha)
    if not (math.isfinite(E) and E > 0):
        raise DomainError(f"E must be positive, got {E}")
    return (E / f_alpha(alpha)) ** (1 / (1 + alpha))


def energy_from_velocity(V, alpha):
    _check_alpha(alpha)
    return f_alpha(alpha) * V ** (1 + alpha)


def _frac_weights(k, alpha):
    return alpha * np.arange(1, k + 1, dtype=float) ** (alpha - 1)


def sigma_rhs_frac(sigma, params: ParastatParams, alpha):
    _check_alpha(alpha)
    _validate(sigma, params)
    n = occupations(sigma, params.b, params.kappa, params.k)
    return _checked_sum(_frac_weights(params.k, alpha) * n, "fractional sigma sum")


def solve_sigma_frac(params: ParastatParams, alpha, cfg: SolveConfig = DEFAULT_CONFIG):
    _check_alpha(alpha)
    return solve_weighted(params, _frac_weights(params.k, alpha), cfg)


def critical_sigma_frac(alpha, V):
    _check_alpha(alpha)
    if not (math.isfinite(V) and V > 0):
        raise DomainError(f"velocity V must be positive, got {V}")
    return alpha / (1 - alpha) * V


@dataclass(frozen=True)
class FractionalCritical:
    alpha: float
    b: float
    k: int
    sigma0: float       # self-consistent quadrature value
    B0: float
    sigma01: float      # principal term of the bracketed integral
    sigma02: float      # leading correction, -exp(-B0) / 2
    expansion: float    # (alpha / b) (sigma01 + sigma02)
    leading: float      # alpha / ((1 - alpha) b)


def frac_integral(B0, alpha, k):
    """``integral_1^k x^(alpha - 2) (1 - B0 x e^{-B0 x}) dx``."""
    return integrate(lambda x: x ** (alpha - 2) * (1.0 - B0 * x * np.exp(-B0 * x)), 1.0, float(k))


def sigma0_frac_numeric(alpha, b, k, cfg: SolveConfig = DEFAULT_CONFIG) -> FractionalCritical:
    """Solve ``sigma0 = (alpha / b) * frac_integral(b sigma0)`` and report the expansion terms."""
    _check_alpha(alpha)
    if not (math.isfinite(b) and b > 0):
        raise DomainError(f"b must be positive, got {b}")
    if int(k) != k or k < 100:
        raise DomainError(f"k must be an integer >= 100, got {k}")
    leading = alpha / ((1 - alpha) * b)
    sigma0 = fixed_point(lambda s: alpha / b * frac_integral(b * s, alpha, k), leading, cfg)
    B0 = b * sigma0
    sigma01 = (1 - k ** (alpha - 1)) / (1 - alpha)
    sigma02 = -0.5 * math.exp(-B0)
    return FractionalCritical(alpha=alpha, b=b, k=int(k), sigma0=sigma0, B0=B0, sigma01=sigma01,
                              sigma02=sigma02, expansion=alpha / b * (sigma01 + sigma02),
                              leading=leading)


def alpha_sweep(alphas, *, E=None, V=None):
    """Rows of (alpha, f(alpha), V, sigma0) at fixed E, or at fixed V when E is None."""
    if (E is None) == (V is None):
        raise ValueError("give exactly one of E or V")
    rows = []
    for a in alphas:
        vel = velocity_from_energy(E, a) if E is not None else V
        rows.append({"alpha": float(a), "f_alpha": f_alpha(a), "V": vel,
                     "sigma0": critical_sigma_frac(a, vel)})
    return rows
