"""Large-k closed forms for sigma and E and their distance from the exact sums.

``correction_order="leading"`` reproduces the closed forms exactly as they
are usually quoted::

    B     = ln(k / kappa + 1) - exp(-B kappa)
    sigma = B / b
    E     = ((k + kappa + 1) B - k + kappa exp(-B kappa)) / b

``correction_order="first"`` keeps what those forms drop: the
``exp(-2 B x)`` term of the expanded integrand, the upper-limit
exponentials and the ``exp(-B kappa) / B`` piece of E1. Comparing the two
measures what the truncation costs.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NoConvergence, RegimeViolation
from .parastat import ParastatParams, payoff_exact, solve_sigma
from .quadrature import euler_maclaurin_integral  # noqa: F401  (re-exported)
from .solvers import DEFAULT_CONFIG, SolveConfig, fixed_point

ORDERS = ("leading", "first")


def _check(k, kappa, b=None):
    if int(k) != k or k < 2:
        raise DomainError(f"k must be an integer >= 2, got {k}")
    if not (math.isfinite(kappa) and kappa > 0):
        raise DomainError(f"kappa must be positive, got {kappa}")
    if b is not None and not (math.isfinite(b) and b > 0):
        raise DomainError(f"b must be positive, got {b}")


def _check_order(order):
    if order not in ORDERS:
        raise ValueError(f"correction_order must be one of {ORDERS}, got {order!r}")


def _b_sigma_first(B, k, kappa):
    """b * sigma with every term of the expanded integrand kept."""
    L = math.log(k / kappa + 1)
    upper = k + kappa
    return (L - (math.exp(-B * kappa) - math.exp(-B * upper))
            - 0.5 * (math.exp(-2 * B * kappa) - math.exp(-2 * B * upper)))


def _warn_regime(B, what):
    if B < 1:
        warnings.warn(RegimeViolation(f"{what}: B = {B:.6g} < 1, outside the asymptotic regime"),
                      stacklevel=3)


def solve_B(k, kappa, cfg: SolveConfig = DEFAULT_CONFIG, correction_order="leading"):
    """Root of ``B = ln(k / kappa + 1) - exp(-B kappa)``.

    When the leading term is already below 1 the equation may have no
    root; the uncorrected ``ln(k / kappa + 1)`` is then returned.
    """
    _check(k, kappa)
    _check_order(correction_order)
    seed = math.log(k / kappa + 1)
    if correction_order == "leading":
        def step(B):
            return seed - math.exp(-B * kappa)
    else:
        def step(B):
            return _b_sigma_first(B, k, kappa)
    try:
        B = fixed_point(step, seed, cfg)
    except (NoConvergence, OverflowError):
        if seed >= 1:
            raise
        B = None
    if B is None or B <= 0:
        warnings.warn(RegimeViolation(
            f"B equation has no positive root for k={k}, kappa={kappa:g}; "
            f"returning the uncorrected ln(k/kappa + 1) = {seed:.6g}"), stacklevel=2)
        return seed
    _warn_regime(B, "solve_B")
    return B


def sigma_asym(b, kappa, k, cfg: SolveConfig = DEFAULT_CONFIG, correction_order="leading"):
    _check(k, kappa, b)
    B = solve_B(k, kappa, cfg, correction_order)
    if correction_order == "leading":
        return (math.log(k / kappa + 1) - math.exp(-B * kappa)) / b
    return _b_sigma_first(B, k, kappa) / b


def _J(c, k, kappa):
    """Integral of (x - kappa) exp(-c x) over [kappa, k + kappa]."""
    return math.exp(-c * kappa) * (1 / c**2 - math.exp(-c * k) * (k / c + 1 / c**2))


def E_asym(b, kappa, k, cfg: SolveConfig = DEFAULT_CONFIG, correction_order="leading"):
    """Payoff total; the leading order is the simplified form using the B root."""
    _check(k, kappa, b)
    B = solve_B(k, kappa, cfg, correction_order)
    if correction_order == "leading":
        return ((k + kappa + 1) * B - k + kappa * math.exp(-B * kappa)) / b
    L = math.log(k / kappa + 1)
    b_sigma = _b_sigma_first(B, k, kappa)
    b_e1 = k - kappa * L - B * _J(B, k, kappa) - B * _J(2 * B, k, kappa)
    return ((k + 1) * b_sigma - b_e1) / b


def E_asym_unsimplified(b, kappa, k, cfg: SolveConfig = DEFAULT_CONFIG):
    """Payoff total before the B equation is substituted back in."""
    _check(k, kappa, b)
    B = solve_B(k, kappa, cfg)
    L = math.log(k / kappa + 1)
    return ((k + kappa + 1) * (L - math.exp(-B * kappa)) - k + kappa * math.exp(-B * kappa)) / b


@dataclass(frozen=True)
class AsymptoticResult:
    sigma_asym: float
    E_asym: float
    B: float
    sigma_exact: float
    E_exact: float
    residual_vs_exact: dict


def compare_with_exact(b, kappa, k, cfg: SolveConfig = DEFAULT_CONFIG,
                       correction_order="leading") -> AsymptoticResult:
    s_asym = sigma_asym(b, kappa, k, cfg, correction_order)
    e_asym = E_asym(b, kappa, k, cfg, correction_order)
    params = ParastatParams(b=b, kappa=kappa, k=int(k))
    s_exact = solve_sigma(params, cfg)
    e_exact = payoff_exact(s_exact, params)
    B = b * s_exact
    _warn_regime(B, "compare_with_exact")
    return AsymptoticResult(
        sigma_asym=s_asym, E_asym=e_asym, B=B, sigma_exact=s_exact, E_exact=e_exact,
        residual_vs_exact={"sigma": abs(s_exact - s_asym) / abs(s_exact),
                           "E": abs(e_exact - e_asym) / abs(e_exact)})


def small_b_summand(B, kappa):
    """Summand of the small-b form of the sigma sum (times b) as a function of j."""

    def f(x):
        x = np.asarray(x, dtype=float) + kappa
        y = B * x
        return (np.expm1(y) - y) / (np.expm1(y) * x)

    return f
