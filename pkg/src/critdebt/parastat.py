"""Exact parastatistic sums for d = 2 and their inversion.

The occupation bracket for slot j is

    n_j(sigma) = 1 / (exp(b (j + kappa)) - 1) - sigma / (exp(b sigma (j + kappa)) - 1)

and the model requires ``sigma = sum_j n_j(sigma)`` together with
``E1 = sum_j j n_j(sigma)``. Sums run over ascending j and are accumulated
with ``math.fsum``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DomainError,
    FrozenSystem,
    InfeasibleAggregates,
    NoConvergence,
    NoRoot,
    NumericalOverflow,
)
from .solvers import DEFAULT_CONFIG, SolveConfig, bisect

EXP_CUTOFF = 700.0
FIT_BOX = (1e-12, 1e3)


@dataclass(frozen=True)
class ParastatParams:
    b: float
    kappa: float
    k: int
    sigma: float | None = None
    residuals: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        if not (math.isfinite(self.b) and self.b > 0):
            raise DomainError(f"b must be positive, got {self.b}")
        if not (math.isfinite(self.kappa) and self.kappa >= 0):
            raise DomainError(f"kappa must be non-negative, got {self.kappa}")
        if int(self.k) != self.k or self.k < 1:
            raise DomainError(f"k must be a positive integer, got {self.k}")

    @property
    def B(self):
        return None if self.sigma is None else self.b * self.sigma

    @property
    def V(self):
        return 1.0 / self.b


def _bose(y):
    """1 / (e^y - 1) for y > 0, zero beyond the overflow cutoff."""
    safe = np.minimum(y, EXP_CUTOFF)
    return np.where(y > EXP_CUTOFF, 0.0, 1.0 / np.expm1(safe))


def occupations(sigma, b, kappa, k):
    """Vector of brackets n_j(sigma) for j = 1..k."""
    x = np.arange(1, k + 1, dtype=float) + kappa
    y1 = b * x
    y2 = b * sigma * x
    tiny = y2 < 1e-300
    # sigma / (e^{b sigma x} - 1) -> 1 / (b x) as sigma -> 0
    second = np.where(tiny, 1.0 / y1, sigma * _bose(np.where(tiny, 1.0, y2)))
    return _bose(y1) - second


def _checked_sum(values, what):
    total = math.fsum(values)
    if not math.isfinite(total):
        raise NumericalOverflow(f"{what} is not finite ({total})")
    return total


def _validate(sigma, params):
    if not (math.isfinite(sigma) and sigma > 0):
        raise DomainError(f"sigma must be positive, got {sigma}")
    if params.b * (1 + params.kappa) <= 0:
        raise DomainError("b (1 + kappa) must be positive")


def sigma_rhs(sigma, params: ParastatParams) -> float:
    _validate(sigma, params)
    return _checked_sum(occupations(sigma, params.b, params.kappa, params.k), "sigma sum")


def e1_exact(sigma, params: ParastatParams) -> float:
    _validate(sigma, params)
    j = np.arange(1, params.k + 1, dtype=float)
    return _checked_sum(j * occupations(sigma, params.b, params.kappa, params.k), "E1 sum")


def payoff_exact(sigma, params: ParastatParams) -> float:
    """E = (k + 1) sigma - E1."""
    return (params.k + 1) * sigma - e1_exact(sigma, params)


def bose_sum(params: ParastatParams) -> float:
    x = np.arange(1, params.k + 1, dtype=float) + params.kappa
    return _checked_sum(_bose(params.b * x), "Bose sum")


def _bracket_root(g, seed, cfg):
    """Largest sign change of g below 10 * seed, then bisection.

    Any positive fixed point exceeds 1 (the sum is negative for sigma < 1),
    so the scan stops there.
    """
    hi = 10.0 * seed
    lo_limit = max(cfg.tol, 1.0)
    if hi <= lo_limit:
        raise NoRoot("no bracket above sigma = 1")
    grid = np.geomspace(hi, lo_limit, 400)
    prev = hi
    for s in grid[1:]:
        if g(s) < 0:
            return bisect(g, s, prev, tol=min(cfg.tol, 1e-13))
        prev = s
    raise NoRoot(f"sigma - rhs(sigma) has no sign change on [{lo_limit:g}, {hi:g}]")


def solve_sigma(params: ParastatParams, cfg: SolveConfig = DEFAULT_CONFIG) -> float:
    """Fixed point of the sigma equation on the large-B branch.

    Damped iteration from the pure Bose sum; falls back to bisection when the
    iterate leaves sigma > 1 or stops contracting.
    """
    return solve_weighted(params, None, cfg)


def solve_weighted(params: ParastatParams, weights, cfg: SolveConfig = DEFAULT_CONFIG) -> float:
    """``solve_sigma`` for ``sigma = sum_j w_j n_j(sigma)``; ``weights=None`` means w_j = 1."""
    x = np.arange(1, params.k + 1, dtype=float) + params.kappa
    w_j = np.ones(params.k) if weights is None else np.asarray(weights, dtype=float)
    seed = _checked_sum(w_j * _bose(params.b * x), "Bose sum")
    if seed <= cfg.tol:
        warnings.warn(FrozenSystem(
            f"Bose occupation {seed:.3g} is below tol={cfg.tol:g}; sigma is numerically zero "
            f"(b={params.b:g}, kappa={params.kappa:g}, k={params.k})"), stacklevel=3)
        return seed
    if seed <= 1.0:
        raise NoRoot(f"Bose occupation {seed:.6g} <= 1 admits no fixed point "
                     f"(b={params.b:g}, kappa={params.kappa:g}, k={params.k})")

    def rhs(s):
        return _checked_sum(w_j * occupations(s, params.b, params.kappa, params.k), "sigma sum")

    def g(s):
        return s - rhs(s)

    damping = cfg.damping
    sigma = seed
    prev_step = math.inf
    stalled = 0
    for _ in range(cfg.max_iter):
        new = (1 - damping) * sigma + damping * rhs(sigma)
        if not math.isfinite(new) or new <= 1.0:
            return _bracket_root(g, seed, cfg)
        step = abs(new - sigma)
        if step <= cfg.tol * max(1.0, new):
            return new
        stalled = stalled + 1 if step >= prev_step else 0
        if stalled >= 20:
            return _bracket_root(g, seed, cfg)
        prev_step = step
        sigma = new
    raise NoConvergence(f"sigma iteration did not converge in {cfg.max_iter} steps",
                        max_iter=cfg.max_iter, last=sigma)


def _fit_residuals(u, sigma_obs, E_obs, k):
    b, kappa = math.exp(u[0]), math.exp(u[1])
    n = occupations(sigma_obs, b, kappa, k)
    j = np.arange(1, k + 1, dtype=float)
    r_sigma = (sigma_obs - math.fsum(n)) / sigma_obs
    r_E = (E_obs - (k + 1) * sigma_obs + math.fsum(j * n)) / E_obs
    return np.array([r_sigma, r_E])


def _newton_2d(u, sigma_obs, E_obs, k, box, max_iter):
    lo, hi = np.log(box[0]), np.log(box[1])
    F = _fit_residuals(u, sigma_obs, E_obs, k)
    norm = np.max(np.abs(F))
    h = 1e-6
    for _ in range(max_iter):
        if norm <= 1e-14:
            break
        J = np.empty((2, 2))
        for i in range(2):
            e = np.zeros(2)
            e[i] = h
            J[:, i] = (_fit_residuals(u + e, sigma_obs, E_obs, k)
                       - _fit_residuals(u - e, sigma_obs, E_obs, k)) / (2 * h)
        try:
            delta = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            delta = np.linalg.lstsq(J, -F, rcond=None)[0]
        # cap log-space steps at a factor of e^2
        delta = np.clip(delta, -2.0, 2.0)
        lam = 1.0
        for _ in range(40):
            trial = np.clip(u + lam * delta, lo, hi)
            F_trial = _fit_residuals(trial, sigma_obs, E_obs, k)
            norm_trial = np.max(np.abs(F_trial))
            if np.isfinite(norm_trial) and norm_trial < norm:
                break
            lam *= 0.5
        else:
            break
        step = np.max(np.abs(trial - u))
        u, F, norm = trial, F_trial, norm_trial
        if step < 1e-15:
            break
    return u, norm


def fit_params(sigma_obs, E_obs, k, cfg: SolveConfig = DEFAULT_CONFIG,
               box=FIT_BOX) -> ParastatParams:
    """Find (b, kappa) reproducing the observed sigma and E for k slots.

    Newton iteration on (log b, log kappa) with a central-difference
    Jacobian, seeded from the asymptotic relation ``B = ln(k / kappa + 1) -
    exp(-B kappa)`` at kappa = 1. A few alternative kappa seeds are tried
    before giving up.
    """
    from .asymptotics import solve_B

    if not (math.isfinite(sigma_obs) and sigma_obs > 0):
        raise DomainError(f"sigma_obs must be positive, got {sigma_obs}")
    if not (math.isfinite(E_obs) and E_obs > 0):
        raise DomainError(f"E_obs must be positive, got {E_obs}")
    if int(k) != k or k < 2:
        raise DomainError(f"k must be an integer >= 2, got {k}")
    k = int(k)
    if E_obs <= sigma_obs:
        raise InfeasibleAggregates(
            f"E ({E_obs:g}) must exceed sigma ({sigma_obs:g}); durations force E > sigma")

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        B0 = solve_B(k, 1.0, cfg)
    max_newton = min(cfg.max_iter, 200)
    best = None
    for kappa0 in (1.0, 0.1, 10.0, 0.01, 100.0):
        b0 = min(max(B0 / sigma_obs, box[0]), box[1])
        u0 = np.array([math.log(b0), math.log(kappa0)])
        u, norm = _newton_2d(u0, sigma_obs, E_obs, k, box, max_newton)
        if best is None or norm < best[1]:
            best = (u, norm)
        if norm <= 1e-12:
            break
    u, norm = best
    b, kappa = math.exp(u[0]), math.exp(u[1])
    if not norm <= 1e-3:
        raise InfeasibleAggregates(
            f"no (b, kappa) in [{box[0]:g}, {box[1]:g}]^2 reproduces sigma={sigma_obs:g}, "
            f"E={E_obs:g}, k={k} (best relative residual {norm:.3g})")
    if norm > 1e-8:
        raise NoConvergence(f"parameter fit stalled at relative residual {norm:.3g}",
                            max_iter=max_newton, last=(b, kappa))

    params = ParastatParams(b=b, kappa=kappa, k=k)
    sigma_model = solve_sigma(params, cfg)
    if not math.isclose(sigma_model, sigma_obs, rel_tol=1e-8):
        raise InfeasibleAggregates(
            f"fitted (b={b:g}, kappa={kappa:g}) reproduces sigma={sigma_obs:g} only on the "
            f"unstable small-B branch; the stable fixed point is {sigma_model:g}")
    residuals = tuple(float(r) for r in _fit_residuals(u, sigma_obs, E_obs, k))
    return ParastatParams(b=b, kappa=kappa, k=k, sigma=sigma_obs, residuals=residuals)
