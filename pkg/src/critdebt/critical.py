"""Critical debt for d = 2: entropy maximum, zero chemical potential, diagnostics.

Two routes lead to the critical total ``sigma0``:

* entropy maximum: ``sigma0 = V (ln k - 1/k)``;
* chemical potential kappa = 0: ``sigma0 = V * integral_1^k (1 - B0 x e^{-B0 x}) dx / x``
  solved self-consistently for ``B0 = sigma0 / V``.

They differ by O(1/k^2) in units of V, which ``coincidence_gap`` measures.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DomainError,
    EmptyTrajectory,
    NonPositiveVelocity,
    RegimeViolation,
    SmallK,
)
from .quadrature import euler_maclaurin_integral
from .solvers import DEFAULT_CONFIG, SolveConfig, fixed_point

K_CONST = 2.0 * math.sqrt(6.0)
SMALL_K = 10


class Verdict(str, enum.Enum):
    SOLVENT = "Solvent"
    INDETERMINATE = "Indeterminate"
    BANKRUPT = "Bankrupt"


def _check_k(k, minimum=2):
    if int(k) != k or k < minimum:
        raise DomainError(f"k must be an integer >= {minimum}, got {k}")
    if k < SMALL_K:
        warnings.warn(SmallK(f"k = {k} < {SMALL_K}; large-k critical formulas are unreliable"),
                      stacklevel=3)


def _check_V(V):
    if not (math.isfinite(V) and V > 0):
        raise DomainError(f"velocity V must be positive, got {V}")


def entropy(V, k, B, kappa):
    """``2 sqrt(6) [-k + k B^2 e^{-B} - e^{-B kappa} B^2 kappa^2]``.

    V does not enter the closed form; it is validated for consistency with
    the derivative it came from.
    """
    _check_V(V)
    if int(k) != k or k < 2:
        raise DomainError(f"k must be an integer >= 2, got {k}")
    if not kappa >= 0:
        raise DomainError(f"kappa must be non-negative, got {kappa}")
    if B < 1:
        warnings.warn(RegimeViolation(f"entropy: B = {B:.6g} < 1"), stacklevel=2)
    return K_CONST * (-k + k * B * B * math.exp(-B) - math.exp(-B * kappa) * B * B * kappa * kappa)


def kappa_tied(B, k):
    """kappa(B) with d kappa / dB = -kappa, normalized to 1 at B = ln k."""
    return k * np.exp(-np.asarray(B, dtype=float))


def entropy_argmax(k, step=1e-3, B_min=1.0, B_max=None):
    """Grid argmax of the entropy over B with kappa tied to B."""
    if B_max is None:
        B_max = 2.0 * math.log(k)
    grid = np.arange(B_min, B_max + 0.5 * step, step)
    kap = kappa_tied(grid, k)
    S = K_CONST * (-k + k * grid**2 * np.exp(-grid) - np.exp(-grid * kap) * grid**2 * kap**2)
    return float(grid[int(np.argmax(S))])


def leading_order(k, V):
    """``V ln k``, the leading term of the entropy-maximum value."""
    _check_V(V)
    return V * math.log(k)


def critical_sigma_entropy(k, V):
    _check_k(k)
    _check_V(V)
    return V * (math.log(k) - 1.0 / k)


def chempot_integral(B0, k):
    """``integral_1^k (1 - B0 x e^{-B0 x}) dx / x``."""
    return euler_maclaurin_integral(lambda x: (1.0 - B0 * x * np.exp(-B0 * x)) / x, 1.0, float(k))


def critical_sigma_chempot(k, V, cfg: SolveConfig = DEFAULT_CONFIG):
    _check_k(k)
    _check_V(V)
    B0 = fixed_point(lambda B: chempot_integral(B, k), math.log(k), cfg)
    return V * B0


def critical_from_aggregates(E, sigma, k):
    """``V = (E - k sigma) / k`` and ``sigma0 = V ln k``."""
    if int(k) != k or k < 2:
        raise DomainError(f"k must be an integer >= 2, got {k}")
    V = (E - k * sigma) / k
    if not V > 0:
        raise NonPositiveVelocity(
            f"E - k*sigma = {E - k * sigma:.6g} <= 0 (E={E:g}, sigma={sigma:g}, k={k}); "
            "velocity of money circulation would be non-positive")
    return V, V * math.log(k)


def solvency_verdict(sigma, sigma0, rtol=0.01) -> Verdict:
    if not sigma0 > 0:
        raise DomainError(f"sigma0 must be positive, got {sigma0}")
    if rtol < 0:
        raise DomainError(f"rtol must be non-negative, got {rtol}")
    if sigma > sigma0 * (1 + rtol):
        return Verdict.BANKRUPT
    if sigma < sigma0 * (1 - rtol):
        return Verdict.SOLVENT
    return Verdict.INDETERMINATE


@dataclass
class CriticalReport:
    k: int
    V: float
    sigma0_entropy: float
    sigma0_chempot: float
    coincidence_gap: float
    K_const: float = K_CONST
    verdict: Verdict | None = None

    @property
    def sigma0_leading(self):
        return self.V * math.log(self.k)


def critical_report(k, V, sigma=None, rtol=0.01, cfg: SolveConfig = DEFAULT_CONFIG) -> CriticalReport:
    """Both critical values at (k, V); the verdict uses the entropy-maximum value."""
    s_ent = critical_sigma_entropy(k, V)
    s_chem = critical_sigma_chempot(k, V, cfg)
    verdict = None if sigma is None else solvency_verdict(sigma, s_ent, rtol)
    return CriticalReport(k=int(k), V=V, sigma0_entropy=s_ent, sigma0_chempot=s_chem,
                          coincidence_gap=abs(s_ent - s_chem) / V, verdict=verdict)


@dataclass(frozen=True)
class CriticalPointState:
    k0: int
    V0: float
    sigma0: float
    kappa0: float = 0.0

    def residual(self):
        """``|ln k0 - sigma0 / V0|``, or None when V0 = 0."""
        if self.V0 <= 0:
            return None
        return abs(math.log(self.k0) - self.sigma0 / self.V0)


@dataclass
class Diagnostics:
    residuals: list
    approaching: bool
    critical_candidate: bool
    critical_reached: bool
    window: int
    flags: list = field(default_factory=list)


def _strictly_decreasing(values):
    return all(b < a for a, b in zip(values, values[1:]))


def critical_point_diagnostics(trajectory, window=3, residual_tol=1e-3, kappa_tol=1e-6,
                               velocity_tol=1e-6) -> Diagnostics:
    """Scan (sigma, V, k, kappa) states for the approach to the critical point.

    ``approaching`` is set when kappa, V and 1/ln k all decrease strictly over
    the last ``window`` states. The final state is a critical candidate when
    kappa ~ 0 and the ln k = sigma / V residual is small, and counts as
    reached when V ~ 0 as well.
    """
    states = list(trajectory)
    if not states:
        raise EmptyTrajectory("trajectory is empty")
    if window < 3:
        raise DomainError(f"window must be at least 3, got {window}")
    residuals = []
    for sigma, V, k, kappa in states:
        residuals.append(abs(math.log(k) - sigma / V) if V > 0 else None)

    flags = []
    for end in range(window, len(states) + 1):
        tail = states[end - window:end]
        kap = [s[3] for s in tail]
        vel = [s[1] for s in tail]
        inv_log = [1.0 / math.log(s[2]) if s[2] > 1 else math.inf for s in tail]
        hit = _strictly_decreasing(kap) and _strictly_decreasing(vel) and _strictly_decreasing(inv_log)
        flags.append(hit)
    approaching = bool(flags and flags[-1])

    sigma, V, k, kappa = states[-1]
    res = residuals[-1]
    kappa_zero = abs(kappa) <= kappa_tol
    candidate = kappa_zero and (res is None or res <= residual_tol)
    reached = kappa_zero and abs(V) <= velocity_tol
    return Diagnostics(residuals=residuals, approaching=approaching, critical_candidate=candidate,
                       critical_reached=reached, window=window, flags=flags)
