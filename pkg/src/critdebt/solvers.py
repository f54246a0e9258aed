"""Scalar solvers shared by the model modules."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InputError, NoConvergence, NoRoot


@dataclass(frozen=True)
class SolveConfig:
    tol: float = 1e-10
    max_iter: int = 10_000
    damping: float = 1.0

    def __post_init__(self):
        if not self.tol > 0:
            raise InputError(f"tol must be positive, got {self.tol}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise InputError(f"max_iter must be a positive integer, got {self.max_iter}")
        if not 0 < self.damping <= 1:
            raise InputError(f"damping must lie in (0, 1], got {self.damping}")


DEFAULT_CONFIG = SolveConfig()


def fixed_point(func, x0, cfg: SolveConfig = DEFAULT_CONFIG, *, scale=None):
    """Damped iteration ``x <- (1 - w) x + w func(x)``.

    Stops when successive iterates differ by at most ``tol * scale(x)``;
    ``scale`` defaults to ``max(1, |x|)``.
    """
    if scale is None:
        scale = lambda x: max(1.0, abs(x))  # noqa: E731
    w = cfg.damping
    x = x0
    for _ in range(cfg.max_iter):
        new = (1 - w) * x + w * func(x)
        if not math.isfinite(new):
            raise NoConvergence(f"fixed-point iterate became non-finite ({new})",
                                max_iter=cfg.max_iter, last=x)
        if abs(new - x) <= cfg.tol * scale(new):
            return new
        x = new
    raise NoConvergence(f"fixed-point iteration did not converge in {cfg.max_iter} steps",
                        max_iter=cfg.max_iter, last=x)


def bisect(func, lo, hi, tol=1e-12, max_iter=400):
    """Root of ``func`` on ``[lo, hi]``; the endpoints must bracket a sign change."""
    flo, fhi = func(lo), func(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise NoRoot(f"no sign change on [{lo}, {hi}]")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol * max(1.0, abs(mid)) or mid in (lo, hi):
            return mid
        fmid = func(mid)
        if fmid == 0:
            return mid
        if (fmid > 0) == (flo > 0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)
