"""Static figures written next to the reports (Agg backend, no display)."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .critical import K_CONST, kappa_tied  # noqa: E402


def _save(fig, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_slots(portfolio, path, title=None):
    """Normalized debt per reverse-duration slot."""
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.bar(portfolio.reverse_durations, portfolio.slots, width=0.8, color="tab:blue")
    ax.set_xlabel("reverse duration r")
    ax.set_ylabel("normalized debt")
    ax.set_title(title or f"k = {portfolio.k}, sigma = {portfolio.sigma:.4g}")
    return _save(fig, path)


def plot_critical(k, sigma, values: dict, path):
    """Observed sigma against the critical values from each method."""
    names = list(values)
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.barh(names, [values[n] for n in names], color="tab:gray")
    ax.axvline(sigma, color="tab:red", label=f"sigma = {sigma:.4g}")
    ax.set_xlabel("total normalized debt")
    ax.set_title(f"critical debt, k = {k}")
    ax.legend(loc="lower right")
    return _save(fig, path)


def plot_entropy(k, path, B_max=None, step=1e-3):
    """Entropy along B with kappa tied to B; marks ln k - 1/k."""
    B_max = B_max or 2.0 * math.log(k)
    B = np.arange(1.0, B_max, step)
    kap = kappa_tied(B, k)
    S = K_CONST * (-k + k * B**2 * np.exp(-B) - np.exp(-B * kap) * B**2 * kap**2)
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.plot(B, S, color="tab:blue")
    ax.axvline(math.log(k) - 1.0 / k, color="tab:red", ls="--", label="ln k - 1/k")
    ax.set_xlabel("B")
    ax.set_ylabel("entropy")
    ax.set_title(f"k = {k}")
    ax.legend()
    return _save(fig, path)


def plot_alpha_sweep(rows, path):
    """sigma0 and V against alpha on twin axes."""
    alpha = [r["alpha"] for r in rows]
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.plot(alpha, [r["sigma0"] for r in rows], "o-", color="tab:blue", label="sigma0")
    ax.set_xlabel("alpha")
    ax.set_ylabel("sigma0", color="tab:blue")
    ax2 = ax.twinx()
    ax2.plot(alpha, [r["V"] for r in rows], "s--", color="tab:orange", label="V")
    ax2.set_ylabel("V", color="tab:orange")
    return _save(fig, path)


def plot_mix(p, approx, path, exact_sigma0=None):
    """Short-dominant sigma0 with the neglected-ratio band."""
    fig, ax = plt.subplots(figsize=(6, 3.5))
    lo = approx.sigma0 * (1 - approx.validity)
    hi = approx.sigma0 * (1 + approx.validity)
    ax.bar(["short-dominant"], [approx.sigma0], yerr=[[approx.sigma0 - lo], [hi - approx.sigma0]],
           color="tab:green", capsize=6)
    if exact_sigma0 is not None:
        ax.bar(["aggregate"], [exact_sigma0], color="tab:gray")
    ax.set_ylabel("sigma0")
    ax.set_title(f"m = {p.m}, n = {p.n}, L2/L1 = {p.ratio:g}")
    return _save(fig, path)
