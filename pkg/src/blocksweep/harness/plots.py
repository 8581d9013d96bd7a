"""Figure rendering for the report paths, one figure next to each CSV.

Figures are a convenience layer over the CSV output; nothing downstream
depends on them.  Matplotlib is imported lazily with the Agg backend so
library use never touches a display.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np


def _plt():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _finish(fig, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path)
    _plt().close(fig)
    return path


def save_estimate_plot(path, estimate, bound=None) -> Path:
    plt = _plt()
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    n = np.arange(estimate.mean_weighted.size)
    ax.semilogy(n, np.maximum(estimate.mean_weighted, 1e-300), label="mean weighted sq error")
    ax.semilogy(n, np.maximum(estimate.mean_plain, 1e-300), "--", label="mean sq error")
    if bound is not None:
        ax.semilogy(n, np.maximum(bound.bound, 1e-300), color="k", label="certified bound")
    ax.set_xlabel("iteration")
    ax.set_ylabel("mean squared error")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    return _finish(fig, path)


def save_bound_plot(path, bound) -> Path:
    plt = _plt()
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    n = np.arange(bound.bound.size)
    ax.semilogy(n, np.maximum(bound.bound, 1e-300), color="k", label="bound")
    ax.semilogy(n[1:], np.maximum(bound.eta_bar, 1e-300), ":", label="accumulated forcing")
    ax.set_xlabel("iteration")
    ax.set_ylabel("bound")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    return _finish(fig, path)


def save_check_plot(path, report) -> Path:
    plt = _plt()
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    n = np.arange(report.mean.size)
    ax.semilogy(n, np.maximum(report.mean, 1e-300), label="estimated mean")
    upper = report.mean + report.slack * np.nan_to_num(report.se)
    ax.fill_between(n, np.maximum(report.mean, 1e-300), np.maximum(upper, 1e-300),
                    alpha=0.25, label=f"+{report.slack:g} SE")
    ax.semilogy(n, np.maximum(report.bound, 1e-300), color="k", label="certified bound")
    ax.set_xlabel("iteration")
    ax.set_ylabel("mean squared error")
    ax.set_title(str(report))
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    return _finish(fig, path)


def save_rate_curves_plot(path, rows: np.ndarray) -> Path:
    plt = _plt()
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for chi in np.unique(rows[:, 0]):
        sel = rows[rows[:, 0] == chi]
        order = np.argsort(sel[:, 1])
        ax.plot(sel[order, 1], sel[order, 2], label=f"chi = {chi:g}")
    ax.set_xlabel("activation probability p")
    ax.set_ylabel("rate(p) / rate(1)")
    ax.set_ylim(0.0, 1.05)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    return _finish(fig, path)


def save_ratefit_plot(path, estimate, fit, series: str = "plain") -> Path:
    plt = _plt()
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    values = estimate.mean_plain if series == "plain" else estimate.mean_weighted
    n = np.arange(values.size)
    ax.semilogy(n, np.maximum(values, 1e-300), label="estimated mean")
    if not fit.degenerate:
        start, stop = fit.window
        k = np.arange(start, stop)
        ax.semilogy(k, np.exp(fit.log_intercept) * fit.ratio**k, "--",
                    label=f"fit ratio {fit.ratio:.4f}")
    ax.set_xlabel("iteration")
    ax.set_ylabel("mean squared error")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    return _finish(fig, path)
