"""CSV emission and parsing for every report the harness produces.

Floats are written with ``repr``, the shortest representation that parses
back to the identical double, so numeric columns round-trip exactly.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from ..bounds import BoundTrajectory
from ..engine import Trajectory
from .checks import DominanceReport, RateFit
from .experiments import MeanSquareEstimate

__all__ = [
    "write_columns",
    "read_columns",
    "write_trajectory",
    "write_estimate",
    "write_bound",
    "write_check",
    "write_rate_curves",
    "write_ratefit",
]


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def write_columns(path: str | Path, header: list[str], columns: list) -> Path:
    """Write named columns of equal length; returns the path."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows = zip(*columns)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    return path


def read_columns(path: str | Path, text_columns: tuple[str, ...] = ()) -> dict[str, np.ndarray | list[str]]:
    """Read a CSV written by this module back into named columns."""
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        raw: list[list[str]] = [[] for _ in header]
        for row in reader:
            for col, value in zip(raw, row):
                col.append(value)
    out: dict[str, np.ndarray | list[str]] = {}
    for name, col in zip(header, raw):
        if name in text_columns:
            out[name] = col
        else:
            out[name] = np.array([float(v) for v in col])
    return out


def write_trajectory(path: str | Path, traj: Trajectory) -> Path:
    """Schema: n, sq_error, weighted_sq_error, mask.

    Row ``n`` holds iterate ``n``; its mask column is the activation drawn at
    iteration ``n`` (used to produce iterate ``n + 1``), empty on the last row.
    """
    n = np.arange(traj.sq_error.size)
    masks = ["".join("1" if b else "0" for b in row) for row in traj.masks] + [""]
    return write_columns(
        path,
        ["n", "sq_error", "weighted_sq_error", "mask"],
        [n, traj.sq_error, traj.weighted_sq_error, masks],
    )


def write_estimate(path: str | Path, est: MeanSquareEstimate) -> Path:
    """Schema: n, mean_weighted_sq_error, se_weighted_sq_error, mean_sq_error, se_sq_error."""
    n = np.arange(est.mean_weighted.size)
    return write_columns(
        path,
        ["n", "mean_weighted_sq_error", "se_weighted_sq_error",
         "mean_sq_error", "se_sq_error"],
        [n, est.mean_weighted, est.se_weighted, est.mean_plain, est.se_plain],
    )


def write_bound(path: str | Path, bt: BoundTrajectory) -> Path:
    """Schema: n, chi_n, eta_bar_n, vartheta_bar_n, bound.

    Row ``n`` describes iterate ``n``: the step factor and accumulated terms
    shown are those of the step that produced it (row zero shows the empty
    product 1 and zero accumulators next to the initial bound).
    """
    size = bt.bound.size
    n = np.arange(size)
    chi = np.concatenate(([1.0], bt.chi))
    eta = np.concatenate(([0.0], bt.eta_bar))
    vartheta = np.concatenate(([0.0], bt.vartheta_bar))
    return write_columns(
        path,
        ["n", "chi_n", "eta_bar_n", "vartheta_bar_n", "bound"],
        [n, chi, eta, vartheta, bt.bound],
    )


def write_check(path: str | Path, report: DominanceReport) -> Path:
    """Schema: n, mean, se, bound, margin, ok."""
    n = np.arange(report.margins.size)
    ok = [int(v) for v in (report.margins >= 0)]
    return write_columns(
        path,
        ["n", "mean", "se", "bound", "margin", "ok"],
        [n, report.mean, report.se, report.bound, report.margins, ok],
    )


def write_rate_curves(path: str | Path, rows: np.ndarray) -> Path:
    """Schema: chi, p, ratio."""
    return write_columns(path, ["chi", "p", "ratio"], [rows[:, 0], rows[:, 1], rows[:, 2]])


def write_ratefit(path: str | Path, est: MeanSquareEstimate, fit: RateFit,
                  series: str = "plain") -> Path:
    """Schema: n, mean, fitted (fitted column empty outside the window)."""
    values = est.mean_plain if series == "plain" else est.mean_weighted
    n = np.arange(values.size)
    fitted = []
    start, stop = fit.window
    for k in n:
        if start <= k < stop and not fit.degenerate:
            fitted.append(repr(float(np.exp(fit.log_intercept) * fit.ratio**k)))
        else:
            fitted.append("")
    return write_columns(path, ["n", "mean", "fitted"], [n, values, fitted])
