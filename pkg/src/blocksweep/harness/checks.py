"""Dominance verdicts, linear-rate fitting, and rate-ratio curves."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from ..bounds import BoundTrajectory, normalized_rate
from ..errors import ConformanceError
from .experiments import MeanSquareEstimate

__all__ = [
    "DominanceReport",
    "check_dominance",
    "RateFit",
    "fit_linear_rate",
    "rate_ratio_curves",
]


@dataclass(frozen=True)
class DominanceReport:
    """Per-iterate comparison of an estimated mean against its envelope.

    ``margins[n] = bound[n] + slack * se[n] - mean[n]``; the check passes
    when every margin is nonnegative.
    """

    passed: bool
    margins: np.ndarray
    mean: np.ndarray
    se: np.ndarray
    bound: np.ndarray
    slack: float
    worst_margin: float
    worst_index: int

    def __str__(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return (
            f"dominance {verdict}: {self.margins.size} iterates, slack {self.slack}*SE, "
            f"worst margin {self.worst_margin:.6g} at n={self.worst_index}"
        )


def check_dominance(estimate: MeanSquareEstimate, bound: BoundTrajectory,
                    slack: float = 3.0) -> DominanceReport:
    """Check ``mean_n <= bound_n + slack * se_n`` at every iterate.

    The estimate and the bound must live in the same norm: a weighted bound
    is compared against the weighted means (weights matching to 1e-12), a
    plain-norm bound against the plain means.  Sampling noise is absorbed by
    ``slack`` standard errors; exact estimates carry zero standard error, so
    any slack degenerates to a sharp comparison.
    """
    if bound.bound.size != estimate.mean_weighted.size:
        raise ConformanceError(
            f"bound covers {bound.bound.size - 1} steps, "
            f"estimate covers {estimate.horizon}"
        )
    if bound.weights is None:
        mean, se = estimate.mean_plain, estimate.se_plain
    else:
        if bound.weights.size != estimate.weights.size or not np.allclose(
            bound.weights, estimate.weights, rtol=1e-12, atol=0
        ):
            raise ConformanceError(
                "estimate and bound use different weighted norms; "
                "recompute one of them with matching weights"
            )
        mean, se = estimate.mean_weighted, estimate.se_weighted
    if slack != 0 and not estimate.se_defined:
        raise ConformanceError(
            "standard errors are undefined for a single run; use slack=0 or runs >= 2"
        )
    slack_term = 0.0 if slack == 0 else slack * se
    margins = bound.bound + slack_term - mean
    worst = int(np.argmin(margins))
    return DominanceReport(
        passed=bool(np.all(margins >= 0)),
        margins=margins,
        mean=mean,
        se=np.zeros_like(mean) if estimate.exact else se,
        bound=bound.bound,
        slack=float(slack),
        worst_margin=float(margins[worst]),
        worst_index=worst,
    )


@dataclass(frozen=True)
class RateFit:
    """Least-squares linear rate of a mean-square trajectory over a window."""

    ratio: float
    log_intercept: float
    window: tuple[int, int]
    degenerate: bool = False


def fit_linear_rate(estimate: MeanSquareEstimate, window: tuple[int, int],
                    series: str = "plain") -> RateFit:
    """Fit ``log(mean_n)`` over ``window`` and report the per-iteration ratio.

    ``window`` is a half-open iterate range ``(start, stop)``.  Windows
    containing nonpositive means (exact convergence) are flagged and reported
    as ratio zero rather than fitted.
    """
    start, stop = window
    values = estimate.mean_plain if series == "plain" else estimate.mean_weighted
    if not 0 <= start < stop <= values.size:
        raise ValueError(f"window {window} does not fit a trajectory of {values.size} iterates")
    if stop - start < 2:
        raise ValueError("window must contain at least two iterates")
    segment = values[start:stop]
    if np.any(segment <= 0):
        return RateFit(ratio=0.0, log_intercept=-np.inf, window=(start, stop), degenerate=True)
    slope, intercept = np.polyfit(np.arange(start, stop), np.log(segment), 1)
    return RateFit(ratio=float(np.exp(slope)), log_intercept=float(intercept),
                   window=(start, stop))


def rate_ratio_curves(chi_values: Sequence[float],
                      p_grid: Sequence[float]) -> np.ndarray:
    """Cost-normalized rate ratios ``rate(p)/rate(1)`` on a grid.

    Returns rows ``(chi, p, ratio)`` for every step factor in ``chi_values``
    and every activation probability in ``p_grid``.  Each curve is
    nondecreasing in ``p`` and ends at ratio one for ``p = 1``.
    """
    chis = np.asarray(chi_values, dtype=np.float64).reshape(-1)
    ps = np.asarray(p_grid, dtype=np.float64).reshape(-1)
    if np.any((chis <= 0) | (chis >= 1)):
        raise ValueError("step factors must lie in (0, 1)")
    if np.any((ps <= 0) | (ps > 1)):
        raise ValueError("activation probabilities must lie in (0, 1]")
    rows = np.empty((chis.size * ps.size, 3))
    r = 0
    for chi in chis:
        full = normalized_rate(1.0, float(chi))
        for p in ps:
            rows[r] = (chi, p, normalized_rate(float(p), float(chi)) / full)
            r += 1
    return rows
