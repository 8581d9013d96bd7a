"""Estimators and certified bounds for a configured experiment.

Two estimators of the per-iterate mean squared errors are provided: a Monte
Carlo sampler over independent trajectories and, for small cases, an exact
brute-force expectation that enumerates every activation sequence with its
probability.  Both return the same estimate type so that dominance checking
is uniform.  ``certified_bound`` assembles the matching theoretical envelope
from the family's contraction certificate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..bounds import BoundTrajectory, block_coordinate_bound, plain_norm_bound
from ..engine import InitialBox, _step_blocks, run_trajectory
from ..errors import BlockSweepError, ConformanceError
from .config import ExperimentConfig

__all__ = [
    "MeanSquareEstimate",
    "monte_carlo",
    "exact_expectation",
    "initial_weighted_sq",
    "initial_plain_sq",
    "certified_bound",
]

_MAX_ORACLE_PATHS = 10**6


@dataclass(frozen=True)
class MeanSquareEstimate:
    """Per-iterate mean squared errors with standard errors.

    Entry ``n`` refers to iterate ``n``.  ``exact`` marks brute-force values,
    whose standard errors are identically zero.  For a single Monte Carlo
    run the standard errors are undefined and stored as NaN.
    """

    mean_weighted: np.ndarray
    se_weighted: np.ndarray
    mean_plain: np.ndarray
    se_plain: np.ndarray
    runs: int
    weights: np.ndarray
    exact: bool = False

    def __post_init__(self):
        for name in ("mean_weighted", "se_weighted", "mean_plain", "se_plain", "weights"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def horizon(self) -> int:
        return self.mean_weighted.size - 1

    @property
    def se_defined(self) -> bool:
        return self.exact or self.runs >= 2


def monte_carlo(config: ExperimentConfig) -> MeanSquareEstimate:
    """Sample mean and standard error over independent trajectories.

    Trajectory ``r`` uses the streams keyed by ``(seed, r, purpose)``, so the
    result is a pure function of the configuration.  Moments accumulate via
    Welford updates, a mergeable reduction that keeps the mean of identical
    samples bitwise exact (a deterministic configuration reports exactly
    zero variance instead of cancellation dust).
    """
    n_points = config.horizon + 1
    mean_w = np.zeros(n_points)
    m2_w = np.zeros(n_points)
    mean_p = np.zeros(n_points)
    m2_p = np.zeros(n_points)
    runs = config.runs
    for r in range(runs):
        try:
            traj = run_trajectory(
                config.family, config.law, config.schedules, config.error_model,
                config.x0, config.seed, weights=config.weights, trajectory=r,
            )
        except BlockSweepError as exc:
            exc.args = (f"trajectory {r}: {exc.args[0]}",) + exc.args[1:]
            raise
        delta = traj.weighted_sq_error - mean_w
        mean_w += delta / (r + 1)
        m2_w += delta * (traj.weighted_sq_error - mean_w)
        delta = traj.sq_error - mean_p
        mean_p += delta / (r + 1)
        m2_p += delta * (traj.sq_error - mean_p)

    if runs >= 2:
        se_w = np.sqrt(m2_w / (runs - 1) / runs)
        se_p = np.sqrt(m2_p / (runs - 1) / runs)
    else:
        se_w = np.full(n_points, np.nan)
        se_p = np.full(n_points, np.nan)
    return MeanSquareEstimate(
        mean_weighted=mean_w, se_weighted=se_w,
        mean_plain=mean_p, se_plain=se_p,
        runs=runs, weights=config.weights,
    )


def exact_expectation(config: ExperimentConfig,
                      max_paths: int = _MAX_ORACLE_PATHS) -> MeanSquareEstimate:
    """Exact per-iterate expectations by enumerating all activation sequences.

    Requires a deterministic setup: an explicit initial point and an error
    model that does not consume randomness.  The sweeping law is materialized
    as a table of ``k`` masks, and all ``k**horizon`` activation sequences
    are walked with their exact probabilities (shared prefixes evaluated
    once).  Refuses configurations whose path count exceeds ``max_paths``.
    """
    if not config.error_model.deterministic:
        raise ConformanceError(
            "exact expectations need a deterministic error model (none or fixed)"
        )
    if isinstance(config.x0, InitialBox):
        raise ConformanceError("exact expectations need an explicit initial point")
    masks, probs = config.law.table()
    k = masks.shape[0]
    n_steps = config.horizon
    paths = k**n_steps
    if paths > max_paths:
        raise ValueError(
            f"state space too large: {k}^{n_steps} = {paths} activation sequences "
            f"exceed the cap of {max_paths}"
        )

    family = config.family
    dims = tuple(family.dims)
    omega = config.weights
    xbar = family.fixed_point().blocks
    lam_vals = config.schedules.relaxations()
    alpha_vals = config.schedules.error_budgets()
    active_sets = [np.flatnonzero(row) for row in masks]
    exp_w = np.zeros(n_steps + 1)
    exp_p = np.zeros(n_steps + 1)

    def visit(blocks, depth, prob):
        plain = 0.0
        weighted = 0.0
        for i, b in enumerate(blocks):
            d = b - xbar[i]
            v = float(d @ d)
            plain += v
            weighted += float(omega[i]) * v
        exp_p[depth] += prob * plain
        exp_w[depth] += prob * weighted
        if depth == n_steps:
            return
        error_blocks = config.error_model.draw(
            depth, float(alpha_vals[depth]), dims, None
        )
        lam = float(lam_vals[depth])
        for idx in range(k):
            child = _step_blocks(blocks, family, depth, active_sets[idx], lam, error_blocks)
            visit(child, depth + 1, prob * float(probs[idx]))

    visit(list(config.x0.blocks), 0, 1.0)
    zeros = np.zeros(n_steps + 1)
    return MeanSquareEstimate(
        mean_weighted=exp_w, se_weighted=zeros,
        mean_plain=exp_p, se_plain=zeros.copy(),
        runs=0, weights=omega, exact=True,
    )


def _initial_coordinate_moments(config: ExperimentConfig) -> list[np.ndarray]:
    """Per-coordinate expected squared distance of the initial point to the target."""
    xbar = config.family.fixed_point().blocks
    if isinstance(config.x0, InitialBox):
        out = []
        for lo, hi, xb in zip(config.x0.lower, config.x0.upper, xbar):
            mid = 0.5 * (lo + hi)
            out.append((hi - lo) ** 2 / 12.0 + (mid - xb) ** 2)
        return out
    return [(b - xb) ** 2 for b, xb in zip(config.x0.blocks, xbar)]


def initial_weighted_sq(config: ExperimentConfig) -> float:
    """Expected weighted squared distance of the initial point to the fixed point."""
    moments = _initial_coordinate_moments(config)
    return float(sum(float(w) * float(m.sum()) for w, m in zip(config.weights, moments)))


def initial_plain_sq(config: ExperimentConfig) -> float:
    """Expected plain squared distance of the initial point to the fixed point."""
    moments = _initial_coordinate_moments(config)
    return float(sum(float(m.sum()) for m in moments))


def certified_bound(config: ExperimentConfig, norm: str = "weighted",
                    *, transient: int = 0) -> BoundTrajectory:
    """Theoretical envelope matching the configured experiment.

    ``norm="weighted"`` produces the bound on the weighted mean squared error
    in the configured weights (which must satisfy ``max_i w_i p_i = 1``);
    ``norm="plain"`` produces the plain-norm bound with the marginal-spread
    prefactor.  The initial value is the exact expectation over the
    configured initial point.
    """
    tau = config.family.tau_table(config.horizon)
    p = config.law.marginals()
    if norm == "weighted":
        return block_coordinate_bound(
            tau, p, config.weights, config.schedules,
            initial_weighted_sq(config), transient=transient,
        )
    if norm == "plain":
        return plain_norm_bound(
            tau, p, config.schedules, initial_plain_sq(config), transient=transient,
        )
    raise ValueError(f"unknown norm {norm!r}; use 'weighted' or 'plain'")
