"""Randomly swept, stochastically perturbed block-coordinate iteration.

One step updates only the blocks selected by the activation mask:

    x_{i,n+1} = x_{i,n} + eps_{i,n} * lam_n * (T_{i,n}(x_n) + a_{i,n} - x_{i,n})

where ``eps_n`` is the mask, ``lam_n`` the relaxation, and ``a_n`` an injected
perturbation whose squared norm never exceeds the budget ``alpha_n``.  All
block evaluations within a step read the pre-step iterate.  A trajectory is a
pure function of (problem, schedules, law, error model, master seed,
trajectory id): activation draws, perturbation draws, and initial-point draws
come from three dedicated streams, so activation randomness is independent of
everything iterate-dependent by construction.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .blockspace import BlockVector, WeightVector
from .errors import ConformanceError, ScheduleViolationError
from .operators import OperatorFamily
from .rng import ERROR_STREAM, INIT_STREAM, SWEEP_STREAM, stream
from .schedules import Schedules
from .sweeping import ActivationMask, SweepingLaw

__all__ = [
    "ErrorModel",
    "NoError",
    "BallError",
    "FixedVectorError",
    "InitialBox",
    "Trajectory",
    "step",
    "run_trajectory",
]


class ErrorModel(ABC):
    """Per-iteration perturbation with a certified second-moment budget.

    ``draw`` returns one perturbation block per block of the space (or None
    for no perturbation); its squared norm is at most the budget for that
    iteration, almost surely, which is stronger than the required conditional
    second-moment bound.
    """

    @abstractmethod
    def draw(self, n: int, budget: float, dims: Sequence[int],
             rng: np.random.Generator | None) -> list[np.ndarray] | None:
        ...

    #: whether draw consumes randomness (False enables exact enumeration)
    deterministic: bool = False


class NoError(ErrorModel):
    deterministic = True

    def draw(self, n, budget, dims, rng):
        return None


def _cap_norm(blocks: list[np.ndarray], budget: float) -> list[np.ndarray]:
    # guards the almost-sure budget against last-ulp rounding
    total = sum(float(b @ b) for b in blocks)
    if total > budget > 0:
        scale = np.sqrt(budget / total)
        blocks = [scale * b for b in blocks]
    return blocks


class BallError(ErrorModel):
    """Perturbation drawn uniformly from the ball of radius sqrt(budget)."""

    deterministic = False

    def draw(self, n, budget, dims, rng):
        total = sum(dims)
        g = rng.standard_normal(total)
        norm = float(np.linalg.norm(g))
        while norm == 0.0:
            g = rng.standard_normal(total)
            norm = float(np.linalg.norm(g))
        radius = np.sqrt(budget) * rng.random() ** (1.0 / total)
        flat = (radius / norm) * g
        blocks = []
        start = 0
        for d in dims:
            blocks.append(flat[start:start + d])
            start += d
        return _cap_norm(blocks, budget)


class FixedVectorError(ErrorModel):
    """Deterministic perturbation along a fixed direction, scaled to the budget."""

    deterministic = True

    def __init__(self, direction: BlockVector):
        norm = direction.norm()
        if norm == 0.0:
            raise ValueError("direction must be nonzero")
        self._unit = [b / norm for b in direction.blocks]
        self._dims = direction.dims

    def draw(self, n, budget, dims, rng):
        if tuple(dims) != self._dims:
            raise ConformanceError(
                f"error direction has dims {self._dims}, expected {tuple(dims)}"
            )
        r = np.sqrt(budget)
        return _cap_norm([r * b for b in self._unit], budget)


@dataclass(frozen=True)
class InitialBox:
    """Uniform box for drawing the initial point, one interval per coordinate."""

    lower: tuple[np.ndarray, ...]
    upper: tuple[np.ndarray, ...]

    @classmethod
    def broadcast(cls, dims: Sequence[int], lower, upper) -> "InitialBox":
        """Build from scalars or per-block arrays, broadcast over ``dims``."""
        los, his = [], []
        for i, d in enumerate(dims):
            lo = lower[i] if isinstance(lower, (list, tuple)) else lower
            hi = upper[i] if isinstance(upper, (list, tuple)) else upper
            lo = np.broadcast_to(np.asarray(lo, dtype=np.float64), (d,)).copy()
            hi = np.broadcast_to(np.asarray(hi, dtype=np.float64), (d,)).copy()
            if np.any(lo > hi):
                raise ValueError("box lower bounds must not exceed upper bounds")
            los.append(lo)
            his.append(hi)
        return cls(tuple(los), tuple(his))

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(b.size for b in self.lower)

    def draw(self, rng: np.random.Generator) -> list[np.ndarray]:
        return [lo + (hi - lo) * rng.random(lo.size)
                for lo, hi in zip(self.lower, self.upper)]


@dataclass(frozen=True)
class Trajectory:
    """Recorded run: squared errors per iterate and the masks that produced them.

    Entry ``n`` of the error arrays refers to iterate ``x_n`` (entry 0 is the
    initial point).  ``masks[n]`` is the activation drawn at iteration ``n``,
    the one used to produce iterate ``n + 1``.
    """

    sq_error: np.ndarray
    weighted_sq_error: np.ndarray
    masks: np.ndarray
    weights: np.ndarray
    iterates: tuple[BlockVector, ...] | None = None

    @property
    def horizon(self) -> int:
        return self.masks.shape[0]


def _step_blocks(blocks: Sequence[np.ndarray], family: OperatorFamily, n: int,
                 active: np.ndarray, lam: float,
                 error_blocks: Sequence[np.ndarray] | None) -> list[np.ndarray]:
    out = list(blocks)
    images = family.apply_blocks(n, blocks, active)
    for target, i in zip(images, active):
        i = int(i)
        if error_blocks is not None:
            target = target + error_blocks[i]
        out[i] = blocks[i] + lam * (target - blocks[i])
    return out


def step(x: BlockVector, family: OperatorFamily, n: int, mask: ActivationMask,
         relaxation: float, error: BlockVector | None = None) -> BlockVector:
    """One masked relaxed update; inactive blocks pass through unchanged."""
    if not 0.0 < relaxation <= 1.0:
        raise ScheduleViolationError(
            f"relaxation {relaxation!r} is outside (0, 1]", iteration=n
        )
    if mask.m != family.m:
        raise ConformanceError(f"mask has {mask.m} bits for {family.m} blocks")
    if x.dims != tuple(family.dims):
        raise ConformanceError(f"iterate dims {x.dims} do not match family {family.dims}")
    error_blocks = None
    if error is not None:
        if error.dims != x.dims:
            raise ConformanceError("perturbation dims do not match the iterate")
        error_blocks = error.blocks
    out = _step_blocks(x.blocks, family, n, mask.active, float(relaxation), error_blocks)
    return BlockVector(out)


def run_trajectory(family: OperatorFamily, law: SweepingLaw, schedules: Schedules,
                   error_model: ErrorModel, x0: BlockVector | InitialBox, seed: int,
                   *, weights: WeightVector | Sequence[float] | None = None,
                   trajectory: int = 0,
                   record_iterates: bool = False) -> Trajectory:
    """Run one trajectory over the schedule horizon and record its errors.

    ``weights`` selects the weighted squared norm tracked alongside the plain
    one; by default it is the inverse of the law's marginals.  The run is
    deterministic given (configuration, seed, trajectory id).
    """
    if law.m != family.m:
        raise ConformanceError(f"law has {law.m} blocks, family has {family.m}")
    dims = tuple(family.dims)
    horizon = schedules.horizon
    lam_vals = schedules.relaxations()
    alpha_vals = schedules.error_budgets()

    if weights is None:
        omega = 1.0 / law.marginals()
    elif isinstance(weights, WeightVector):
        omega = weights.omega
    else:
        omega = WeightVector(weights).omega
    if omega.size != family.m:
        raise ConformanceError(f"{omega.size} weights for {family.m} blocks")

    sweep_rng = stream(seed, trajectory, SWEEP_STREAM)
    error_rng = stream(seed, trajectory, ERROR_STREAM)
    init_rng = stream(seed, trajectory, INIT_STREAM)

    if isinstance(x0, InitialBox):
        if x0.dims != dims:
            raise ConformanceError(f"initial box dims {x0.dims} do not match {dims}")
        blocks = x0.draw(init_rng)
    else:
        if x0.dims != dims:
            raise ConformanceError(f"initial point dims {x0.dims} do not match {dims}")
        blocks = list(x0.blocks)

    xbar = family.fixed_point().blocks
    sq = np.empty(horizon + 1)
    wsq = np.empty(horizon + 1)
    masks = np.empty((horizon, family.m), dtype=bool)
    snapshots: list[BlockVector] | None = [] if record_iterates else None

    def record(k, current):
        plain = 0.0
        weighted = 0.0
        for i, b in enumerate(current):
            d = b - xbar[i]
            v = float(d @ d)
            plain += v
            weighted += float(omega[i]) * v
        sq[k] = plain
        wsq[k] = weighted
        if snapshots is not None:
            snapshots.append(BlockVector(current))

    record(0, blocks)
    for n in range(horizon):
        lam = float(lam_vals[n])
        if not 0.0 < lam <= 1.0:
            raise ScheduleViolationError(
                f"relaxation {lam!r} at iteration {n} is outside (0, 1]", iteration=n
            )
        mask = law.sample(sweep_rng)
        masks[n] = mask.bits
        error_blocks = error_model.draw(n, float(alpha_vals[n]), dims, error_rng)
        blocks = _step_blocks(blocks, family, n, mask.active, lam, error_blocks)
        record(n + 1, blocks)

    sq.flags.writeable = False
    wsq.flags.writeable = False
    masks.flags.writeable = False
    omega_out = omega.copy()
    omega_out.flags.writeable = False
    return Trajectory(
        sq_error=sq,
        weighted_sq_error=wsq,
        masks=masks,
        weights=omega_out,
        iterates=tuple(snapshots) if snapshots is not None else None,
    )
