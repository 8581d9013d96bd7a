"""Closed-form schedule descriptors for relaxation and error budgets.

Schedules are descriptors (constant, geometric, polynomial) rather than
arbitrary callbacks so that admissibility questions, such as square-root
summability of the error budget or a positive lower bound on the relaxation,
are decidable from the descriptor instead of estimated from finitely many
values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ScheduleViolationError

__all__ = ["Schedule", "Schedules", "constant", "geometric", "polynomial"]

_KINDS = ("constant", "geometric", "polynomial")


@dataclass(frozen=True)
class Schedule:
    """One scalar sequence in closed form.

    constant:    value(n) = base
    geometric:   value(n) = base * rate**n          with rate in [0, 1]
    polynomial:  value(n) = base / (n + 1)**rate    with rate > 0
    """

    kind: str
    base: float
    rate: float = 0.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown schedule kind {self.kind!r}")
        if self.kind == "geometric" and not 0.0 <= self.rate <= 1.0:
            raise ValueError("geometric ratio must lie in [0, 1]")
        if self.kind == "polynomial" and self.rate <= 0.0:
            raise ValueError("polynomial exponent must be positive")

    def value(self, n: int) -> float:
        if self.kind == "constant":
            return self.base
        if self.kind == "geometric":
            return self.base * self.rate**n
        return self.base / (n + 1) ** self.rate

    def values(self, count: int) -> np.ndarray:
        n = np.arange(count)
        if self.kind == "constant":
            return np.full(count, self.base, dtype=np.float64)
        if self.kind == "geometric":
            return self.base * self.rate ** n.astype(np.float64)
        return self.base / (n + 1.0) ** self.rate

    def limit(self) -> float:
        """Limit of the sequence as n grows."""
        if self.kind == "constant":
            return self.base
        if self.kind == "geometric":
            return self.base if self.rate == 1.0 else 0.0
        return 0.0

    def sqrt_summable(self) -> bool:
        """Whether the sum of square roots of the values is finite.

        Decided in closed form: identically zero sequences, geometric decay
        with ratio below one, and polynomial decay faster than 1/n^2 qualify.
        """
        if self.base == 0.0:
            return True
        if self.kind == "geometric":
            return self.rate < 1.0
        if self.kind == "polynomial":
            return self.rate > 2.0
        return False


def constant(value: float) -> Schedule:
    return Schedule("constant", float(value))


def geometric(initial: float, ratio: float) -> Schedule:
    return Schedule("geometric", float(initial), float(ratio))


def polynomial(initial: float, exponent: float) -> Schedule:
    return Schedule("polynomial", float(initial), float(exponent))


@dataclass(frozen=True)
class Schedules:
    """Per-iteration relaxation and perturbation budget over a finite horizon.

    ``relaxation`` supplies the step blend in (0, 1]; ``error_budget``
    supplies the bound on the second moment of the injected perturbation.
    ``validate`` checks the ranges over the horizon and that the relaxation
    does not vanish in the limit; budget summability is certified separately
    by the bound engine, which needs it.
    """

    relaxation: Schedule
    error_budget: Schedule
    horizon: int

    def validate(self) -> None:
        if self.horizon < 1:
            raise ScheduleViolationError("horizon must be >= 1")
        lam = self.relaxation.values(self.horizon)
        bad = np.flatnonzero((lam <= 0) | (lam > 1))
        if bad.size:
            n = int(bad[0])
            raise ScheduleViolationError(
                f"relaxation value {lam[n]!r} at iteration {n} is outside (0, 1]",
                iteration=n,
            )
        if self.relaxation.limit() <= 0:
            raise ScheduleViolationError("relaxation must stay bounded away from zero")
        alpha = self.error_budget.values(self.horizon)
        bad = np.flatnonzero(alpha < 0)
        if bad.size:
            n = int(bad[0])
            raise ScheduleViolationError(
                f"error budget {alpha[n]!r} at iteration {n} is negative", iteration=n
            )

    def relaxations(self) -> np.ndarray:
        return self.relaxation.values(self.horizon)

    def error_budgets(self) -> np.ndarray:
        return self.error_budget.values(self.horizon)
