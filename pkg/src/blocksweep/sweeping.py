"""Random activation laws over the nonzero binary masks of length m.

A sweeping law picks, independently at every iteration, which blocks get
updated.  The support is always the set of nonzero masks, so at least one
block is active per step.  Each law exposes its exact marginal activation
probabilities ``p_i = P[bit i set]`` in closed form; the bound engine consumes
these, so they are computed analytically rather than estimated.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from collections.abc import Sequence

import numpy as np

from .errors import InvalidLawError

__all__ = [
    "ActivationMask",
    "SweepingLaw",
    "AllBlocksLaw",
    "SingleBlockLaw",
    "IndependentBernoulliLaw",
    "UniformMaskLaw",
    "ExplicitLaw",
]

_MAX_TABLE_BLOCKS = 20
_MAX_REJECTIONS = 10**6


class ActivationMask:
    """Nonzero boolean mask saying which blocks a step updates."""

    __slots__ = ("_bits", "_active")

    def __init__(self, bits: Sequence[bool] | np.ndarray):
        arr = np.array(bits, dtype=bool, copy=True).reshape(-1)
        if arr.size == 0:
            raise ValueError("mask needs at least one bit")
        if not arr.any():
            raise InvalidLawError("the all-zero activation mask is not allowed")
        arr.flags.writeable = False
        self._bits = arr
        self._active = np.flatnonzero(arr)

    @property
    def bits(self) -> np.ndarray:
        return self._bits

    @property
    def active(self) -> np.ndarray:
        """Indices of the active blocks."""
        return self._active

    @property
    def m(self) -> int:
        return self._bits.size

    def bitstring(self) -> str:
        return "".join("1" if b else "0" for b in self._bits)

    def __eq__(self, other) -> bool:
        return isinstance(other, ActivationMask) and np.array_equal(self._bits, other._bits)

    def __hash__(self):
        return hash(self._bits.tobytes())

    def __repr__(self) -> str:
        return f"ActivationMask({self.bitstring()})"


def _bits_of(index: int, m: int) -> np.ndarray:
    return np.array([(index >> i) & 1 for i in range(m)], dtype=bool)


class SweepingLaw(ABC):
    """Distribution over nonzero activation masks, identical across iterations."""

    @property
    @abstractmethod
    def m(self) -> int:
        """Number of blocks."""

    @abstractmethod
    def sample(self, rng: np.random.Generator) -> ActivationMask:
        """Draw one mask.  Repeated calls on one stream are i.i.d."""

    @abstractmethod
    def marginals(self) -> np.ndarray:
        """Exact per-block activation probabilities.

        Raises :class:`InvalidLawError` when some block is never activated,
        since every downstream bound requires strictly positive marginals.
        """

    def table(self) -> tuple[np.ndarray, np.ndarray]:
        """Materialize the distribution as ``(masks, probabilities)``.

        ``masks`` is a ``(k, m)`` boolean array; probabilities sum to one.
        Only available for ``m <= 20``.
        """
        if self.m > _MAX_TABLE_BLOCKS:
            raise InvalidLawError(
                f"explicit tables are limited to {_MAX_TABLE_BLOCKS} blocks, got m={self.m}"
            )
        return self._table()

    @abstractmethod
    def _table(self) -> tuple[np.ndarray, np.ndarray]:
        ...

    def _check_marginals(self, p: np.ndarray) -> np.ndarray:
        if np.any(p <= 0):
            dead = np.flatnonzero(p <= 0).tolist()
            raise InvalidLawError(
                f"blocks {dead} have zero activation probability; "
                "every block must be activated with positive probability"
            )
        out = p.copy()
        out.flags.writeable = False
        return out


class AllBlocksLaw(SweepingLaw):
    """Deterministic law activating every block at every iteration."""

    def __init__(self, m: int):
        if m < 1:
            raise ValueError("m must be >= 1")
        self._m = int(m)
        self._mask = ActivationMask(np.ones(self._m, dtype=bool))

    @property
    def m(self) -> int:
        return self._m

    def sample(self, rng: np.random.Generator) -> ActivationMask:
        return self._mask

    def marginals(self) -> np.ndarray:
        return self._check_marginals(np.ones(self._m))

    def _table(self) -> tuple[np.ndarray, np.ndarray]:
        return np.ones((1, self._m), dtype=bool), np.array([1.0])


class SingleBlockLaw(SweepingLaw):
    """Exactly one block per iteration, block i with probability ``weights[i]``."""

    def __init__(self, weights: Sequence[float] | np.ndarray):
        q = np.asarray(weights, dtype=np.float64).reshape(-1)
        if q.size == 0:
            raise ValueError("need at least one weight")
        if np.any(q < 0):
            raise ValueError("selection weights must be nonnegative")
        total = q.sum()
        if not np.isclose(total, 1.0, rtol=0, atol=1e-9):
            raise ValueError(f"selection weights must sum to 1, got {total!r}")
        if not np.any(q > 0):
            raise ValueError("at least one selection weight must be positive")
        self._q = q / total
        self._cum = np.cumsum(self._q)
        self._masks = [ActivationMask(np.eye(q.size, dtype=bool)[i]) for i in range(q.size)]

    @property
    def m(self) -> int:
        return self._q.size

    def sample(self, rng: np.random.Generator) -> ActivationMask:
        i = int(np.searchsorted(self._cum, rng.random(), side="right"))
        return self._masks[min(i, self.m - 1)]

    def marginals(self) -> np.ndarray:
        return self._check_marginals(self._q)

    def _table(self) -> tuple[np.ndarray, np.ndarray]:
        keep = self._q > 0
        masks = np.eye(self.m, dtype=bool)[keep]
        return masks, self._q[keep].copy()


class IndependentBernoulliLaw(SweepingLaw):
    """Each block active independently with probability q, conditioned on a nonzero mask.

    Conditioning is realized by rejecting the all-zero draw, which terminates
    almost surely for q > 0; the marginals carry the exact conditioning
    factor ``p_i = q / (1 - (1-q)^m)``.
    """

    def __init__(self, q: float, m: int):
        if m < 1:
            raise ValueError("m must be >= 1")
        if not 0 < q <= 1:
            raise ValueError("q must lie in (0, 1]")
        self._q = float(q)
        self._m = int(m)

    @property
    def m(self) -> int:
        return self._m

    @property
    def q(self) -> float:
        return self._q

    def sample(self, rng: np.random.Generator) -> ActivationMask:
        for _ in range(_MAX_REJECTIONS):
            bits = rng.random(self._m) < self._q
            if bits.any():
                return ActivationMask(bits)
        raise InvalidLawError(
            f"rejection sampling failed {_MAX_REJECTIONS} times; q={self._q} is degenerate"
        )

    def marginals(self) -> np.ndarray:
        accept = 1.0 - (1.0 - self._q) ** self._m
        return self._check_marginals(np.full(self._m, self._q / accept))

    def _table(self) -> tuple[np.ndarray, np.ndarray]:
        masks = np.array([_bits_of(k, self._m) for k in range(1, 2**self._m)])
        counts = masks.sum(axis=1)
        raw = self._q**counts * (1.0 - self._q) ** (self._m - counts)
        probs = raw / raw.sum()
        return masks, probs


class UniformMaskLaw(SweepingLaw):
    """Uniform distribution over all ``2^m - 1`` nonzero masks.

    Every block is active in exactly half of all masks, so the marginals are
    ``2^(m-1) / (2^m - 1)``.
    """

    def __init__(self, m: int):
        if m < 1:
            raise ValueError("m must be >= 1")
        if m > 62:
            raise ValueError("m too large for integer mask sampling")
        self._m = int(m)
        # small mask universes are cached so sampling is a table lookup
        self._cache = (
            [ActivationMask(_bits_of(k, self._m)) for k in range(1, 2**self._m)]
            if self._m <= 10 else None
        )

    @property
    def m(self) -> int:
        return self._m

    def sample(self, rng: np.random.Generator) -> ActivationMask:
        k = int(rng.integers(1, 2**self._m))
        if self._cache is not None:
            return self._cache[k - 1]
        return ActivationMask(_bits_of(k, self._m))

    def marginals(self) -> np.ndarray:
        p = 2 ** (self._m - 1) / (2**self._m - 1)
        return self._check_marginals(np.full(self._m, p))

    def _table(self) -> tuple[np.ndarray, np.ndarray]:
        masks = np.array([_bits_of(k, self._m) for k in range(1, 2**self._m)])
        probs = np.full(masks.shape[0], 1.0 / masks.shape[0])
        return masks, probs


class ExplicitLaw(SweepingLaw):
    """Law given by an explicit table of nonzero masks and probabilities."""

    def __init__(self, masks: Sequence[Sequence[bool]] | np.ndarray, probs: Sequence[float]):
        mask_arr = np.array(masks, dtype=bool)
        if mask_arr.ndim != 2 or mask_arr.shape[0] == 0:
            raise ValueError("masks must form a nonempty 2-D table")
        m = mask_arr.shape[1]
        if m > _MAX_TABLE_BLOCKS:
            raise InvalidLawError(
                f"explicit laws are limited to {_MAX_TABLE_BLOCKS} blocks, got m={m}"
            )
        if not mask_arr.any(axis=1).all():
            raise InvalidLawError("explicit tables must not contain the all-zero mask")
        keys = {tuple(row.tolist()) for row in mask_arr}
        if len(keys) != mask_arr.shape[0]:
            raise ValueError("explicit tables must not repeat masks")
        p = np.asarray(probs, dtype=np.float64).reshape(-1)
        if p.size != mask_arr.shape[0]:
            raise ValueError("one probability per mask is required")
        if np.any(p < 0):
            raise ValueError("probabilities must be nonnegative")
        if not np.isclose(p.sum(), 1.0, rtol=0, atol=1e-9):
            raise ValueError(f"probabilities must sum to 1, got {p.sum()!r}")
        self._masks = mask_arr
        self._probs = p / p.sum()
        self._cum = np.cumsum(self._probs)
        self._mask_objs = [ActivationMask(row) for row in mask_arr]

    @property
    def m(self) -> int:
        return self._masks.shape[1]

    def sample(self, rng: np.random.Generator) -> ActivationMask:
        i = int(np.searchsorted(self._cum, rng.random(), side="right"))
        return self._mask_objs[min(i, len(self._mask_objs) - 1)]

    def marginals(self) -> np.ndarray:
        p = self._probs @ self._masks
        return self._check_marginals(np.asarray(p, dtype=np.float64))

    def _table(self) -> tuple[np.ndarray, np.ndarray]:
        return self._masks.copy(), self._probs.copy()
