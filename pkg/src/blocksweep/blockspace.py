"""Block-structured vectors over a direct sum of finite-dimensional real spaces.

A point lives in ``H = H_1 x ... x H_m`` where block ``i`` is a dense real
vector of dimension ``d_i``.  The plain squared norm is the sum of the block
squared norms; weighted variants ``sum_i w_i ||x_i||^2`` with positive weights
are the norms in which the mean-square bounds of :mod:`blocksweep.bounds` are
stated.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence

import numpy as np

from .errors import ConformanceError

__all__ = [
    "BlockVector",
    "WeightVector",
    "weighted_norm_sq",
    "norm_equivalence_factors",
]


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=np.float64, copy=True).reshape(-1)
    out.flags.writeable = False
    return out


class BlockVector:
    """Immutable element of the direct sum, stored as one dense vector per block.

    Arithmetic acts blockwise and is only defined between vectors with the
    same block dimensions; mixing shapes raises :class:`ConformanceError`.
    """

    __slots__ = ("_blocks",)

    def __init__(self, blocks: Iterable[np.ndarray | Sequence[float] | float]):
        frozen = []
        for b in blocks:
            arr = _freeze(np.atleast_1d(np.asarray(b, dtype=np.float64)))
            if arr.size == 0:
                raise ValueError("blocks must have dimension >= 1")
            frozen.append(arr)
        if not frozen:
            raise ValueError("a block vector needs at least one block")
        self._blocks = tuple(frozen)

    @property
    def blocks(self) -> tuple[np.ndarray, ...]:
        return self._blocks

    @property
    def m(self) -> int:
        return len(self._blocks)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(b.size for b in self._blocks)

    def __len__(self) -> int:
        return len(self._blocks)

    def __getitem__(self, i: int) -> np.ndarray:
        return self._blocks[i]

    def __iter__(self):
        return iter(self._blocks)

    @classmethod
    def zeros(cls, dims: Sequence[int]) -> "BlockVector":
        return cls([np.zeros(d) for d in dims])

    @classmethod
    def from_flat(cls, flat: np.ndarray, dims: Sequence[int]) -> "BlockVector":
        flat = np.asarray(flat, dtype=np.float64).reshape(-1)
        if flat.size != sum(dims):
            raise ConformanceError(
                f"flat vector of size {flat.size} does not split into blocks {tuple(dims)}"
            )
        offsets = np.cumsum([0, *dims])
        return cls([flat[offsets[i]:offsets[i + 1]] for i in range(len(dims))])

    def to_flat(self) -> np.ndarray:
        return np.concatenate(self._blocks)

    def _require_conformant(self, other: "BlockVector") -> None:
        if not isinstance(other, BlockVector):
            raise ConformanceError(f"expected a BlockVector, got {type(other).__name__}")
        if self.dims != other.dims:
            raise ConformanceError(f"block dimensions differ: {self.dims} vs {other.dims}")

    def __add__(self, other: "BlockVector") -> "BlockVector":
        self._require_conformant(other)
        return BlockVector([a + b for a, b in zip(self._blocks, other._blocks)])

    def __sub__(self, other: "BlockVector") -> "BlockVector":
        self._require_conformant(other)
        return BlockVector([a - b for a, b in zip(self._blocks, other._blocks)])

    def __mul__(self, scalar: float) -> "BlockVector":
        c = float(scalar)
        return BlockVector([c * b for b in self._blocks])

    __rmul__ = __mul__

    def __neg__(self) -> "BlockVector":
        return BlockVector([-b for b in self._blocks])

    def norm_sq(self) -> float:
        return float(sum(float(b @ b) for b in self._blocks))

    def norm(self) -> float:
        return float(np.sqrt(self.norm_sq()))

    def allclose(self, other: "BlockVector", rtol: float = 1e-12, atol: float = 0.0) -> bool:
        self._require_conformant(other)
        return all(
            np.allclose(a, b, rtol=rtol, atol=atol)
            for a, b in zip(self._blocks, other._blocks)
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, BlockVector) or self.dims != other.dims:
            return False
        return all(np.array_equal(a, b) for a, b in zip(self._blocks, other._blocks))

    def __hash__(self):
        return hash(tuple(b.tobytes() for b in self._blocks))

    def __repr__(self) -> str:
        inner = ", ".join(np.array2string(b, precision=6) for b in self._blocks)
        return f"BlockVector([{inner}])"


class WeightVector:
    """Strictly positive per-block weights for the weighted squared norm."""

    __slots__ = ("_omega",)

    def __init__(self, omega: Sequence[float] | np.ndarray):
        arr = _freeze(np.atleast_1d(np.asarray(omega, dtype=np.float64)))
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("weights must form a nonempty 1-D vector")
        if not np.all(arr > 0):
            raise ValueError("all weights must be strictly positive")
        self._omega = arr

    @property
    def omega(self) -> np.ndarray:
        return self._omega

    @property
    def m(self) -> int:
        return self._omega.size

    def __len__(self) -> int:
        return self._omega.size

    def __getitem__(self, i: int) -> float:
        return float(self._omega[i])

    def __eq__(self, other) -> bool:
        return isinstance(other, WeightVector) and np.array_equal(self._omega, other._omega)

    def __hash__(self):
        return hash(self._omega.tobytes())

    def __repr__(self) -> str:
        return f"WeightVector({np.array2string(self._omega, precision=6)})"


def _weights_array(w: WeightVector | Sequence[float] | np.ndarray) -> np.ndarray:
    if isinstance(w, WeightVector):
        return w.omega
    return WeightVector(w).omega


def weighted_norm_sq(x: BlockVector, w: WeightVector | Sequence[float]) -> float:
    """Weighted squared norm ``sum_i w_i ||x_i||^2``.

    Nonnegative, zero exactly when ``x`` is the zero vector, and quadratic in
    ``x``.  Raises :class:`ConformanceError` when the weight count does not
    match the block count.
    """
    omega = _weights_array(w)
    if omega.size != x.m:
        raise ConformanceError(f"{omega.size} weights for {x.m} blocks")
    return float(sum(float(omega[i]) * float(b @ b) for i, b in enumerate(x.blocks)))


def norm_equivalence_factors(marginals: Sequence[float] | np.ndarray) -> tuple[float, float]:
    """Sharp factors relating the plain norm to the inverse-marginal weighted norm.

    With weights ``w_i = 1/p_i`` the squared norms satisfy, for every ``x``,

        min(p) * |||x|||^2  <=  ||x||^2  <=  max(p) * |||x|||^2,

    and both factors are attained on vectors supported on a single block.
    Each marginal must lie in ``(0, 1]``.
    """
    p = np.atleast_1d(np.asarray(marginals, dtype=np.float64))
    if p.size == 0:
        raise ValueError("need at least one marginal")
    if np.any(p <= 0) or np.any(p > 1):
        raise ValueError("marginal activation probabilities must lie in (0, 1]")
    return float(p.min()), float(p.max())
