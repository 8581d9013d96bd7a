"""Operator families with certified blockwise contraction coefficients.

Every family ``(T_n)`` built here carries a certificate: a known common fixed
point ``xbar`` and per-block coefficients ``tau(i, n) < 1`` such that for all
``x`` and all ``n``

    ||T_n x - xbar||^2  <=  sum_i tau(i, n) ||x_i - xbar_i||^2.

The certificate is exact, not estimated, which restricts the building blocks
to resolvents and proximity operators available in closed form: affine
strongly monotone operators, quadratic penalties (optionally box
constrained), and elastic-net penalties.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .blockspace import BlockVector
from .errors import FixedPointError, ScheduleViolationError
from .schedules import Schedule

__all__ = [
    "AffineMonotone",
    "QuadraticProx",
    "BoxQuadraticProx",
    "ElasticNetProx",
    "resolvent",
    "OperatorFamily",
    "DiagonalAffineFamily",
    "CyclicResolventFamily",
    "ForwardBackwardFamily",
    "QuadraticCoupling",
    "CyclicDifferenceCoupling",
    "ForwardBackwardSpec",
    "build_diagonal_affine",
    "build_cyclic_resolvent",
    "build_forward_backward",
    "build_proximal_gradient",
    "solve_fixed_point",
    "DEFAULT_LARGE_BETA",
]

DEFAULT_LARGE_BETA = 1e12

_FIXED_POINT_TOL = 1e-12
_FIXED_POINT_MAX_ITERS = 10**6


def _vec(v, dim: int | None = None) -> np.ndarray:
    if isinstance(v, np.ndarray) and v.dtype == np.float64 and v.ndim == 1:
        arr = v
    else:
        arr = np.atleast_1d(np.asarray(v, dtype=np.float64)).reshape(-1)
    if dim is not None and arr.size != dim:
        raise ValueError(f"expected a vector of dimension {dim}, got {arr.size}")
    return arr


def _soft(v: np.ndarray, threshold: float) -> np.ndarray:
    return np.sign(v) * np.maximum(np.abs(v) - threshold, 0.0)


# ---------------------------------------------------------------------------
# Resolvent and proximity building blocks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AffineMonotone:
    """Affine strongly monotone operator ``A v = (M + delta I) v + b``.

    ``M`` is symmetric positive semidefinite (a scalar stands for that scalar
    times the identity), so ``A`` is ``delta``-strongly monotone and its
    resolvent at scale ``s`` is Lipschitz with constant ``1/(1 + s*delta)``.
    """

    delta: float
    offset: np.ndarray
    matrix: np.ndarray | float | None = None

    def __post_init__(self):
        if self.delta <= 0:
            raise ValueError("strong monotonicity constant delta must be positive")
        object.__setattr__(self, "offset", _vec(self.offset))
        m = self.matrix
        if m is None:
            m = 0.0
        if np.isscalar(m):
            if m < 0:
                raise ValueError("scalar monotone part must be nonnegative")
            m = float(m) * np.eye(self.dim)
        else:
            m = np.asarray(m, dtype=np.float64)
            if m.shape != (self.dim, self.dim):
                raise ValueError(f"matrix must be {self.dim}x{self.dim}")
            if not np.allclose(m, m.T, rtol=0, atol=1e-10):
                raise ValueError("monotone part must be symmetric")
            if np.linalg.eigvalsh(m).min() < -1e-10:
                raise ValueError("monotone part must be positive semidefinite")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.offset.size

    def resolve(self, scale: float, v: np.ndarray) -> np.ndarray:
        lhs = np.eye(self.dim) + scale * (self.matrix + self.delta * np.eye(self.dim))
        return np.linalg.solve(lhs, _vec(v, self.dim) - scale * self.offset)

    def resolve_shifted(self, scale: float, v: np.ndarray) -> np.ndarray:
        """Resolvent of the monotone remainder ``A - delta*Id`` at ``scale``."""
        lhs = np.eye(self.dim) + scale * self.matrix
        return np.linalg.solve(lhs, _vec(v, self.dim) - scale * self.offset)

    def as_affine_resolvent(self, scale: float) -> tuple[np.ndarray, np.ndarray]:
        lhs = np.eye(self.dim) + scale * (self.matrix + self.delta * np.eye(self.dim))
        inv = np.linalg.inv(lhs)
        return inv, inv @ (-scale * self.offset)

    def as_affine_operator(self) -> tuple[np.ndarray, np.ndarray]:
        return self.matrix + self.delta * np.eye(self.dim), self.offset.copy()


@dataclass(frozen=True)
class QuadraticProx:
    """Proximity operator family of ``f(v) = (delta/2) ||v - center||^2``."""

    delta: float
    center: np.ndarray

    def __post_init__(self):
        if self.delta <= 0:
            raise ValueError("delta must be positive")
        object.__setattr__(self, "center", _vec(self.center))

    @property
    def dim(self) -> int:
        return self.center.size

    def resolve(self, scale: float, v: np.ndarray) -> np.ndarray:
        sd = scale * self.delta
        return (_vec(v, self.dim) + sd * self.center) / (1.0 + sd)

    def resolve_shifted(self, scale: float, v: np.ndarray) -> np.ndarray:
        # f minus its strongly convex quadratic part is linear, so the
        # shifted prox is a pure translation.
        return _vec(v, self.dim) + scale * self.delta * self.center

    def as_affine_resolvent(self, scale: float) -> tuple[np.ndarray, np.ndarray]:
        sd = scale * self.delta
        return np.eye(self.dim) / (1.0 + sd), sd * self.center / (1.0 + sd)

    def as_affine_operator(self) -> tuple[np.ndarray, np.ndarray]:
        return self.delta * np.eye(self.dim), -self.delta * self.center


@dataclass(frozen=True)
class BoxQuadraticProx:
    """Prox family of ``(delta/2) ||v - center||^2`` plus a box constraint."""

    delta: float
    center: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        if self.delta <= 0:
            raise ValueError("delta must be positive")
        c = _vec(self.center)
        lo = np.broadcast_to(np.asarray(self.lower, dtype=np.float64), c.shape).copy()
        hi = np.broadcast_to(np.asarray(self.upper, dtype=np.float64), c.shape).copy()
        if np.any(lo > hi):
            raise ValueError("box lower bounds must not exceed upper bounds")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self) -> int:
        return self.center.size

    def resolve(self, scale: float, v: np.ndarray) -> np.ndarray:
        sd = scale * self.delta
        free = (_vec(v, self.dim) + sd * self.center) / (1.0 + sd)
        return np.clip(free, self.lower, self.upper)

    def resolve_shifted(self, scale: float, v: np.ndarray) -> np.ndarray:
        return np.clip(_vec(v, self.dim) + scale * self.delta * self.center,
                       self.lower, self.upper)

    def as_affine_resolvent(self, scale: float) -> None:
        return None

    def as_affine_operator(self) -> None:
        return None


@dataclass(frozen=True)
class ElasticNetProx:
    """Prox family of ``f(v) = l1 * |v|_1 + (delta/2) ||v||^2`` (coordinatewise)."""

    l1: float
    delta: float
    dim: int

    def __post_init__(self):
        if self.l1 < 0:
            raise ValueError("l1 weight must be nonnegative")
        if self.delta <= 0:
            raise ValueError("delta must be positive")
        if self.dim < 1:
            raise ValueError("dim must be >= 1")

    def resolve(self, scale: float, v: np.ndarray) -> np.ndarray:
        return _soft(_vec(v, self.dim), scale * self.l1) / (1.0 + scale * self.delta)

    def resolve_shifted(self, scale: float, v: np.ndarray) -> np.ndarray:
        return _soft(_vec(v, self.dim), scale * self.l1)

    def as_affine_resolvent(self, scale: float):
        if self.l1 == 0.0:
            sd = scale * self.delta
            return np.eye(self.dim) / (1.0 + sd), np.zeros(self.dim)
        return None

    def as_affine_operator(self):
        if self.l1 == 0.0:
            return self.delta * np.eye(self.dim), np.zeros(self.dim)
        return None


ResolventSpec = AffineMonotone | QuadraticProx | BoxQuadraticProx | ElasticNetProx


def resolvent(spec: ResolventSpec, scale: float, x: np.ndarray) -> np.ndarray:
    """Evaluate the resolvent of ``scale`` times the operator described by ``spec``.

    For prox specs this is the proximity operator of the scaled function.
    The result is Lipschitz in ``x`` with constant ``1/(1 + scale*delta)``.
    """
    if scale <= 0:
        raise ValueError("scale must be positive")
    return spec.resolve(float(scale), x)


# ---------------------------------------------------------------------------
# Operator families
# ---------------------------------------------------------------------------


def _blocks_of(x) -> Sequence[np.ndarray]:
    return x.blocks if isinstance(x, BlockVector) else x


class OperatorFamily(ABC):
    """Family ``(T_n)`` acting blockwise, with certificate ``tau`` and fixed point."""

    dims: tuple[int, ...]

    @property
    def m(self) -> int:
        return len(self.dims)

    @abstractmethod
    def apply_block(self, i: int, n: int, x) -> np.ndarray:
        """Block ``i`` of ``T_n x``; ``x`` is a BlockVector or block sequence."""

    @abstractmethod
    def tau(self, i: int, n: int) -> float:
        """Certified contraction coefficient attached to input block ``i``."""

    def fixed_point(self) -> BlockVector:
        fp = getattr(self, "_fixed_point", None)
        if fp is None:
            raise FixedPointError("fixed point has not been computed for this family")
        return fp

    def apply(self, n: int, x: BlockVector) -> BlockVector:
        blocks = _blocks_of(x)
        return BlockVector(self.apply_blocks(n, blocks, np.arange(self.m)))

    def apply_blocks(self, n: int, blocks: Sequence[np.ndarray],
                     active: np.ndarray) -> list[np.ndarray]:
        """Images of the active blocks, in the order of ``active``.

        Subclasses override this when the blocks share intermediate work.
        """
        return [self.apply_block(int(i), n, blocks) for i in active]

    def tau_row(self, n: int) -> np.ndarray:
        return np.array([self.tau(i, n) for i in range(self.m)])

    def tau_table(self, steps: int) -> np.ndarray:
        return np.array([self.tau_row(n) for n in range(steps)])

    def _linear_system(self) -> tuple[np.ndarray, np.ndarray] | None:
        """Optional flat linear system whose solution is the fixed point."""
        return None


class DiagonalAffineFamily(OperatorFamily):
    """Stationary block-decoupled affine contraction ``T_i x = G_i x_i + d_i``.

    Gains may be scalars or square matrices per block; the certificate uses
    the exact spectral norm, ``tau_i = ||G_i||^2``, which must be below one.
    """

    def __init__(self, gains: Sequence[float | np.ndarray], offsets: Sequence[np.ndarray]):
        if len(gains) != len(offsets):
            raise ValueError("one gain per offset block is required")
        if not gains:
            raise ValueError("need at least one block")
        self._offsets = tuple(_vec(d) for d in offsets)
        self.dims = tuple(d.size for d in self._offsets)
        mats = []
        taus = []
        for g, d in zip(gains, self._offsets):
            if np.isscalar(g):
                mat = float(g) * np.eye(d.size)
                norm = abs(float(g))
            else:
                mat = np.asarray(g, dtype=np.float64)
                if mat.shape != (d.size, d.size):
                    raise ValueError("matrix gain shape must match its block")
                norm = float(np.linalg.norm(mat, 2))
            if norm >= 1.0:
                raise ValueError(f"gain norm {norm} is not a contraction")
            mats.append(mat)
            taus.append(norm**2)
        self._gains = tuple(mats)
        self._taus = np.array(taus)
        self._fixed_point = solve_fixed_point(self)

    def apply_block(self, i: int, n: int, x) -> np.ndarray:
        blocks = _blocks_of(x)
        return self._gains[i] @ blocks[i] + self._offsets[i]

    def tau(self, i: int, n: int) -> float:
        return float(self._taus[i])

    def _linear_system(self):
        total = sum(self.dims)
        mat = np.eye(total)
        rhs = np.concatenate(self._offsets)
        off = np.cumsum([0, *self.dims])
        for i, g in enumerate(self._gains):
            sl = slice(off[i], off[i + 1])
            mat[sl, sl] -= g
        return mat, rhs


class CyclicResolventFamily(OperatorFamily):
    """Stationary family ``T_i x = J_i(x_{i+1})`` over a cycle of resolvents.

    All blocks share one dimension.  Each resolvent ``J_i`` is Lipschitz with
    constant ``eta_i = 1/(1 + delta_i)``, and since block ``j`` enters only
    through ``J_{j-1}``, the certificate attaches ``tau_j = eta_{j-1}^2``
    (indices cyclic) to input block ``j``.
    """

    def __init__(self, specs: Sequence[ResolventSpec]):
        if len(specs) < 1:
            raise ValueError("need at least one resolvent")
        dims = {spec.dim for spec in specs}
        if len(dims) != 1:
            raise ValueError("cyclic coupling requires equal block dimensions")
        self._specs = tuple(specs)
        self.dims = tuple(spec.dim for spec in specs)
        eta = np.array([1.0 / (1.0 + spec.delta) for spec in specs])
        self._taus = np.roll(eta, 1) ** 2
        self._fixed_point = solve_fixed_point(self)

    def apply_block(self, i: int, n: int, x) -> np.ndarray:
        blocks = _blocks_of(x)
        return self._specs[i].resolve(1.0, blocks[(i + 1) % self.m])

    def tau(self, i: int, n: int) -> float:
        return float(self._taus[i])

    def _linear_system(self):
        pieces = [spec.as_affine_resolvent(1.0) for spec in self._specs]
        if any(p is None for p in pieces):
            return None
        d = self.dims[0]
        total = d * self.m
        mat = np.eye(total)
        rhs = np.zeros(total)
        for i, (ri, offset) in enumerate(pieces):
            rows = slice(i * d, (i + 1) * d)
            j = (i + 1) % self.m
            cols = slice(j * d, (j + 1) * d)
            mat[rows, cols] -= ri
            rhs[i * d:(i + 1) * d] = offset
        return mat, rhs


@dataclass(frozen=True)
class QuadraticCoupling:
    """Linear coupling ``x -> Q x + q`` on the flat space, gradient of a quadratic.

    ``Q`` must be symmetric positive semidefinite; the coupling is then
    cocoercive with constant ``1/lambda_max(Q)`` (infinite for ``Q = 0``).
    """

    matrix: np.ndarray
    offset: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.matrix, dtype=np.float64)
        b = _vec(self.offset)
        if q.shape != (b.size, b.size):
            raise ValueError("coupling matrix must be square and match the offset")
        if not np.allclose(q, q.T, rtol=0, atol=1e-10):
            raise ValueError("coupling matrix must be symmetric")
        if q.size and np.linalg.eigvalsh(q).min() < -1e-10:
            raise ValueError("coupling matrix must be positive semidefinite")
        object.__setattr__(self, "matrix", q)
        object.__setattr__(self, "offset", b)

    @property
    def dim(self) -> int:
        return self.offset.size

    def cocoercivity(self) -> float | None:
        top = float(np.linalg.eigvalsh(self.matrix).max()) if self.matrix.size else 0.0
        return None if top <= 0.0 else 1.0 / top

    def apply_flat(self, flat: np.ndarray) -> np.ndarray:
        return self.matrix @ flat + self.offset

    def as_linear(self) -> tuple[np.ndarray, np.ndarray]:
        return self.matrix, self.offset


@dataclass(frozen=True)
class CyclicDifferenceCoupling:
    """Coupling ``(x_1 - x_2, ..., x_m - x_1)`` over equal-dimension blocks.

    Cocoercive with constant 1/2.
    """

    m: int
    block_dim: int

    def __post_init__(self):
        if self.m < 1 or self.block_dim < 1:
            raise ValueError("m and block_dim must be >= 1")

    @property
    def dim(self) -> int:
        return self.m * self.block_dim

    def cocoercivity(self) -> float:
        return 0.5

    def apply_flat(self, flat: np.ndarray) -> np.ndarray:
        grid = flat.reshape(self.m, self.block_dim)
        return (grid - np.roll(grid, -1, axis=0)).reshape(-1)

    def as_linear(self) -> tuple[np.ndarray, np.ndarray]:
        eye = np.eye(self.m)
        ring = np.kron(eye - np.roll(eye, -1, axis=1), np.eye(self.block_dim))
        return ring, np.zeros(self.dim)


Coupling = QuadraticCoupling | CyclicDifferenceCoupling


@dataclass(frozen=True)
class ForwardBackwardSpec:
    """Inputs for the relaxed forward-backward family.

    ``blocks`` describe the strongly monotone parts (constants ``delta_i``);
    ``coupling`` is the cocoercive forward part, or None for no coupling.
    ``gamma`` is the step-size schedule and ``theta_shift`` the
    strong-monotonicity transfer schedule, which must stay in
    ``[0, min_i delta_i]``.  ``beta`` optionally overrides the derived
    cocoercivity constant with a smaller (still valid) one; couplings with no
    finite constant fall back to a large configurable value so the step
    formulas stay total.
    """

    blocks: tuple[ResolventSpec, ...]
    coupling: Coupling | None
    gamma: Schedule
    theta_shift: Schedule
    beta: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        if not self.blocks:
            raise ValueError("need at least one block")
        if self.coupling is not None:
            total = sum(spec.dim for spec in self.blocks)
            if self.coupling.dim != total:
                raise ValueError("coupling dimension must match the stacked blocks")

    def resolve_beta(self) -> float:
        derived = None if self.coupling is None else self.coupling.cocoercivity()
        if self.beta is None:
            return derived if derived is not None else DEFAULT_LARGE_BETA
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        if derived is not None and self.beta > derived + 1e-12:
            raise ValueError(
                f"beta={self.beta} exceeds the derived cocoercivity constant {derived}"
            )
        return float(self.beta)


class ForwardBackwardFamily(OperatorFamily):
    """Relaxed forward-backward family with per-block shifted resolvents.

    With step ``g = gamma(n)`` and shift ``t = theta_shift(n)`` the block
    update is

        x_i -> J_{g*M_i / (1 + g*(delta_i - t))} (
                   ((1 - g*t) x_i - g * C_i(x)) / (1 + g*(delta_i - t)) )

    where ``M_i`` is the monotone remainder of block ``i`` and ``C_i`` the
    block component of the coupling.  The whole map is Lipschitz with the
    certified constant ``zeta(n) < 1`` and ``tau(i, n) = zeta(n)^2``.
    """

    def __init__(self, spec: ForwardBackwardSpec, horizon: int):
        self._spec = spec
        self.dims = tuple(s.dim for s in spec.blocks)
        self._deltas = np.array([s.delta for s in spec.blocks])
        if np.any(self._deltas <= 0):
            raise ValueError("all block strong monotonicity constants must be positive")
        self._delta_min = float(self._deltas.min())
        self._beta = spec.resolve_beta()
        self._offsets = np.cumsum([0, *self.dims])
        self.validate_schedules(horizon)
        self._fixed_point = solve_fixed_point(self)

    @property
    def beta(self) -> float:
        return self._beta

    @property
    def delta_min(self) -> float:
        return self._delta_min

    def gamma(self, n: int) -> float:
        return self._spec.gamma.value(n)

    def theta_shift(self, n: int) -> float:
        return self._spec.theta_shift.value(n)

    def validate_schedules(self, horizon: int) -> None:
        """Check step sizes and shifts over the horizon; name the first bad index."""
        for n in range(horizon):
            g = self.gamma(n)
            t = self.theta_shift(n)
            if g <= 0:
                raise ScheduleViolationError(
                    f"step size {g!r} at iteration {n} must be positive", iteration=n
                )
            if not 0.0 <= t <= self._delta_min:
                raise ScheduleViolationError(
                    f"shift {t!r} at iteration {n} is outside [0, {self._delta_min}]",
                    iteration=n,
                )
            denom = 1.0 + self._beta * (2.0 * t - self._delta_min)
            if denom > 0 and g >= 2.0 * self._beta / denom:
                raise ScheduleViolationError(
                    f"step size {g!r} at iteration {n} reaches the stability cap "
                    f"{2.0 * self._beta / denom!r}",
                    iteration=n,
                )

    def zeta(self, n: int) -> float:
        g = self.gamma(n)
        t = self.theta_shift(n)
        num = abs(1.0 - g * (t + 0.5 / self._beta)) + 0.5 * g / self._beta
        return num / (1.0 + g * (self._delta_min - t))

    def tau(self, i: int, n: int) -> float:
        return self.zeta(n) ** 2

    def _coupling_flat(self, blocks: Sequence[np.ndarray]) -> np.ndarray | None:
        if self._spec.coupling is None:
            return None
        return self._spec.coupling.apply_flat(np.concatenate(blocks))

    def _block_update(self, i: int, n: int, x_i: np.ndarray,
                      coupling_i: np.ndarray | None) -> np.ndarray:
        g = self.gamma(n)
        t = self.theta_shift(n)
        denom = 1.0 + g * (self._deltas[i] - t)
        forward = (1.0 - g * t) * x_i
        if coupling_i is not None:
            forward = forward - g * coupling_i
        return self._spec.blocks[i].resolve_shifted(g / denom, forward / denom)

    def apply_block(self, i: int, n: int, x) -> np.ndarray:
        blocks = _blocks_of(x)
        flat = self._coupling_flat(blocks)
        c_i = None if flat is None else flat[self._offsets[i]:self._offsets[i + 1]]
        return self._block_update(i, n, blocks[i], c_i)

    def apply_blocks(self, n: int, blocks: Sequence[np.ndarray],
                     active: np.ndarray) -> list[np.ndarray]:
        flat = self._coupling_flat(blocks)
        out = []
        for i in active:
            i = int(i)
            c_i = None if flat is None else flat[self._offsets[i]:self._offsets[i + 1]]
            out.append(self._block_update(i, n, blocks[i], c_i))
        return out

    def _linear_system(self):
        pieces = [s.as_affine_operator() for s in self._spec.blocks]
        if any(p is None for p in pieces):
            return None
        total = sum(self.dims)
        mat = np.zeros((total, total))
        rhs = np.zeros(total)
        for i, (li, bi) in enumerate(pieces):
            sl = slice(self._offsets[i], self._offsets[i + 1])
            mat[sl, sl] += li
            rhs[sl] -= bi
        if self._spec.coupling is not None:
            q, b = self._spec.coupling.as_linear()
            mat += q
            rhs -= b
        return mat, rhs


# ---------------------------------------------------------------------------
# Builders and fixed points
# ---------------------------------------------------------------------------


def build_diagonal_affine(gains: Sequence[float | np.ndarray],
                          offsets: Sequence[np.ndarray]) -> DiagonalAffineFamily:
    """Block-decoupled affine contraction with exact spectral certificates."""
    return DiagonalAffineFamily(gains, offsets)


def build_cyclic_resolvent(specs: Sequence[ResolventSpec]) -> CyclicResolventFamily:
    """Cycle of resolvents; block ``i`` is mapped through its successor block."""
    return CyclicResolventFamily(specs)


def build_forward_backward(spec: ForwardBackwardSpec, horizon: int) -> ForwardBackwardFamily:
    """Relaxed forward-backward family, validated over ``horizon`` iterations."""
    return ForwardBackwardFamily(spec, horizon)


def build_proximal_gradient(block_specs: Sequence[ResolventSpec],
                            coupling: QuadraticCoupling | None,
                            gamma: Schedule,
                            theta_shift: Schedule,
                            horizon: int,
                            beta: float | None = None) -> ForwardBackwardFamily:
    """Proximal gradient family for a separable-plus-quadratic objective.

    The smooth part enters through its gradient, a quadratic coupling, and
    the separable strongly convex parts through their proximity operators;
    this is the forward-backward family with those choices.
    """
    spec = ForwardBackwardSpec(
        blocks=tuple(block_specs),
        coupling=coupling,
        gamma=gamma,
        theta_shift=theta_shift,
        beta=beta,
    )
    return build_forward_backward(spec, horizon)


def solve_fixed_point(family: OperatorFamily,
                      tol: float = _FIXED_POINT_TOL,
                      max_iterations: int = _FIXED_POINT_MAX_ITERS) -> BlockVector:
    """Common fixed point of the family, certified by its residual.

    Solves the flat linear system when the family provides one, otherwise
    runs the deterministic full sweep (all blocks, unit relaxation, no
    perturbation) from zero.  The returned point ``x`` satisfies
    ``||T_0 x - x|| <= tol * (1 + ||x||)``; failure to certify within
    ``max_iterations`` sweeps raises :class:`FixedPointError`.
    """
    all_active = np.arange(family.m)

    def residual(blocks):
        image = family.apply_blocks(0, blocks, all_active)
        res = np.sqrt(sum(float((t - b) @ (t - b)) for t, b in zip(image, blocks)))
        size = np.sqrt(sum(float(b @ b) for b in blocks))
        return image, res, size

    system = family._linear_system()
    if system is not None:
        mat, rhs = system
        flat = np.linalg.solve(mat, rhs)
        candidate = BlockVector.from_flat(flat, family.dims)
        _, res, size = residual(candidate.blocks)
        if res <= tol * (1.0 + size):
            return candidate
        blocks = list(candidate.blocks)
    else:
        blocks = [np.zeros(d) for d in family.dims]

    for _ in range(max_iterations):
        image, res, size = residual(blocks)
        if res <= tol * (1.0 + size):
            return BlockVector(blocks)
        blocks = image
    raise FixedPointError(
        f"no fixed-point certificate after {max_iterations} sweeps "
        f"(last residual {res!r})"
    )
