"""Randomly swept block-coordinate fixed-point iterations with certified bounds.

The library runs stochastically perturbed block-coordinate fixed-point
iterations in which an i.i.d. random mask decides, at every step, which
blocks are updated.  For operator families carrying an exact blockwise
contraction certificate, it evaluates deterministic envelopes that dominate
the mean squared error in weighted or plain norms, and ships an experiment
harness that verifies the domination against Monte Carlo and exact
brute-force estimates.
"""

from .blockspace import BlockVector, WeightVector, norm_equivalence_factors, weighted_norm_sq
from .bounds import (
    BoundTrajectory,
    block_coordinate_bound,
    envelope_recursion,
    normalized_rate,
    normalized_rate_ratio_bounds,
    optimal_single_block_probs,
    plain_norm_bound,
    single_sequence_bound,
)
from .engine import (
    BallError,
    ErrorModel,
    FixedVectorError,
    InitialBox,
    NoError,
    Trajectory,
    run_trajectory,
    step,
)
from .errors import (
    BlockSweepError,
    CertificationError,
    ConfigError,
    ConformanceError,
    FixedPointError,
    InvalidLawError,
    ScheduleViolationError,
)
from .operators import (
    AffineMonotone,
    BoxQuadraticProx,
    CyclicDifferenceCoupling,
    CyclicResolventFamily,
    DiagonalAffineFamily,
    ElasticNetProx,
    ForwardBackwardFamily,
    ForwardBackwardSpec,
    OperatorFamily,
    QuadraticCoupling,
    QuadraticProx,
    build_cyclic_resolvent,
    build_diagonal_affine,
    build_forward_backward,
    build_proximal_gradient,
    resolvent,
    solve_fixed_point,
)
from .schedules import Schedule, Schedules, constant, geometric, polynomial
from .sweeping import (
    ActivationMask,
    AllBlocksLaw,
    ExplicitLaw,
    IndependentBernoulliLaw,
    SingleBlockLaw,
    SweepingLaw,
    UniformMaskLaw,
)

__version__ = "0.1.0"

__all__ = [
    "BlockVector",
    "WeightVector",
    "weighted_norm_sq",
    "norm_equivalence_factors",
    "ActivationMask",
    "SweepingLaw",
    "AllBlocksLaw",
    "SingleBlockLaw",
    "IndependentBernoulliLaw",
    "UniformMaskLaw",
    "ExplicitLaw",
    "Schedule",
    "Schedules",
    "constant",
    "geometric",
    "polynomial",
    "AffineMonotone",
    "QuadraticProx",
    "BoxQuadraticProx",
    "ElasticNetProx",
    "resolvent",
    "OperatorFamily",
    "DiagonalAffineFamily",
    "CyclicResolventFamily",
    "ForwardBackwardFamily",
    "ForwardBackwardSpec",
    "QuadraticCoupling",
    "CyclicDifferenceCoupling",
    "build_diagonal_affine",
    "build_cyclic_resolvent",
    "build_forward_backward",
    "build_proximal_gradient",
    "solve_fixed_point",
    "ErrorModel",
    "NoError",
    "BallError",
    "FixedVectorError",
    "InitialBox",
    "Trajectory",
    "step",
    "run_trajectory",
    "BoundTrajectory",
    "envelope_recursion",
    "single_sequence_bound",
    "block_coordinate_bound",
    "plain_norm_bound",
    "normalized_rate",
    "normalized_rate_ratio_bounds",
    "optimal_single_block_probs",
    "BlockSweepError",
    "ConformanceError",
    "InvalidLawError",
    "ScheduleViolationError",
    "CertificationError",
    "FixedPointError",
    "ConfigError",
]
