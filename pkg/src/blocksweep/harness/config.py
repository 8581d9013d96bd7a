"""Experiment configuration: JSON schema, strict parsing, component assembly.

A config file has five sections: ``problem``, ``sweeping``, ``schedules``,
``errors``, ``experiment``.  Unknown keys anywhere are rejected so that typos
fail loudly instead of silently running a different experiment.  Parsing
builds and validates every component (including the fixed point of the
operator family) before anything runs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..blockspace import BlockVector
from ..engine import BallError, ErrorModel, FixedVectorError, InitialBox, NoError
from ..errors import BlockSweepError, ConfigError
from ..operators import (
    AffineMonotone,
    BoxQuadraticProx,
    CyclicDifferenceCoupling,
    ElasticNetProx,
    OperatorFamily,
    QuadraticCoupling,
    QuadraticProx,
    build_cyclic_resolvent,
    build_diagonal_affine,
    build_proximal_gradient,
)
from ..operators import ForwardBackwardSpec, build_forward_backward
from ..schedules import Schedule, Schedules
from ..sweeping import (
    AllBlocksLaw,
    ExplicitLaw,
    IndependentBernoulliLaw,
    SingleBlockLaw,
    SweepingLaw,
    UniformMaskLaw,
)

__all__ = ["ExperimentConfig", "parse_config", "load_config"]

_SECTIONS = ("problem", "sweeping", "schedules", "errors", "experiment")


def _require_keys(section: dict, allowed: set[str], required: set[str], where: str) -> None:
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown keys {sorted(unknown)} in {where}")
    missing = required - set(section)
    if missing:
        raise ConfigError(f"missing keys {sorted(missing)} in {where}")


def _schedule(node, where: str) -> Schedule:
    if not isinstance(node, dict):
        raise ConfigError(f"{where} must be an object")
    kind = node.get("kind")
    try:
        if kind == "constant":
            _require_keys(node, {"kind", "value"}, {"kind", "value"}, where)
            return Schedule("constant", float(node["value"]))
        if kind == "geometric":
            _require_keys(node, {"kind", "initial", "ratio"}, {"kind", "initial", "ratio"}, where)
            return Schedule("geometric", float(node["initial"]), float(node["ratio"]))
        if kind == "polynomial":
            _require_keys(
                node, {"kind", "initial", "exponent"}, {"kind", "initial", "exponent"}, where
            )
            return Schedule("polynomial", float(node["initial"]), float(node["exponent"]))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad schedule in {where}: {exc}") from exc
    raise ConfigError(f"unknown schedule kind {kind!r} in {where}")


def _resolvent_spec(node: dict, where: str):
    kind = node.get("kind")
    try:
        if kind == "affine":
            _require_keys(node, {"kind", "delta", "offset", "matrix"}, {"kind", "delta", "offset"}, where)
            return AffineMonotone(
                delta=float(node["delta"]),
                offset=np.asarray(node["offset"], dtype=np.float64),
                matrix=None if node.get("matrix") is None else np.asarray(node["matrix"]),
            )
        if kind == "quadratic":
            _require_keys(node, {"kind", "delta", "center"}, {"kind", "delta", "center"}, where)
            return QuadraticProx(delta=float(node["delta"]),
                                 center=np.asarray(node["center"], dtype=np.float64))
        if kind == "box_quadratic":
            _require_keys(
                node,
                {"kind", "delta", "center", "lower", "upper"},
                {"kind", "delta", "center", "lower", "upper"},
                where,
            )
            return BoxQuadraticProx(
                delta=float(node["delta"]),
                center=np.asarray(node["center"], dtype=np.float64),
                lower=np.asarray(node["lower"], dtype=np.float64),
                upper=np.asarray(node["upper"], dtype=np.float64),
            )
        if kind == "elastic_net":
            _require_keys(node, {"kind", "l1", "delta", "dim"}, {"kind", "l1", "delta", "dim"}, where)
            return ElasticNetProx(l1=float(node["l1"]), delta=float(node["delta"]),
                                  dim=int(node["dim"]))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad resolvent spec in {where}: {exc}") from exc
    raise ConfigError(f"unknown resolvent kind {kind!r} in {where}")


def _coupling(node, dims, where: str):
    if node is None:
        return None
    kind = node.get("kind")
    try:
        if kind == "quadratic":
            _require_keys(node, {"kind", "matrix", "offset"}, {"kind", "matrix", "offset"}, where)
            return QuadraticCoupling(
                matrix=np.asarray(node["matrix"], dtype=np.float64),
                offset=np.asarray(node["offset"], dtype=np.float64),
            )
        if kind == "cyclic_difference":
            _require_keys(node, {"kind"}, {"kind"}, where)
            if len(set(dims)) != 1:
                raise ConfigError("cyclic_difference coupling needs equal block dimensions")
            return CyclicDifferenceCoupling(m=len(dims), block_dim=dims[0])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad coupling in {where}: {exc}") from exc
    raise ConfigError(f"unknown coupling kind {kind!r} in {where}")


def _problem(node: dict, horizon: int) -> OperatorFamily:
    kind = node.get("kind")
    where = "problem"
    try:
        if kind == "diagonal_affine":
            _require_keys(node, {"kind", "gains", "offsets"}, {"kind", "gains", "offsets"}, where)
            gains = [g if np.isscalar(g) else np.asarray(g, dtype=np.float64)
                     for g in node["gains"]]
            offsets = [np.asarray(d, dtype=np.float64) for d in node["offsets"]]
            return build_diagonal_affine(gains, offsets)
        if kind == "cyclic_resolvent":
            _require_keys(node, {"kind", "blocks"}, {"kind", "blocks"}, where)
            specs = [_resolvent_spec(b, f"problem.blocks[{i}]")
                     for i, b in enumerate(node["blocks"])]
            return build_cyclic_resolvent(specs)
        if kind in ("forward_backward", "proximal_gradient"):
            allowed = {"kind", "blocks", "coupling", "gamma", "theta_shift", "beta"}
            _require_keys(node, allowed, {"kind", "blocks", "gamma", "theta_shift"}, where)
            specs = [_resolvent_spec(b, f"problem.blocks[{i}]")
                     for i, b in enumerate(node["blocks"])]
            dims = tuple(s.dim for s in specs)
            coupling = _coupling(node.get("coupling"), dims, "problem.coupling")
            gamma = _schedule(node["gamma"], "problem.gamma")
            theta = _schedule(node["theta_shift"], "problem.theta_shift")
            beta = node.get("beta")
            if kind == "proximal_gradient":
                if coupling is not None and not isinstance(coupling, QuadraticCoupling):
                    raise ConfigError("proximal_gradient requires a quadratic coupling")
                return build_proximal_gradient(specs, coupling, gamma, theta, horizon,
                                               beta=None if beta is None else float(beta))
            spec = ForwardBackwardSpec(
                blocks=tuple(specs), coupling=coupling, gamma=gamma, theta_shift=theta,
                beta=None if beta is None else float(beta),
            )
            return build_forward_backward(spec, horizon)
    except BlockSweepError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad problem section: {exc}") from exc
    raise ConfigError(f"unknown problem kind {kind!r}")


def _sweeping(node: dict, m: int) -> SweepingLaw:
    kind = node.get("kind")
    where = "sweeping"
    try:
        if kind == "all_blocks":
            _require_keys(node, {"kind"}, {"kind"}, where)
            return AllBlocksLaw(m)
        if kind == "single_block":
            _require_keys(node, {"kind", "weights"}, {"kind", "weights"}, where)
            return SingleBlockLaw(np.asarray(node["weights"], dtype=np.float64))
        if kind == "bernoulli":
            _require_keys(node, {"kind", "q"}, {"kind", "q"}, where)
            return IndependentBernoulliLaw(float(node["q"]), m)
        if kind == "uniform":
            _require_keys(node, {"kind"}, {"kind"}, where)
            return UniformMaskLaw(m)
        if kind == "explicit":
            _require_keys(node, {"kind", "masks", "probs"}, {"kind", "masks", "probs"}, where)
            masks = [[c == "1" for c in s] for s in node["masks"]]
            return ExplicitLaw(np.asarray(masks, dtype=bool),
                               np.asarray(node["probs"], dtype=np.float64))
    except BlockSweepError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad sweeping section: {exc}") from exc
    raise ConfigError(f"unknown sweeping kind {kind!r}")


def _errors(node: dict, dims) -> ErrorModel:
    kind = node.get("kind")
    where = "errors"
    if kind == "none":
        _require_keys(node, {"kind"}, {"kind"}, where)
        return NoError()
    if kind == "ball":
        _require_keys(node, {"kind"}, {"kind"}, where)
        return BallError()
    if kind == "fixed":
        _require_keys(node, {"kind", "direction"}, {"kind", "direction"}, where)
        try:
            direction = BlockVector([np.asarray(b, dtype=np.float64)
                                     for b in node["direction"]])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad error direction: {exc}") from exc
        if direction.dims != tuple(dims):
            raise ConfigError(
                f"error direction dims {direction.dims} do not match problem {tuple(dims)}"
            )
        return FixedVectorError(direction)
    raise ConfigError(f"unknown errors kind {kind!r}")


def _initial(node: dict, dims) -> BlockVector | InitialBox:
    kind = node.get("kind")
    where = "experiment.x0"
    try:
        if kind == "explicit":
            _require_keys(node, {"kind", "blocks"}, {"kind", "blocks"}, where)
            x0 = BlockVector([np.asarray(b, dtype=np.float64) for b in node["blocks"]])
            if x0.dims != tuple(dims):
                raise ConfigError(f"x0 dims {x0.dims} do not match problem {tuple(dims)}")
            return x0
        if kind == "box":
            _require_keys(node, {"kind", "lower", "upper"}, {"kind", "lower", "upper"}, where)
            return InitialBox.broadcast(dims, node["lower"], node["upper"])
    except BlockSweepError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad {where}: {exc}") from exc
    raise ConfigError(f"unknown x0 kind {kind!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully built experiment: validated components plus run parameters."""

    family: OperatorFamily
    law: SweepingLaw
    schedules: Schedules
    error_model: ErrorModel
    x0: BlockVector | InitialBox
    runs: int
    seed: int
    weights: np.ndarray
    raw: dict

    @property
    def horizon(self) -> int:
        return self.schedules.horizon

    @property
    def m(self) -> int:
        return self.family.m


def parse_config(raw: dict) -> ExperimentConfig:
    """Build and validate an experiment from its JSON-style dictionary."""
    if not isinstance(raw, dict):
        raise ConfigError("config must be an object")
    _require_keys(raw, set(_SECTIONS), set(_SECTIONS), "config")

    exp = raw["experiment"]
    allowed = {"horizon", "runs", "seed", "weights", "x0"}
    _require_keys(exp, allowed, {"horizon", "runs", "seed", "x0"}, "experiment")
    try:
        horizon = int(exp["horizon"])
        runs = int(exp["runs"])
        seed = int(exp["seed"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad experiment section: {exc}") from exc
    if horizon < 1:
        raise ConfigError("horizon must be >= 1")
    if runs < 1:
        raise ConfigError("runs must be >= 1")
    if seed < 0:
        raise ConfigError("seed must be a nonnegative integer")

    family = _problem(raw["problem"], horizon)
    law = _sweeping(raw["sweeping"], family.m)
    if law.m != family.m:
        raise ConfigError(f"sweeping law has {law.m} blocks, problem has {family.m}")

    sched_node = raw["schedules"]
    _require_keys(sched_node, {"relaxation", "error_budget"},
                  {"relaxation", "error_budget"}, "schedules")
    schedules = Schedules(
        relaxation=_schedule(sched_node["relaxation"], "schedules.relaxation"),
        error_budget=_schedule(sched_node["error_budget"], "schedules.error_budget"),
        horizon=horizon,
    )
    try:
        schedules.validate()
    except BlockSweepError as exc:
        raise ConfigError(f"bad schedules: {exc}") from exc

    error_model = _errors(raw["errors"], family.dims)
    x0 = _initial(exp["x0"], family.dims)

    weight_choice = exp.get("weights", "inverse_marginals")
    if weight_choice == "inverse_marginals":
        weights = 1.0 / law.marginals()
    else:
        weights = np.asarray(weight_choice, dtype=np.float64).reshape(-1)
        if weights.size != family.m or np.any(weights <= 0):
            raise ConfigError("explicit weights must be positive, one per block")

    return ExperimentConfig(
        family=family,
        law=law,
        schedules=schedules,
        error_model=error_model,
        x0=x0,
        runs=runs,
        seed=seed,
        weights=weights,
        raw=raw,
    )


def load_config(path: str | Path, *, seed: int | None = None, runs: int | None = None,
                horizon: int | None = None) -> ExperimentConfig:
    """Load a JSON config file, applying optional command-line overrides."""
    try:
        raw = json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict) or "experiment" not in raw:
        raise ConfigError("config must be an object with an experiment section")
    exp = raw["experiment"]
    if seed is not None:
        exp["seed"] = seed
    if runs is not None:
        exp["runs"] = runs
    if horizon is not None:
        exp["horizon"] = horizon
    return parse_config(raw)
