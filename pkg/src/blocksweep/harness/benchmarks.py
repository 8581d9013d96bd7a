"""Shipped benchmark experiments.

Each benchmark is a plain JSON-ready dictionary; the copies under
``configs/`` in the repository root are generated from these via
``write_benchmark_configs`` and kept in sync by a test.

* ``exact2``: two scalar blocks under a block-decoupled affine contraction,
  uniform sweeping, no perturbation, four steps; small enough for the exact
  enumeration oracle.
* ``affine4``: four blocks of mixed dimensions, block-decoupled affine
  contraction, relaxation 0.95, geometrically decaying perturbation budget.
* ``cyclic3``: three two-dimensional blocks coupled through a cycle of
  quadratic proximity operators.
* ``proxgrad5``: five two-dimensional blocks with elastic-net penalties and
  a quadratic coupling, driven by the shifted proximal-gradient family.
* ``rate_uniform``: error-free run with equal gains for linear-rate fitting.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .config import ExperimentConfig, parse_config

__all__ = ["BENCHMARKS", "benchmark_config", "load_benchmark", "write_benchmark_configs"]


def _nested(arr: np.ndarray) -> list:
    return arr.tolist()


def _exact2() -> dict:
    return {
        "problem": {
            "kind": "diagonal_affine",
            "gains": [0.5, -0.25],
            "offsets": [[1.0], [-2.0]],
        },
        "sweeping": {"kind": "uniform"},
        "schedules": {
            "relaxation": {"kind": "constant", "value": 1.0},
            "error_budget": {"kind": "constant", "value": 0.0},
        },
        "errors": {"kind": "none"},
        "experiment": {
            "horizon": 4,
            "runs": 200,
            "seed": 20240811,
            "weights": "inverse_marginals",
            "x0": {"kind": "explicit", "blocks": [[3.0], [1.0]]},
        },
    }


def _affine4() -> dict:
    return {
        "problem": {
            "kind": "diagonal_affine",
            "gains": [0.5, -0.35, 0.6, 0.45],
            "offsets": [[1.0, -0.5], [2.0], [0.25, -1.0, 0.75], [-1.5, 0.5]],
        },
        "sweeping": {"kind": "uniform"},
        "schedules": {
            "relaxation": {"kind": "constant", "value": 0.95},
            "error_budget": {"kind": "geometric", "initial": 0.01, "ratio": 0.81},
        },
        "errors": {"kind": "ball"},
        "experiment": {
            "horizon": 200,
            "runs": 1000,
            "seed": 20240801,
            "weights": "inverse_marginals",
            "x0": {"kind": "box", "lower": -2.0, "upper": 2.0},
        },
    }


def _cyclic3() -> dict:
    return {
        "problem": {
            "kind": "cyclic_resolvent",
            "blocks": [
                {"kind": "quadratic", "delta": 1.0, "center": [1.0, -1.0]},
                {"kind": "quadratic", "delta": 2.0, "center": [2.0, 0.5]},
                {"kind": "quadratic", "delta": 3.0, "center": [-0.5, 1.5]},
            ],
        },
        "sweeping": {"kind": "uniform"},
        "schedules": {
            "relaxation": {"kind": "constant", "value": 1.0},
            "error_budget": {"kind": "geometric", "initial": 0.01, "ratio": 0.81},
        },
        "errors": {"kind": "ball"},
        "experiment": {
            "horizon": 200,
            "runs": 1000,
            "seed": 20240802,
            "weights": "inverse_marginals",
            "x0": {"kind": "box", "lower": -2.0, "upper": 2.0},
        },
    }


def _proxgrad_coupling() -> tuple[list, list]:
    # fixed seeded quadratic coupling over the stacked 10 coordinates,
    # scaled to spectral norm 1.8 so the derived cocoercivity is 1/1.8
    rng = np.random.default_rng(7)
    a = rng.standard_normal((10, 10))
    q = a @ a.T
    q *= 1.8 / np.linalg.eigvalsh(q).max()
    offset = rng.uniform(-1.0, 1.0, size=10)
    return _nested(q), _nested(offset)


def _proxgrad5() -> dict:
    matrix, offset = _proxgrad_coupling()
    return {
        "problem": {
            "kind": "proximal_gradient",
            "blocks": [
                {"kind": "elastic_net", "l1": 0.3, "delta": 1.0, "dim": 2},
                {"kind": "elastic_net", "l1": 0.2, "delta": 1.2, "dim": 2},
                {"kind": "elastic_net", "l1": 0.4, "delta": 1.5, "dim": 2},
                {"kind": "elastic_net", "l1": 0.25, "delta": 1.1, "dim": 2},
                {"kind": "elastic_net", "l1": 0.35, "delta": 1.3, "dim": 2},
            ],
            "coupling": {"kind": "quadratic", "matrix": matrix, "offset": offset},
            "gamma": {"kind": "constant", "value": 0.8},
            "theta_shift": {"kind": "constant", "value": 0.0},
        },
        "sweeping": {"kind": "uniform"},
        "schedules": {
            "relaxation": {"kind": "constant", "value": 1.0},
            "error_budget": {"kind": "geometric", "initial": 0.01, "ratio": 0.81},
        },
        "errors": {"kind": "ball"},
        "experiment": {
            "horizon": 200,
            "runs": 1000,
            "seed": 20240803,
            "weights": "inverse_marginals",
            "x0": {"kind": "box", "lower": -2.0, "upper": 2.0},
        },
    }


def _rate_uniform() -> dict:
    return {
        "problem": {
            "kind": "diagonal_affine",
            "gains": [0.5, 0.5, 0.5],
            "offsets": [[1.0], [-0.5], [2.0]],
        },
        "sweeping": {"kind": "uniform"},
        "schedules": {
            "relaxation": {"kind": "constant", "value": 1.0},
            "error_budget": {"kind": "constant", "value": 0.0},
        },
        "errors": {"kind": "none"},
        "experiment": {
            "horizon": 200,
            "runs": 400,
            "seed": 20240804,
            "weights": "inverse_marginals",
            "x0": {"kind": "box", "lower": -2.0, "upper": 2.0},
        },
    }


BENCHMARKS: dict[str, callable] = {
    "exact2": _exact2,
    "affine4": _affine4,
    "cyclic3": _cyclic3,
    "proxgrad5": _proxgrad5,
    "rate_uniform": _rate_uniform,
}


def benchmark_config(name: str) -> dict:
    """JSON-ready dictionary for a shipped benchmark."""
    try:
        return BENCHMARKS[name]()
    except KeyError:
        raise KeyError(f"unknown benchmark {name!r}; available: {sorted(BENCHMARKS)}") from None


def load_benchmark(name: str) -> ExperimentConfig:
    """Parse a shipped benchmark into a ready-to-run experiment."""
    return parse_config(benchmark_config(name))


def write_benchmark_configs(directory: str | Path) -> list[Path]:
    """Write every shipped benchmark as JSON under ``directory``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for name in sorted(BENCHMARKS):
        path = directory / f"{name}.json"
        path.write_text(json.dumps(benchmark_config(name), indent=2) + "\n")
        paths.append(path)
    return paths
