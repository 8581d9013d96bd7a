"""Command-line experiment runner.

Subcommands: ``run`` (Monte Carlo estimate plus one trajectory), ``bound``
(certified envelope), ``check`` (dominance verdict, exit code 1 on failure),
``oracle`` (exact enumeration), ``figure1`` (cost-normalized rate curves),
``ratefit`` (linear-rate fit).  Every subcommand writes delimited output and
a matching SVG figure under the output directory.  Exit codes: 0 success,
1 failed check, 2 configuration or certification error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from ..engine import run_trajectory
from ..errors import BlockSweepError
from . import csvio, plots
from .checks import check_dominance, fit_linear_rate, rate_ratio_curves
from .config import load_config
from .experiments import certified_bound, exact_expectation, monte_carlo


def _add_common(parser: argparse.ArgumentParser, needs_config: bool = True) -> None:
    if needs_config:
        parser.add_argument("--config", required=True, help="path to a JSON experiment config")
        parser.add_argument("--seed", type=int, default=None, help="override the master seed")
        parser.add_argument("--runs", type=int, default=None, help="override the number of runs")
        parser.add_argument("--horizon", type=int, default=None,
                            help="override the iteration horizon")
    parser.add_argument("--out", default="out", help="output directory (default: out)")


def _load(args):
    return load_config(args.config, seed=args.seed, runs=args.runs, horizon=args.horizon)


def _parse_window(text: str, horizon: int) -> tuple[int, int]:
    try:
        start_s, stop_s = text.split(":")
        start, stop = int(start_s), int(stop_s)
    except ValueError:
        raise BlockSweepError(f"window must look like start:stop, got {text!r}") from None
    return start, min(stop, horizon + 1)


def cmd_run(args) -> int:
    config = _load(args)
    out = Path(args.out)
    estimate = monte_carlo(config)
    first = run_trajectory(config.family, config.law, config.schedules,
                           config.error_model, config.x0, config.seed,
                           weights=config.weights, trajectory=0)
    paths = [
        csvio.write_estimate(out / "estimate.csv", estimate),
        csvio.write_trajectory(out / "trajectory.csv", first),
        plots.save_estimate_plot(out / "run.svg", estimate),
    ]
    print(f"ran {config.runs} trajectories over {config.horizon} iterations")
    for p in paths:
        print(f"wrote {p}")
    return 0


def cmd_bound(args) -> int:
    config = _load(args)
    out = Path(args.out)
    bound = certified_bound(config, norm=args.norm)
    paths = [
        csvio.write_bound(out / "bound.csv", bound),
        plots.save_bound_plot(out / "bound.svg", bound),
    ]
    print(f"certified {args.norm}-norm envelope over {config.horizon} iterations "
          f"(prefactor {bound.prefactor:g})")
    for p in paths:
        print(f"wrote {p}")
    return 0


def cmd_check(args) -> int:
    config = _load(args)
    out = Path(args.out)
    estimate = monte_carlo(config)
    bound = certified_bound(config, norm=args.norm)
    report = check_dominance(estimate, bound, slack=args.slack)
    paths = [
        csvio.write_check(out / "check.csv", report),
        plots.save_check_plot(out / "check.svg", report),
    ]
    print(report)
    for p in paths:
        print(f"wrote {p}")
    return 0 if report.passed else 1


def cmd_oracle(args) -> int:
    config = _load(args)
    out = Path(args.out)
    estimate = exact_expectation(config)
    path = csvio.write_estimate(out / "oracle.csv", estimate)
    print(f"enumerated exact expectations over {config.horizon} iterations")
    print(f"wrote {path}")
    return 0


def cmd_figure1(args) -> int:
    out = Path(args.out)
    chis = [float(v) for v in args.chi.split(",")]
    p_grid = np.linspace(args.pmin, 1.0, args.pcount)
    rows = rate_ratio_curves(chis, p_grid)
    paths = [
        csvio.write_rate_curves(out / "figure1.csv", rows),
        plots.save_rate_curves_plot(out / "figure1.svg", rows),
    ]
    for p in paths:
        print(f"wrote {p}")
    return 0


def cmd_ratefit(args) -> int:
    config = _load(args)
    out = Path(args.out)
    estimate = monte_carlo(config)
    window = _parse_window(args.window, config.horizon)
    fit = fit_linear_rate(estimate, window)
    paths = [
        csvio.write_ratefit(out / "ratefit.csv", estimate, fit),
        plots.save_ratefit_plot(out / "ratefit.svg", estimate, fit),
    ]
    if fit.degenerate:
        print(f"window {fit.window}: exact convergence, rate reported as 0")
    else:
        print(f"window {fit.window}: fitted per-iteration ratio {fit.ratio:.6f}")
    for p in paths:
        print(f"wrote {p}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blocksweep",
        description="randomly swept block-coordinate iterations with certified bounds",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="Monte Carlo estimate plus one recorded trajectory")
    _add_common(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("bound", help="certified mean-square envelope")
    _add_common(p)
    p.add_argument("--norm", choices=("weighted", "plain"), default="weighted")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("check", help="dominance of the envelope over the estimate")
    _add_common(p)
    p.add_argument("--norm", choices=("weighted", "plain"), default="weighted")
    p.add_argument("--slack", type=float, default=3.0,
                   help="allowed multiples of the standard error (default 3)")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("oracle", help="exact expectations by enumeration")
    _add_common(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("figure1", help="cost-normalized rate-ratio curves")
    _add_common(p, needs_config=False)
    p.add_argument("--chi", default="0.2,0.4,0.6,0.8",
                   help="comma-separated step factors (default 0.2,0.4,0.6,0.8)")
    p.add_argument("--pmin", type=float, default=0.01)
    p.add_argument("--pcount", type=int, default=100)
    p.set_defaults(func=cmd_figure1)

    p = sub.add_parser("ratefit", help="least-squares linear rate over a window")
    _add_common(p)
    p.add_argument("--window", default="10:110", help="iterate window start:stop")
    p.set_defaults(func=cmd_ratefit)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BlockSweepError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
