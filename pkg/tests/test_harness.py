import json

import numpy as np
import pytest

from blocksweep import ConfigError, ConformanceError
from blocksweep.bounds import BoundTrajectory, envelope_recursion
from blocksweep.harness import (
    check_dominance,
    certified_bound,
    exact_expectation,
    fit_linear_rate,
    initial_plain_sq,
    initial_weighted_sq,
    load_config,
    monte_carlo,
    parse_config,
    rate_ratio_curves,
)
from blocksweep.harness import csvio
from blocksweep.harness.benchmarks import BENCHMARKS, benchmark_config, load_benchmark


def tiny_config(**overrides):
    raw = {
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
            "runs": 50,
            "seed": 11,
            "weights": "inverse_marginals",
            "x0": {"kind": "explicit", "blocks": [[3.0], [1.0]]},
        },
    }
    for dotted, value in overrides.items():
        node = raw
        *head, last = dotted.split(".")
        for key in head:
            node = node[key]
        node[last] = value
    return raw


class TestConfig:
    def test_unknown_keys_rejected_everywhere(self):
        for dotted in ("typo", "problem.typo", "sweeping.typo", "schedules.typo",
                       "errors.typo", "experiment.typo"):
            raw = tiny_config(**{dotted: 1})
            with pytest.raises(ConfigError, match="unknown"):
                parse_config(raw)

    def test_missing_section_rejected(self):
        raw = tiny_config()
        del raw["errors"]
        with pytest.raises(ConfigError, match="missing"):
            parse_config(raw)

    def test_component_validation_runs_up_front(self):
        raw = tiny_config(**{"problem.gains": [1.5, 0.2]})
        with pytest.raises(ConfigError):
            parse_config(raw)
        raw = tiny_config(**{"schedules.relaxation": {"kind": "constant", "value": 0.0}})
        with pytest.raises(ConfigError):
            parse_config(raw)

    def test_x0_dims_checked(self):
        raw = tiny_config(**{"experiment.x0": {"kind": "explicit", "blocks": [[1.0, 2.0], [1.0]]}})
        with pytest.raises(ConfigError):
            parse_config(raw)

    def test_explicit_weights(self):
        cfg = parse_config(tiny_config(**{"experiment.weights": [1.5, 1.5]}))
        assert np.allclose(cfg.weights, [1.5, 1.5])

    def test_load_config_with_overrides(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(tiny_config()))
        cfg = load_config(path, seed=99, runs=7, horizon=10)
        assert cfg.seed == 99
        assert cfg.runs == 7
        assert cfg.horizon == 10

    def test_benchmark_json_files_in_sync(self, config_dir):
        for name in BENCHMARKS:
            on_disk = json.loads((config_dir / f"{name}.json").read_text())
            assert on_disk == benchmark_config(name), name


class TestInitialMoments:
    def test_explicit_point_exact(self):
        cfg = parse_config(tiny_config())
        xbar = cfg.family.fixed_point()
        want_plain = (3.0 - xbar.blocks[0][0]) ** 2 + (1.0 - xbar.blocks[1][0]) ** 2
        assert initial_plain_sq(cfg) == pytest.approx(want_plain, rel=1e-14)
        want_weighted = sum(
            w * v for w, v in zip(cfg.weights,
                                  ((3.0 - xbar.blocks[0][0]) ** 2,
                                   (1.0 - xbar.blocks[1][0]) ** 2))
        )
        assert initial_weighted_sq(cfg) == pytest.approx(want_weighted, rel=1e-14)

    def test_box_moments_match_sampling(self):
        raw = tiny_config(**{"experiment.x0": {"kind": "box", "lower": -2.0, "upper": 3.0},
                             "experiment.runs": 4000})
        cfg = parse_config(raw)
        est = monte_carlo(cfg)
        want = initial_weighted_sq(cfg)
        assert abs(est.mean_weighted[0] - want) <= 3.5 * est.se_weighted[0]


class TestMonteCarlo:
    def test_single_run_mean_is_trajectory_and_se_flagged(self):
        cfg = parse_config(tiny_config(**{"experiment.runs": 1}))
        est = monte_carlo(cfg)
        assert est.runs == 1
        assert not est.se_defined
        assert np.all(np.isnan(est.se_weighted))

    def test_deterministic_config_zero_variance(self):
        raw = tiny_config(**{"sweeping.kind": "all_blocks", "experiment.runs": 8})
        cfg = parse_config(raw)
        est = monte_carlo(cfg)
        assert np.allclose(est.se_weighted, 0.0)
        assert np.allclose(est.se_plain, 0.0)

    def test_reproducible(self):
        cfg = parse_config(tiny_config())
        a = monte_carlo(cfg)
        b = monte_carlo(cfg)
        assert np.array_equal(a.mean_weighted, b.mean_weighted)

    def test_engine_errors_carry_trajectory_id(self):
        from blocksweep import ScheduleViolationError
        from blocksweep.schedules import Schedule, Schedules

        cfg = parse_config(tiny_config(**{"experiment.runs": 3}))
        # bypass upfront validation to trigger the mid-run guard
        bad = Schedules(Schedule("constant", 1.5), cfg.schedules.error_budget,
                        cfg.schedules.horizon)
        broken = type(cfg)(
            family=cfg.family, law=cfg.law, schedules=bad,
            error_model=cfg.error_model, x0=cfg.x0, runs=cfg.runs,
            seed=cfg.seed, weights=cfg.weights, raw=cfg.raw,
        )
        with pytest.raises(ScheduleViolationError, match="trajectory 0"):
            monte_carlo(broken)

    def test_mc_within_three_se_of_oracle(self):
        cfg = parse_config(tiny_config(**{"experiment.runs": 10000}))
        est = monte_carlo(cfg)
        oracle = exact_expectation(cfg)
        for n in range(5):
            se = max(est.se_weighted[n], 1e-15)
            assert abs(est.mean_weighted[n] - oracle.mean_weighted[n]) <= 3 * se


class TestExactExpectation:
    def test_all_blocks_law_equals_deterministic_run(self):
        raw = tiny_config(**{"sweeping.kind": "all_blocks"})
        cfg = parse_config(raw)
        oracle = exact_expectation(cfg)
        mc = monte_carlo(parse_config(tiny_config(**{"sweeping.kind": "all_blocks",
                                                     "experiment.runs": 1})))
        assert np.allclose(oracle.mean_weighted, mc.mean_weighted, rtol=1e-14)

    def test_single_block_one_step_two_branch_average(self):
        raw = tiny_config(**{
            "sweeping": {"kind": "single_block", "weights": [0.5, 0.5]},
            "experiment.horizon": 1,
            "experiment.weights": [1.0, 1.0],
        })
        cfg = parse_config(raw)
        oracle = exact_expectation(cfg)
        # hand computation: x0 = (3, 1), xbar = (2, -1.6), gains (0.5, -0.25)
        # branch 1 activates block 0: x = (0.5*3 + 1, 1) = (2.5, 1)
        # branch 2 activates block 1: x = (3, -0.25*1 - 2) = (3, -2.25)
        b1 = (2.5 - 2.0) ** 2 + (1.0 + 1.6) ** 2
        b2 = (3.0 - 2.0) ** 2 + (-2.25 + 1.6) ** 2
        assert oracle.mean_plain[1] == pytest.approx(0.5 * b1 + 0.5 * b2, rel=1e-14)

    def test_fixed_vector_errors_supported(self):
        raw = tiny_config(**{
            "errors": {"kind": "fixed", "direction": [[1.0], [1.0]]},
            "schedules.error_budget": {"kind": "geometric", "initial": 0.01, "ratio": 0.5},
        })
        cfg = parse_config(raw)
        oracle = exact_expectation(cfg)
        mc = monte_carlo(parse_config({**raw, "experiment": {**raw["experiment"], "runs": 4000}}))
        for n in range(5):
            se = max(mc.se_weighted[n], 1e-15)
            assert abs(mc.mean_weighted[n] - oracle.mean_weighted[n]) <= 3 * se

    def test_ball_errors_refused(self):
        raw = tiny_config(**{"errors": {"kind": "ball"},
                             "schedules.error_budget": {"kind": "geometric",
                                                        "initial": 0.01, "ratio": 0.5}})
        with pytest.raises(ConformanceError):
            exact_expectation(parse_config(raw))

    def test_random_x0_refused(self):
        raw = tiny_config(**{"experiment.x0": {"kind": "box", "lower": -1.0, "upper": 1.0}})
        with pytest.raises(ConformanceError):
            exact_expectation(parse_config(raw))

    def test_state_space_cap_with_size_estimate(self):
        raw = tiny_config(**{"experiment.horizon": 30})
        with pytest.raises(ValueError, match="3\\^30"):
            exact_expectation(parse_config(raw))


class TestCheckDominance:
    def test_exact_oracle_slack_zero_passes(self):
        cfg = load_benchmark("exact2")
        report = check_dominance(exact_expectation(cfg), certified_bound(cfg), slack=0)
        assert report.passed
        assert report.worst_margin >= 0

    def test_corrupted_bound_fails_with_worst_margin(self):
        cfg = load_benchmark("exact2")
        good = certified_bound(cfg)
        halved_chi = good.chi / 2.0
        corrupted = BoundTrajectory(
            bound=envelope_recursion(good.bound[0], halved_chi),
            chi=halved_chi,
            eta_bar=np.zeros_like(good.eta_bar),
            vartheta_bar=np.zeros_like(good.vartheta_bar),
            mu=good.mu,
            xi=good.xi,
            prefactor=good.prefactor,
            weights=None if good.weights is None else np.asarray(good.weights),
            transient=0,
        )
        report = check_dominance(exact_expectation(cfg), corrupted, slack=0)
        assert not report.passed
        assert report.worst_margin < 0
        assert report.worst_index > 0
        assert "FAIL" in str(report)

    def test_weighting_mismatch_detected(self):
        cfg = load_benchmark("exact2")
        est = exact_expectation(cfg)
        # admissible weights (max w_i p_i = 1) that differ from 1/p
        other = parse_config(tiny_config(**{"experiment.weights": [1.5, 1.2]}))
        with pytest.raises(ConformanceError, match="weighted norms"):
            check_dominance(est, certified_bound(other))

    def test_plain_norm_route(self):
        cfg = load_benchmark("exact2")
        report = check_dominance(exact_expectation(cfg),
                                 certified_bound(cfg, norm="plain"), slack=0)
        assert report.passed

    def test_error_injected_run_against_plain_bound(self):
        raw = tiny_config(**{
            "errors": {"kind": "fixed", "direction": [[1.0], [-1.0]]},
            "schedules.error_budget": {"kind": "geometric", "initial": 0.01, "ratio": 0.81},
            "experiment.horizon": 30,
            "experiment.runs": 400,
        })
        cfg = parse_config(raw)
        report = check_dominance(monte_carlo(cfg), certified_bound(cfg, norm="plain"))
        assert report.passed

    def test_single_run_needs_zero_slack(self):
        cfg = parse_config(tiny_config(**{"experiment.runs": 1}))
        est = monte_carlo(cfg)
        with pytest.raises(ConformanceError, match="single run"):
            check_dominance(est, certified_bound(cfg), slack=3)


class TestFitLinearRate:
    def test_deterministic_contraction_recovers_squared_factor(self):
        c = 0.6
        raw = tiny_config(**{
            "problem.gains": [c, c],
            "sweeping.kind": "all_blocks",
            "experiment.horizon": 60,
            "experiment.runs": 1,
        })
        est = monte_carlo(parse_config(raw))
        fit = fit_linear_rate(est, (5, 55))
        assert not fit.degenerate
        assert fit.ratio == pytest.approx(c * c, abs=1e-6)

    def test_uniform_law_rate_below_formula(self):
        cfg = load_benchmark("rate_uniform")
        raw = cfg.raw
        raw["experiment"]["runs"] = 200
        raw["experiment"]["horizon"] = 120
        est = monte_carlo(parse_config(raw))
        fit = fit_linear_rate(est, (10, 110))
        p = 4 / 7
        assert fit.ratio <= 1 - p * (1 - 0.25) + 0.02

    def test_exact_zero_window_flagged(self, constant_family):
        raw = tiny_config(**{"sweeping.kind": "all_blocks"})
        cfg = parse_config(raw)
        est = monte_carlo(cfg)
        # beyond the first step the all-blocks run sits near machine zero;
        # force exact zeros to exercise the flag
        frozen = np.zeros_like(est.mean_plain)
        zeroed = type(est)(
            mean_weighted=frozen, se_weighted=est.se_weighted,
            mean_plain=frozen, se_plain=est.se_plain,
            runs=est.runs, weights=est.weights,
        )
        fit = fit_linear_rate(zeroed, (0, 4))
        assert fit.degenerate
        assert fit.ratio == 0.0

    def test_window_validation(self):
        cfg = parse_config(tiny_config())
        est = monte_carlo(cfg)
        with pytest.raises(ValueError):
            fit_linear_rate(est, (3, 50))
        with pytest.raises(ValueError):
            fit_linear_rate(est, (2, 3))


class TestRateRatioCurves:
    def test_endpoint_and_reference_values(self):
        grid = np.concatenate(([1e-4], np.linspace(0.01, 1.0, 100)))
        rows = rate_ratio_curves([0.2, 0.5], grid)
        at_one = rows[np.isclose(rows[:, 1], 1.0)]
        assert np.allclose(at_one[:, 2], 1.0)
        small_p = rows[(rows[:, 0] == 0.2) & (rows[:, 1] == 1e-4)]
        assert small_p[0, 2] == pytest.approx(0.4971, abs=1e-3)

    def test_monotone_in_activation_per_curve(self):
        grid = np.linspace(0.05, 1.0, 60)
        rows = rate_ratio_curves([0.3, 0.7, 0.9], grid)
        for chi in (0.3, 0.7, 0.9):
            curve = rows[rows[:, 0] == chi][:, 2]
            assert np.all(np.diff(curve) >= -1e-15)

    def test_within_certified_bounds(self):
        from blocksweep import normalized_rate_ratio_bounds

        rows = rate_ratio_curves([0.4], np.linspace(0.01, 1.0, 50))
        lo, hi = normalized_rate_ratio_bounds(0.4)
        assert np.all(rows[:, 2] >= lo - 1e-12)
        assert np.all(rows[:, 2] <= hi + 1e-12)

    def test_domain_validation(self):
        with pytest.raises(ValueError):
            rate_ratio_curves([0.0], [0.5])
        with pytest.raises(ValueError):
            rate_ratio_curves([0.5], [0.0])


class TestCsvRoundTrips:
    def test_trajectory_round_trip(self, tmp_path):
        from blocksweep import NoError, run_trajectory

        cfg = parse_config(tiny_config())
        traj = run_trajectory(cfg.family, cfg.law, cfg.schedules, NoError(),
                              cfg.x0, cfg.seed, weights=cfg.weights)
        path = csvio.write_trajectory(tmp_path / "t.csv", traj)
        cols = csvio.read_columns(path, text_columns=("mask",))
        assert np.array_equal(cols["sq_error"], traj.sq_error)
        assert np.array_equal(cols["weighted_sq_error"], traj.weighted_sq_error)
        masks = ["".join("1" if b else "0" for b in row) for row in traj.masks]
        assert cols["mask"][:-1] == masks
        assert cols["mask"][-1] == ""

    def test_estimate_round_trip_including_nan(self, tmp_path):
        cfg = parse_config(tiny_config(**{"experiment.runs": 1}))
        est = monte_carlo(cfg)
        path = csvio.write_estimate(tmp_path / "e.csv", est)
        cols = csvio.read_columns(path)
        assert np.array_equal(cols["mean_weighted_sq_error"], est.mean_weighted)
        assert np.array_equal(cols["se_sq_error"], est.se_plain, equal_nan=True)

    def test_bound_round_trip_with_row_shift(self, tmp_path):
        cfg = load_benchmark("exact2")
        bound = certified_bound(cfg)
        path = csvio.write_bound(tmp_path / "b.csv", bound)
        cols = csvio.read_columns(path)
        assert np.array_equal(cols["bound"], bound.bound)
        assert cols["chi_n"][0] == 1.0
        assert np.array_equal(cols["chi_n"][1:], bound.chi)
        assert cols["eta_bar_n"][0] == 0.0
        assert np.array_equal(cols["eta_bar_n"][1:], bound.eta_bar)

    def test_rate_curves_round_trip(self, tmp_path):
        rows = rate_ratio_curves([0.2], np.linspace(0.1, 1.0, 10))
        path = csvio.write_rate_curves(tmp_path / "f.csv", rows)
        cols = csvio.read_columns(path)
        assert np.array_equal(cols["ratio"], rows[:, 2])
        assert np.array_equal(cols["p"], rows[:, 1])

    def test_full_precision_values_survive(self, tmp_path):
        values = np.array([1 / 3, np.pi, 1e-300, 1.0 + 2**-52])
        path = csvio.write_columns(tmp_path / "p.csv", ["v"], [values])
        cols = csvio.read_columns(path)
        assert np.array_equal(cols["v"], values)
