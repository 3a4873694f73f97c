import json
import math

import numpy as np
import pytest

from multisecretary.core_math import offline_value
from multisecretary.dp import solve_myopic, solve_optimal
from multisecretary.simulate import (GENERATOR_VERSION, SimConfig, _chunk, estimate_regret,
                                     hindsight_value, run_policy, sample_path, sample_paths,
                                     summary_from_json, summary_to_json)
from multisecretary.walk import expected_mistakes, forward_distribution


@pytest.fixture(scope="module")
def opt200():
    return solve_optimal(200)


@pytest.fixture(scope="module")
def myo200():
    return solve_myopic(200)


def test_sample_path_is_reproducible():
    a = sample_path(50, seed=11, replicate=3)
    np.testing.assert_array_equal(a, sample_path(50, seed=11, replicate=3))
    assert not np.array_equal(a, sample_path(50, seed=11, replicate=4))
    assert not np.array_equal(a, sample_path(50, seed=12, replicate=3))
    np.testing.assert_array_equal(sample_paths(50, 11, 2, 5)[1], a)


def test_sample_path_is_uniform():
    x = sample_path(10**6, seed=2024)
    assert x.min() >= 0.0 and x.max() < 1.0
    assert abs(x.mean() - 0.5) <= 0.002
    assert abs((x <= 0.25).mean() - 0.25) <= 0.002


def test_run_policy_hand_traces():
    tab = solve_optimal(2)
    hired, value = run_policy([0.3, 0.6], tab, 1)
    assert hired.tolist() == [False, True] and value == pytest.approx(0.6)
    assert hindsight_value([0.3, 0.6], 1) - value == pytest.approx(0.0)
    hired, value = run_policy([0.6, 0.9], tab, 1)
    assert hired.tolist() == [True, False] and value == pytest.approx(0.6)
    assert hindsight_value([0.6, 0.9], 1) - value == pytest.approx(0.3)


def test_run_policy_forced_hires():
    path = sample_path(9, seed=1)
    for policy in (solve_optimal(9), 1.0, 0.0):
        hired, value = run_policy(path, policy, 9)
        assert hired.all() and value == pytest.approx(path.sum())
    hired, _ = run_policy(path, 1.0, 3)
    assert hired.tolist() == [False] * 6 + [True] * 3
    with pytest.raises(ValueError):
        run_policy(path, 0.5, 10)


def test_run_policy_always_fills_every_position(opt200):
    for rep in range(20):
        path = sample_path(60, seed=5, replicate=rep)
        hired, _ = run_policy(path, opt200, 23)
        assert hired.sum() == 23


def test_hindsight_value():
    assert hindsight_value([0.3, 0.6], 1) == pytest.approx(0.6)
    assert hindsight_value([0.1, 0.9, 0.5], 2) == pytest.approx(1.4)
    assert hindsight_value([0.1, 0.9, 0.5], 0) == 0.0
    with pytest.raises(ValueError):
        hindsight_value([0.1], 2)


def test_hindsight_mean_for_two_applicants():
    paths = sample_paths(2, 99, 0, 200_000)
    best = paths.max(axis=1)
    se = best.std(ddof=1) / math.sqrt(best.size)
    assert abs(best.mean() - 2 / 3) <= 3 * se


def test_pathwise_dominance(opt200):
    for rep in range(200):
        path = sample_path(30, seed=8, replicate=rep)
        for policy in (opt200, 0.4):
            _, value = run_policy(path, policy, 12)
            assert hindsight_value(path, 12) >= value - 1e-12


def test_vectorised_run_matches_single_path(opt200):
    cfg = SimConfig(25, 10, "optimal", replicates=50, seed=4)
    regret, hires, _ = _chunk(cfg, "table", opt200, 0, 50)
    for i in range(50):
        path = sample_path(25, 4, i)
        _, value = run_policy(path, opt200, 10)
        assert regret[i] == pytest.approx(hindsight_value(path, 10) - value, abs=1e-12)
    assert np.all(hires == 10)


def test_config_validation():
    with pytest.raises(ValueError):
        SimConfig(5, 6)
    with pytest.raises(ValueError):
        SimConfig(5, 2, replicates=0)
    with pytest.raises(ValueError):
        SimConfig(5, 2, policy="fixed")
    with pytest.raises(ValueError):
        SimConfig(5, 2, policy="greedy")
    with pytest.raises(ValueError):
        SimConfig(5, 2, seed=-1)


def test_estimate_requires_matching_tables(opt200):
    with pytest.raises(ValueError):
        estimate_regret(SimConfig(10, 5, "optimal", replicates=10))
    with pytest.raises(ValueError):
        estimate_regret(SimConfig(10, 5, "myopic", replicates=10), opt200)
    with pytest.raises(ValueError):
        estimate_regret(SimConfig(300, 5, "optimal", replicates=10), opt200)


def test_single_replicate_has_undefined_error(opt200):
    s = estimate_regret(SimConfig(10, 5, replicates=1, seed=3), opt200)
    assert math.isnan(s.std_error)
    assert json.loads(summary_to_json(SimConfig(10, 5, replicates=1, seed=3), s))["std_error"] is None


def test_determinism_across_threads(opt200):
    cfg = SimConfig(30, 12, "optimal", replicates=5000, seed=77)
    a = estimate_regret(cfg, opt200, threads=1)
    b = estimate_regret(cfg, opt200, threads=4)
    c = estimate_regret(cfg, opt200, threads=1)
    assert a == b == c
    assert summary_to_json(cfg, a) == summary_to_json(cfg, b)


@pytest.mark.parametrize("policy", ["optimal", "myopic"])
@pytest.mark.parametrize("n,k", [(2, 1), (10, 5), (40, 7)])
def test_monte_carlo_matches_dp(opt200, myo200, policy, n, k):
    tab = opt200 if policy == "optimal" else myo200
    s = estimate_regret(SimConfig(n, k, policy, replicates=40_000, seed=n * 31 + k), tab)
    assert abs(s.mean_regret - tab.regret(n, k)) <= 3 * s.std_error
    assert s.mean_hires == k


@pytest.mark.slow
@pytest.mark.parametrize("policy", ["optimal", "myopic"])
@pytest.mark.parametrize("n,k", [(10, 5), (50, 25), (100, 50), (200, 100)])
def test_monte_carlo_matches_dp_full_grid(opt200, myo200, policy, n, k):
    tab = opt200 if policy == "optimal" else myo200
    s = estimate_regret(SimConfig(n, k, policy, replicates=100_000, seed=20240 + n), tab)
    assert abs(s.mean_regret - tab.regret(n, k)) <= 3 * s.std_error


def test_monte_carlo_mistakes_match_exact_expectation(opt200):
    n, k, reps = 60, 30, 40_000
    cfg = SimConfig(n, k, replicates=reps, seed=606)
    _, _, mistakes = _chunk(cfg, "table", opt200, 0, reps)
    se = mistakes.std(ddof=1) / math.sqrt(reps)
    exact = expected_mistakes(forward_distribution(opt200, n, k), opt200).total
    assert abs(mistakes.mean() - exact) <= 3 * se


def test_fixed_threshold_extremes():
    everyone = estimate_regret(SimConfig(12, 12, "fixed", 0.0, replicates=500, seed=1))
    assert everyone.mean_regret == pytest.approx(0.0, abs=1e-12)
    # threshold 1 never hires voluntarily, so the last k are forced in
    n, k = 20, 4
    s = estimate_regret(SimConfig(n, k, "fixed", 1.0, replicates=40_000, seed=2))
    assert abs(s.mean_regret - (offline_value(n, k) - k / 2)) <= 3 * s.std_error


def test_summary_json_round_trip(opt200):
    cfg = SimConfig(10, 5, "fixed", 0.37, replicates=300, seed=9)
    s = estimate_regret(cfg)
    text = summary_to_json(cfg, s)
    d = json.loads(text)
    assert set(d) >= {"n", "k", "policy", "replicates", "seed", "mean_regret",
                      "std_error", "mean_mistakes", "generator_version"}
    assert d["generator_version"] == GENERATOR_VERSION
    cfg2, s2 = summary_from_json(text)
    assert cfg2 == cfg and s2 == s
