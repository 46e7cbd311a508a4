"""Tests for tail estimators and the tail process."""

from __future__ import annotations

import math

import numpy as np
import pytest

from bpire.chain_sim import recommended_burnin, sample_stationary, stationary_paths
from bpire.const import GOLDIE_C_KAPPA_ONE
from bpire.cramer import solve_kappa
from bpire.exceptions import (
    DegenerateTailError,
    DomainError,
    InsufficientExceedancesError,
    TooFewExceedancesError,
)
from bpire.tail_analysis import (
    anticlustering_diagnostic,
    default_window,
    goldie_c_formula,
    hill_estimator,
    plateau_grid,
    reference_ratio_law,
    spectral_ratio_test,
    tail_plateau,
    tail_report,
)
from bpire.utils import task_rng


def _pareto(kappa: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """P(X > x) = x^-kappa on [1, inf)."""
    return (1.0 - rng.random(size)) ** (-1.0 / kappa)


def test_hill_on_pareto(rng):
    values = _pareto(2.0, 200_000, rng)
    kappa_hat, std_err = hill_estimator(values, 5000)
    assert kappa_hat == pytest.approx(2.0, abs=4 * std_err)
    assert std_err == pytest.approx(kappa_hat / math.sqrt(5000))


def test_hill_is_scale_invariant(rng):
    values = _pareto(1.5, 50_000, rng)
    kappa_hat, _ = hill_estimator(values, 1000)
    scaled_hat, _ = hill_estimator(7.0 * values, 1000)
    assert abs(scaled_hat - kappa_hat) < 1e-12


def test_hill_degenerate():
    with pytest.raises(DegenerateTailError):
        hill_estimator(np.full(100, 7.0), 10)


@pytest.mark.parametrize("k", [0, 100, 500])
def test_hill_bad_k(k):
    with pytest.raises(DomainError):
        hill_estimator(np.arange(1.0, 101.0), k)


def test_hill_needs_positive_threshold():
    values = np.concatenate([np.zeros(90), np.arange(1.0, 11.0)])
    with pytest.raises(DomainError):
        hill_estimator(values, 10)


def test_plateau_on_pareto(rng):
    values = _pareto(1.0, 1_000_000, rng)
    c_hat = tail_plateau(values, 1.0, (10.0, 100.0))
    assert c_hat == pytest.approx(1.0, abs=0.05)


def test_plateau_uses_sample_size(rng):
    values = np.sort(_pareto(1.0, 200_000, rng))
    full = tail_plateau(values, 1.0, (10.0, 100.0))
    upper = tail_plateau(values[values > 5.0], 1.0, (10.0, 100.0), sample_size=values.size)
    assert upper == pytest.approx(full)


def test_plateau_insufficient(rng):
    values = _pareto(1.0, 1000, rng)
    with pytest.raises(InsufficientExceedancesError):
        tail_plateau(values, 1.0, (100.0, 1000.0))


def test_plateau_grid_covers_whole_periods():
    grid = plateau_grid((1.0, 10.0), lattice_period=2.0)
    # three periods of 2 fit in a decade
    assert grid.min() > 1.0
    assert grid.max() < 8.0
    logs = np.log(grid)
    np.testing.assert_allclose(np.diff(logs), np.diff(logs)[0])


def test_plateau_grid_bad_window():
    with pytest.raises(DomainError):
        plateau_grid((10.0, 1.0))


def test_default_window(rng):
    values = _pareto(1.0, 100_000, rng)
    low, high = default_window(values)
    assert high == pytest.approx(10.0 * low)
    assert int(np.sum(values > high)) == 1000


def test_reference_ratio_law_forward(env_a):
    assert reference_ratio_law(env_a, 2.0, 1) == pytest.approx({0.5: 0.8, 2.0: 0.2})
    assert reference_ratio_law(env_a, 2.0, 2) == pytest.approx(
        {0.25: 0.64, 1.0: 0.32, 4.0: 0.04}
    )


def test_reference_ratio_law_backward(env_a):
    # tilted law puts 1/5 on m = 1/2 and 4/5 on m = 2; ratios are 1/m*
    assert reference_ratio_law(env_a, 2.0, -1) == pytest.approx({0.5: 0.8, 2.0: 0.2})
    assert reference_ratio_law(env_a, 2.0, 0) == {1.0: 1.0}


def test_reference_ratio_law_backward_env_b(env_b):
    assert reference_ratio_law(env_b, 1.0, -1) == pytest.approx({0.5: 2 / 3, 2.0: 1 / 3})


def _convolve_log(first: dict[float, float], second: dict[float, float]) -> dict[float, float]:
    out: dict[float, float] = {}
    for a, p in first.items():
        for b, q in second.items():
            key = round(a * b, 9)
            out[key] = out.get(key, 0.0) + p * q
    return out


@pytest.mark.parametrize("lag", [2, 3, -2, -3])
def test_reference_ratio_law_is_lag_one_convolution(poisson_model, lag):
    kappa = solve_kappa(poisson_model).kappa
    one = reference_ratio_law(poisson_model, kappa, 1 if lag > 0 else -1)
    expected = one
    for _ in range(abs(lag) - 1):
        expected = _convolve_log(expected, one)
    law = {
        round(ratio, 9): prob
        for ratio, prob in reference_ratio_law(poisson_model, kappa, lag).items()
    }
    assert law.keys() == expected.keys()
    for ratio, prob in expected.items():
        assert law[ratio] == pytest.approx(prob, abs=1e-12)


def test_goldie_needs_values(env_b, rng):
    with pytest.raises(DomainError):
        goldie_c_formula(env_b, 1.0, np.array([3]), rng)


def test_spectral_bad_quantile(env_a):
    with pytest.raises(DomainError):
        spectral_ratio_test(env_a, 2.0, 1, np.ones((2, 100)), threshold_quantile=0.5)


def test_spectral_too_few(env_a, rng):
    paths = rng.integers(1, 1000, size=(2, 1000))
    with pytest.raises(TooFewExceedancesError):
        spectral_ratio_test(env_a, 2.0, 1, paths)


def test_anticlustering_monotone_and_radius(rng):
    paths = rng.random((4, 20_000))
    probs = anticlustering_diagnostic(0.99, [1, 5, 20, 200], 100, paths)
    assert probs[1] >= probs[5] >= probs[20]
    assert probs[200] == 0.0
    # i.i.d. uniform: window of 2 (r - k + 1) points each above u w.p. 0.01
    assert probs[1] == pytest.approx(1.0 - 0.99**200, abs=0.05)


def test_anticlustering_isolated_exceedances():
    paths = np.zeros((1, 40_000))
    paths[0, 300:39_700:150] = 5.0
    probs = anticlustering_diagnostic(1.0, [1, 5], 100, paths)
    assert probs == {1: 0.0, 5: 0.0}


def test_anticlustering_bad_radius():
    with pytest.raises(DomainError):
        anticlustering_diagnostic(1.0, [1], 60, np.zeros((1, 100)))


@pytest.mark.slow
@pytest.mark.parametrize(("name", "kappa", "tol"), [("env_b", 1.0, 0.1), ("env_a", 2.0, 0.2)])
def test_hill_on_stationary_batch(request, name, kappa, tol):
    model = request.getfixturevalue(name)
    batch = sample_stationary(model, recommended_burnin(model, kappa), 1_000_000, seed=21)
    kappa_hat, _ = hill_estimator(batch, 10_000)
    assert kappa_hat == pytest.approx(kappa, abs=tol)


@pytest.mark.slow
def test_goldie_constant_kappa_one(env_b):
    batch = sample_stationary(env_b, recommended_burnin(env_b, 1.0), 1_000_000, seed=22)
    report = tail_report(env_b, batch, 10_000, task_rng(22, 8, 0))
    assert report.lattice_period == pytest.approx(2.0)
    assert report.plateau_c == pytest.approx(GOLDIE_C_KAPPA_ONE, rel=0.15)
    assert report.goldie.value == pytest.approx(GOLDIE_C_KAPPA_ONE, rel=0.15)


@pytest.mark.slow
def test_spectral_tail_process_env_a(env_a):
    paths = stationary_paths(env_a, 100, 100_000, recommended_burnin(env_a, 2.0), seed=23)
    forward = spectral_ratio_test(env_a, 2.0, 1, paths)
    backward = spectral_ratio_test(env_a, 2.0, -1, paths)
    assert forward.exceedances >= 5000
    assert forward.ks_distance < 0.03
    assert backward.ks_distance < 0.03
    assert forward.empirical_ratio_law[0.5] == pytest.approx(0.8, abs=0.03)


@pytest.mark.slow
def test_anticlustering_env_a(env_a):
    paths = stationary_paths(env_a, 100, 100_000, recommended_burnin(env_a, 2.0), seed=24)
    threshold = float(np.quantile(paths, 0.999))
    probs = anticlustering_diagnostic(threshold, [1, 5, 20], 100, paths)
    assert probs[1] >= probs[5] >= probs[20]
    assert probs[20] < 0.05
