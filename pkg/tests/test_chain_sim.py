"""Tests for chain simulation and the exact oracles."""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from bpire.chain_sim import (
    backward_series_law_exact,
    bias_exponent,
    evolve,
    fixed_point_residual,
    forward_law_exact,
    recommended_burnin,
    sample_stationary,
    simulate_forward,
    stationary_law_capped,
    stationary_paths,
    step,
    stretch_statistics,
)
from bpire.const import STATE_LIMIT
from bpire.data import ChainConfig
from bpire.env_model import Deterministic, Geometric, from_components
from bpire.exceptions import BurnInTooSmallWarning, DomainError, OverflowGuardError
from bpire.utils import task_rng


@pytest.mark.parametrize("steps", [1, 2, 3])
def test_forward_equals_backward_series(micro, steps):
    forward = forward_law_exact(micro, steps)
    backward = backward_series_law_exact(micro, steps)
    assert forward == backward
    assert sum(forward.values()) == Fraction(1)


def test_forward_law_one_step(micro):
    # X_1 = B: immigration 0 or 1 on atom 0, always 1 on atom 1
    assert forward_law_exact(micro, 1) == {0: Fraction(1, 4), 1: Fraction(3, 4)}


def test_forward_law_from_initial(micro):
    law = forward_law_exact(micro, 1, initial=2)
    assert sum(law.values()) == Fraction(1)
    assert max(law) == 5


def test_evolve_deterministic_chain(rng):
    model = from_components([(Deterministic(0), Deterministic(1))], [1.0])
    states = np.array([0, 5, 100], dtype=np.int64)
    np.testing.assert_array_equal(evolve(states, model, rng), [1, 1, 1])


def test_evolve_keeps_immigration(env_a, rng):
    # immigration is 1 on both atoms, so no state drops below 1
    out = evolve(np.zeros(1000, dtype=np.int64), env_a, rng)
    assert (out == 1).all()
    out = evolve(out, env_a, rng)
    assert (out >= 1).all()


def test_overflow_guard(env_a, rng):
    with pytest.raises(OverflowGuardError):
        evolve(np.array([STATE_LIMIT], dtype=np.int64), env_a, rng)


@pytest.mark.parametrize("seed", range(20))
def test_overflow_guard_on_supercritical_chain(seed):
    # E log m = log 2 > 0, so the chain grows geometrically
    model = from_components([(Geometric(1 / 3), Deterministic(1))], [1.0])
    with pytest.raises(OverflowGuardError):
        simulate_forward(ChainConfig(model=model, seed=seed), 10_000)


def test_step_rejects_negative(env_a, rng):
    with pytest.raises(DomainError):
        step(-1, env_a, rng)
    assert step(0, env_a, rng) == 1


def test_simulate_forward_reproducible(env_a):
    config = ChainConfig(model=env_a, initial_value=0, burn_in=10, seed=7)
    first = simulate_forward(config, 50)
    second = simulate_forward(config, 50)
    np.testing.assert_array_equal(first.values, second.values)
    assert first.values.size == 50
    assert first.start_index == 11
    assert (first.values >= 1).all()


def test_simulate_forward_zero_burnin(env_a):
    sample = simulate_forward(ChainConfig(model=env_a, seed=1), 5)
    assert sample.start_index == 1
    assert sample.values[0] == 1


def test_simulate_forward_bad_arguments(env_a):
    with pytest.raises(DomainError):
        simulate_forward(ChainConfig(model=env_a), 0)
    with pytest.raises(DomainError):
        simulate_forward(ChainConfig(model=env_a, burn_in=-1), 5)


def test_recommended_burnin_env_a(env_a):
    # lambda(1) = 0.8 is the minimum on (0, 1]
    burn_in = recommended_burnin(env_a, 2.0)
    assert burn_in == 62
    exponent, alpha_star = bias_exponent(env_a, burn_in)
    assert exponent <= np.log(1e-6)
    assert alpha_star == pytest.approx(1.0, abs=1e-4)


def test_sample_stationary_warns_on_short_burnin(env_a):
    with pytest.warns(BurnInTooSmallWarning):
        batch = sample_stationary(env_a, 2, 100, seed=3)
    assert batch.bias_bound > 1e-6


def test_sample_stationary_record(env_a):
    batch = sample_stationary(env_a, recommended_burnin(env_a, 2.0), 1000, seed=3)
    assert len(batch) == 1000
    assert batch.values.dtype == np.int64
    assert batch.model_fingerprint == env_a.fingerprint()
    assert batch.bias_bound <= 1e-6
    assert "values" not in batch.as_dict()


def test_sample_stationary_is_deterministic(env_a):
    burn_in = recommended_burnin(env_a, 2.0)
    first = sample_stationary(env_a, burn_in, 10_000, seed=11)
    second = sample_stationary(env_a, burn_in, 10_000, seed=11)
    other = sample_stationary(env_a, burn_in, 10_000, seed=12)
    np.testing.assert_array_equal(first.values, second.values)
    assert not np.array_equal(first.values, other.values)


def test_sample_stationary_independent_of_workers(env_a):
    burn_in = recommended_burnin(env_a, 2.0)
    serial = sample_stationary(env_a, burn_in, 10_000, seed=5, workers=1)
    parallel = sample_stationary(env_a, burn_in, 10_000, seed=5, workers=2)
    np.testing.assert_array_equal(serial.values, parallel.values)


def test_fixed_point_residual_small(env_a):
    batch = sample_stationary(env_a, recommended_burnin(env_a, 2.0), 50_000, seed=2)
    assert fixed_point_residual(env_a, batch) < 0.02


def test_fixed_point_residual_detects_transient(env_a):
    zeros = np.zeros(5000, dtype=np.int64)
    assert fixed_point_residual(env_a, zeros, task_rng(0, 0, 0)) == pytest.approx(1.0)


def test_fixed_point_residual_empty(env_a):
    with pytest.raises(DomainError):
        fixed_point_residual(env_a, np.empty(0, dtype=np.int64))


def test_fixed_point_residual_shrinks_with_burnin(env_a):
    residuals = []
    with pytest.warns(BurnInTooSmallWarning):
        for burn_in in (1, 2, 4, 8):
            batch = sample_stationary(env_a, burn_in, 50_000, seed=4)
            residuals.append(fixed_point_residual(env_a, batch))
    assert residuals == sorted(residuals, reverse=True)
    assert residuals[0] > 2 * residuals[-1]


def test_stationary_law_capped_matches_simulation(env_a):
    support, probs = stationary_law_capped(env_a, cap=300)
    assert probs.sum() == pytest.approx(1.0, abs=1e-9)
    assert probs[0] == pytest.approx(0.0, abs=1e-12)
    batch = sample_stationary(env_a, recommended_burnin(env_a, 2.0), 50_000, seed=9)
    for value in (1, 2, 3):
        empirical = float(np.mean(batch.values == value))
        assert empirical == pytest.approx(probs[support == value][0], abs=0.01)


def test_stationary_paths_shape_and_determinism(env_a):
    first = stationary_paths(env_a, count=20, length=30, burn_in=62, seed=4)
    second = stationary_paths(env_a, count=20, length=30, burn_in=62, seed=4, workers=2)
    assert first.shape == (20, 30)
    np.testing.assert_array_equal(first, second)


def test_stretch_statistics(env_a):
    sums, maxima, first = stretch_statistics(env_a, n=25, reps=300, burn_in=62, seed=6)
    assert sums.shape == maxima.shape == first.shape == (300,)
    assert (sums >= maxima).all()
    assert (maxima >= first).all()
    assert (sums >= 25).all()


def test_stretch_statistics_bad_length(env_a):
    with pytest.raises(DomainError):
        stretch_statistics(env_a, n=0, reps=10, burn_in=1, seed=0)
