"""Tests for lambda and the Cramer root."""

from __future__ import annotations

import math
import time

import numpy as np
import pytest

from bpire.cramer import (
    cramer_lambda,
    lambda_prime,
    lattice_span,
    mean_log_m,
    min_lambda,
    moment_condition_check,
    solve_kappa,
)
from bpire.env_model import (
    Deterministic,
    EnvironmentModel,
    Geometric,
    Poisson,
    from_components,
    preset_model,
    two_point_environment,
)
from bpire.exceptions import DomainError, NoCramerRootError, NotSubcriticalError


@pytest.mark.parametrize(
    ("name", "kappa"),
    [("ENV-A", 2.0), ("ENV-B", 1.0), ("ENV-C", 0.5), ("ENV-D", 3.0), ("ENV-E", 1.5)],
)
def test_solve_kappa_presets(name, kappa):
    start = time.perf_counter()
    report = solve_kappa(preset_model(name))
    assert time.perf_counter() - start < 1.0
    assert report.kappa == pytest.approx(kappa, abs=1e-9)
    assert report.subcritical
    assert report.lambda_prime_at_kappa > 0.0
    assert report.mean_log_m < 0.0


def test_solve_kappa_non_lattice(poisson_model):
    report = solve_kappa(poisson_model)
    assert cramer_lambda(poisson_model, report.kappa) == pytest.approx(1.0, abs=1e-10)
    assert report.nonarithmetic_hint
    assert report.lattice_span is None


def test_lattice_span_two_point(env_a):
    assert lattice_span(env_a) == pytest.approx(math.log(2.0), abs=1e-9)
    report = solve_kappa(env_a)
    assert not report.nonarithmetic_hint


def test_lambda_at_zero_is_one(env_a, poisson_model):
    assert cramer_lambda(env_a, 0.0) == pytest.approx(1.0)
    assert cramer_lambda(poisson_model, 0.0) == pytest.approx(1.0)


def test_lambda_with_zero_mean_atom():
    model = from_components(
        [(Deterministic(0), Deterministic(1)), (Geometric(0.2), Deterministic(1))],
        [0.5, 0.5],
    )
    assert cramer_lambda(model, 0.0) == pytest.approx(1.0)
    assert cramer_lambda(model, 1.0) == pytest.approx(0.5 * 4.0)
    assert mean_log_m(model) == -math.inf
    assert solve_kappa(model).kappa == pytest.approx(0.5, abs=1e-9)


def test_negative_alpha(env_a):
    with pytest.raises(DomainError):
        cramer_lambda(env_a, -1.0)
    with pytest.raises(DomainError):
        lambda_prime(env_a, -0.5)


def test_lambda_prime_matches_difference(env_b):
    h = 1e-6
    numeric = (cramer_lambda(env_b, 1.0 + h) - cramer_lambda(env_b, 1.0 - h)) / (2 * h)
    assert lambda_prime(env_b, 1.0) == pytest.approx(numeric, rel=1e-6)


def test_not_subcritical():
    # E log m = 0.2 log 0.5 + 0.8 log 2 > 0
    model = from_components(
        [(Geometric(2 / 3), Deterministic(1)), (Geometric(1 / 3), Deterministic(1))],
        [0.2, 0.8],
    )
    with pytest.raises(NotSubcriticalError):
        solve_kappa(model)


def test_no_root_when_every_mean_below_one():
    model = from_components(
        [(Geometric(2 / 3), Deterministic(1)), (Poisson(0.8), Deterministic(1))],
        [0.5, 0.5],
    )
    with pytest.raises(NoCramerRootError):
        solve_kappa(model)


def test_no_root_in_bracket():
    # kappa far above the bracket limit
    model = two_point_environment(100.0, low=0.5, high=1.01)
    with pytest.raises(NoCramerRootError):
        solve_kappa(model)


def test_min_lambda_env_a(env_a):
    alpha_star, value = min_lambda(env_a, 1.0)
    assert alpha_star == pytest.approx(1.0, abs=1e-4)
    assert value == pytest.approx(0.8, abs=1e-9)


def test_min_lambda_interior(env_b):
    # 2/3 2^-a + 1/3 2^a is smallest at a = 1/2
    alpha_star, value = min_lambda(env_b, 1.0)
    assert alpha_star == pytest.approx(0.5, abs=1e-4)
    assert value == pytest.approx(2.0 * math.sqrt(2.0) / 3.0, abs=1e-9)


def test_min_lambda_bad_upper(env_a):
    with pytest.raises(DomainError):
        min_lambda(env_a, 0.0)


def test_moment_condition(env_a):
    assert moment_condition_check(env_a, 1.0)
    assert not moment_condition_check(env_a, 2.5)
    assert not moment_condition_check(env_a, 0.0)


@pytest.mark.parametrize("name", ["ENV-A", "ENV-C", "ENV-E"])
def test_log_lambda_is_convex(name):
    model = preset_model(name)
    alphas = np.linspace(0.05, 4.0, 80)
    logs = np.log([cramer_lambda(model, a) for a in alphas])
    assert (np.diff(logs, 2) >= -1e-12).all()


def test_log_lambda_convex_non_lattice(poisson_model):
    logs = np.log([cramer_lambda(poisson_model, a) for a in np.linspace(0.1, 3.0, 60)])
    assert (np.diff(logs, 2) >= -1e-12).all()


def test_kappa_ignores_atom_order_and_splits(poisson_model):
    kappa = solve_kappa(poisson_model).kappa
    atoms, probs = poisson_model.atoms, poisson_model.probs
    reordered = EnvironmentModel(atoms=atoms[::-1], probs=probs[::-1])
    split = EnvironmentModel(
        atoms=(atoms[0], atoms[0], *atoms[1:]),
        probs=(probs[0] / 3, 2 * probs[0] / 3, *probs[1:]),
    )
    assert solve_kappa(reordered).kappa == pytest.approx(kappa, abs=1e-8)
    assert solve_kappa(split).kappa == pytest.approx(kappa, abs=1e-8)
