"""Tests for subcommand orchestration."""

from __future__ import annotations

import math

import pytest

from bpire.const import EXIT_RUNTIME, EXIT_USAGE, EXIT_VALIDATION, KS_CRITICAL_1PCT
from bpire.coordinator import (
    RELATION_ABOVE,
    RELATION_BELOW,
    ExperimentCoordinator,
    RunOutcome,
    _ks_tolerance,
    make_check,
)
from bpire.exceptions import RunFailedError, UsageError


def test_make_check_relations():
    assert make_check("close", 1.04, 1.0, 0.05).passed
    assert not make_check("close", 1.06, 1.0, 0.05).passed
    assert make_check("below", 0.01, 0.03, relation=RELATION_BELOW).passed
    assert not make_check("above", 0.0, 0.0, relation=RELATION_ABOVE).passed
    assert not make_check("nan", math.nan, math.nan).passed


def test_outcome_passed():
    outcome = RunOutcome(checks=[make_check("a", 1.0, 1.0), make_check("b", 2.0, 1.0)])
    assert not outcome.passed
    assert RunOutcome().passed


def test_ks_tolerance():
    assert _ks_tolerance(0.03, 1_000_000) == 0.03
    assert _ks_tolerance(0.03, 100) == pytest.approx(KS_CRITICAL_1PCT / 10)


def test_unknown_budget(tmp_path):
    with pytest.raises(UsageError):
        ExperimentCoordinator(tmp_path, seed=1, budget="huge")


def test_unknown_subcommand(tmp_path):
    coordinator = ExperimentCoordinator(tmp_path, seed=1)
    with pytest.raises(RunFailedError) as err:
        coordinator.run("plot", "ENV-A", {})
    assert err.value.exit_code == EXIT_USAGE


def test_unknown_preset_name_is_a_missing_file(tmp_path):
    coordinator = ExperimentCoordinator(tmp_path, seed=1)
    with pytest.raises(RunFailedError) as err:
        coordinator.run("kappa", "ENV-Z", {})
    assert err.value.exit_code == EXIT_VALIDATION


def test_runtime_failure(tmp_path):
    coordinator = ExperimentCoordinator(tmp_path, seed=1)
    # count too small for the exceedance thresholds of the tail estimators
    with pytest.raises(RunFailedError) as err:
        coordinator.run(
            "tails", "ENV-A", {"count": 1000, "hill_k": 10, "path_count": 1, "path_length": 100}
        )
    assert err.value.exit_code == EXIT_RUNTIME


def test_kappa_run_writes_files(tmp_path):
    outcome = ExperimentCoordinator(tmp_path, seed=1).run("kappa", "ENV-B", {})
    assert outcome.results["kappa"] == pytest.approx(1.0, abs=1e-9)
    assert outcome.results["regime"] == "eq1"
    assert outcome.results["tilted_probs"] == pytest.approx([1 / 3, 2 / 3])
    assert sorted(path.name for path in outcome.files) == ["kappa.json", "manifest.json"]
    assert not outcome.checks
