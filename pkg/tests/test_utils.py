"""Tests for the shared helpers."""

from __future__ import annotations

import numpy as np
import pytest

from bpire.const import DEFAULT_SEED, KS_CRITICAL_1PCT
from bpire.utils import (
    build_data_and_options,
    discrete_ks,
    fingerprint,
    ks_critical_value,
    run_tasks,
    split_tasks,
    task_rng,
    to_builtin,
)


def _square(x: int) -> int:
    return x * x


def test_build_data_and_options():
    data, options = build_data_and_options(
        {"seed": None, "workers": 3, "budget": "full", "count": 10}
    )
    assert data == {"count": 10}
    assert options == {"seed": DEFAULT_SEED, "workers": 3, "budget": "full"}


@pytest.mark.parametrize(
    ("total", "per_task", "sizes"),
    [(10, 4, [4, 4, 2]), (8, 4, [4, 4]), (3, 4, [3]), (0, 4, [])],
)
def test_split_tasks(total, per_task, sizes):
    assert split_tasks(total, per_task) == sizes


def test_run_tasks_keeps_order():
    tasks = [(i,) for i in range(6)]
    assert run_tasks(_square, tasks, 1) == [0, 1, 4, 9, 16, 25]
    assert run_tasks(_square, tasks, 2) == [0, 1, 4, 9, 16, 25]


def test_task_rng_streams():
    first = task_rng(1, 2, 3).random(5)
    np.testing.assert_array_equal(first, task_rng(1, 2, 3).random(5))
    assert not np.array_equal(first, task_rng(1, 2, 4).random(5))
    assert not np.array_equal(first, task_rng(1, 3, 3).random(5))


def test_fingerprint_ignores_key_order():
    assert fingerprint({"a": 1, "b": [1, 2]}) == fingerprint({"b": [1, 2], "a": 1})
    assert fingerprint({"a": 1}) != fingerprint({"a": 2})


def test_to_builtin():
    value = to_builtin({1: np.int64(3), "x": (np.float64(0.5), np.arange(2))})
    assert value == {"1": 3, "x": [0.5, [0, 1]]}
    assert type(value["1"]) is int


def test_ks_critical_value():
    assert ks_critical_value(100, 100, KS_CRITICAL_1PCT) == pytest.approx(
        KS_CRITICAL_1PCT * np.sqrt(0.02)
    )


def test_discrete_ks():
    support = np.array([0, 1, 2])
    probs = np.array([0.25, 0.5, 0.25])
    assert discrete_ks(np.array([0, 1, 1, 2]), support, probs) == pytest.approx(0.0)
    assert discrete_ks(np.array([2, 2, 2, 2]), support, probs) == pytest.approx(0.75)
