"""Util functions for bpire."""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from typing import TYPE_CHECKING, Any

import numpy as np

from .const import _LOGGER, BUDGET_QUICK, DEFAULT_SEED

if TYPE_CHECKING:
    from collections.abc import Callable, Iterable, Sequence

OPTION_DEFAULTS: dict[str, Any] = {
    "seed": DEFAULT_SEED,
    "workers": 1,
    "budget": BUDGET_QUICK,
}


def build_data_and_options(
    combined_data: dict[str, Any],
) -> tuple[dict[str, Any], dict[str, Any]]:
    """Split combined flags into subcommand data and run options."""
    data = {k: v for k, v in combined_data.items() if k not in OPTION_DEFAULTS}
    options = {
        option: (
            default
            if combined_data.get(option) is None
            else combined_data.get(option)
        )
        for option, default in OPTION_DEFAULTS.items()
    }
    return (data, options)


def task_rng(seed: int, kind: int, index: int) -> np.random.Generator:
    """
    Return the random stream of one task.

    The stream depends only on (master seed, task kind, task index) so adding
    workers never changes results.

    :param seed: master seed
    :param kind: task kind, one of the ``TASK_*`` constants
    :param index: task index within the operation
    :return: PCG64 generator
    """
    return np.random.default_rng(np.random.SeedSequence([seed, kind, index]))


def split_tasks(total: int, per_task: int) -> list[int]:
    """Split ``total`` items into fixed-size tasks, last one possibly short."""
    if total <= 0:
        return []
    full, rest = divmod(total, per_task)
    sizes = [per_task] * full
    if rest:
        sizes.append(rest)
    return sizes


def run_tasks(
    func: Callable[..., Any],
    tasks: Iterable[Sequence[Any]],
    workers: int,
) -> list[Any]:
    """
    Run ``func(*task)`` for every task and return results in task order.

    :param func: module-level (picklable) worker function
    :param tasks: argument tuples
    :param workers: process count; ``<= 1`` runs in-process
    """
    tasks = list(tasks)
    if workers <= 1 or len(tasks) <= 1:
        return [func(*task) for task in tasks]
    _LOGGER.debug("fanning %s tasks out to %s workers", len(tasks), workers)
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, *zip(*tasks, strict=True)))


def fingerprint(payload: Any) -> str:
    """Content hash of a JSON-serializable payload (canonical key order)."""
    text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


def ks_critical_value(n: int, m: int, coefficient: float) -> float:
    """Two-sample KS critical value ``c(alpha) * sqrt((n + m) / (n m))``."""
    return coefficient * float(np.sqrt((n + m) / (n * m)))


def discrete_ks(
    sample: np.ndarray, support: np.ndarray, probs: np.ndarray
) -> float:
    """
    Sup distance between the empirical CDF of a sample and a discrete law.

    Both CDFs are step functions, so evaluating at the union of jump points
    gives the exact supremum.
    """
    sample = np.sort(np.asarray(sample, dtype=float))
    order = np.argsort(support)
    support = np.asarray(support, dtype=float)[order]
    cdf = np.cumsum(np.asarray(probs, dtype=float)[order])
    points = np.union1d(sample, support)
    empirical = np.searchsorted(sample, points, side="right") / sample.size
    idx = np.searchsorted(support, points, side="right") - 1
    reference = np.where(idx >= 0, cdf[np.clip(idx, 0, None)], 0.0)
    return float(np.max(np.abs(empirical - reference)))


def to_builtin(value: Any) -> Any:
    """Convert numpy scalars/arrays (recursively) to JSON-friendly builtins."""
    if isinstance(value, dict):
        return {str(k): to_builtin(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_builtin(v) for v in value]
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    return value
