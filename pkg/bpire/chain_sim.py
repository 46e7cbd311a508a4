"""
Forward simulation of the branching chain with immigration.

X_{n+1} = sum_{i <= X_n} A_i + B, where offspring and immigration share the
environment atom drawn for step n + 1. Batches run as independent vectorized
chains in fixed-size tasks, each with its own seed stream.
"""

from __future__ import annotations

import itertools
import math
import warnings
from fractions import Fraction
from typing import TYPE_CHECKING

import numpy as np
from scipy import stats

from .const import (
    _LOGGER,
    BURNIN_BIAS_WARN,
    CHAINS_PER_TASK,
    DEFAULT_TARGET_BIAS,
    KIND_DETERMINISTIC,
    KIND_FINITE,
    KIND_GEOMETRIC,
    KIND_POISSON,
    PATHS_PER_TASK,
    STATE_LIMIT,
    STRETCHES_PER_TASK,
    TASK_PATHS,
    TASK_RESIDUAL,
    TASK_STATIONARY,
    TASK_STRETCH,
)
from .cramer import min_lambda, solve_kappa
from .data import ChainConfig, StationaryBatch, TrajectorySample
from .env_model import sample_atom_indices
from .exceptions import BurnInTooSmallWarning, DomainError, OverflowGuardError
from .utils import run_tasks, split_tasks, task_rng

if TYPE_CHECKING:
    from .env_model import EnvironmentModel, Law


def _check_states(states: np.ndarray) -> None:
    if states.size and int(states.max()) >= STATE_LIMIT:
        msg = (
            f"chain state {int(states.max())} reached 2^62; "
            "the environment is probably supercritical"
        )
        raise OverflowGuardError(msg)


def evolve(
    states: np.ndarray, model: EnvironmentModel, rng: np.random.Generator
) -> np.ndarray:
    """
    One step of independent chains, one environment draw per chain.

    :param states: current states (int64)
    :return: next states
    """
    states = np.asarray(states, dtype=np.int64)
    _check_states(states)
    idx = sample_atom_indices(model, states.size, rng)
    out = np.empty_like(states)
    try:
        for j, atom in enumerate(model.atoms):
            sel = idx == j
            count = int(sel.sum())
            if not count:
                continue
            out[sel] = atom.offspring.sample_sum(states[sel], rng) + atom.immigration.sample(
                count, rng
            )
    except ValueError as exc:
        # numpy refuses rates beyond int64 range
        msg = f"progeny draw out of range: {exc}"
        raise OverflowGuardError(msg) from exc
    if (out < 0).any():
        msg = "chain state wrapped around int64"
        raise OverflowGuardError(msg)
    _check_states(out)
    return out


def step(x: int, model: EnvironmentModel, rng: np.random.Generator) -> int:
    """Draw X_{n+1} given X_n = x."""
    if x < 0:
        msg = f"state must be nonnegative: {x!r}"
        raise DomainError(msg)
    return int(evolve(np.array([x], dtype=np.int64), model, rng)[0])


def simulate_forward(config: ChainConfig, n: int) -> TrajectorySample:
    """
    Run one chain: discard ``burn_in`` steps, then record ``n`` values.

    Values are recorded after each step, so with ``burn_in=0`` the first
    value is one step from ``initial_value``.
    """
    if n < 1:
        msg = f"trajectory length must be positive: {n!r}"
        raise DomainError(msg)
    if config.burn_in < 0:
        msg = f"burn-in must be nonnegative: {config.burn_in!r}"
        raise DomainError(msg)
    rng = task_rng(config.seed, TASK_PATHS, 0)
    state = np.array([config.initial_value], dtype=np.int64)
    for _ in range(config.burn_in):
        state = evolve(state, config.model, rng)
    values = np.empty(n, dtype=np.int64)
    for i in range(n):
        state = evolve(state, config.model, rng)
        values[i] = state[0]
    return TrajectorySample(values=values, start_index=config.burn_in + 1)


def _stationary_task(
    model: EnvironmentModel, burn_in: int, size: int, seed: int, index: int
) -> np.ndarray:
    rng = task_rng(seed, TASK_STATIONARY, index)
    states = np.zeros(size, dtype=np.int64)
    for _ in range(burn_in):
        states = evolve(states, model, rng)
    return states


def bias_exponent(model: EnvironmentModel, burn_in: int) -> tuple[float, float]:
    """
    Log of the geometric bias bound lambda(alpha*)^H after H steps.

    :return: (exponent, alpha_star)
    """
    kappa = solve_kappa(model).kappa
    alpha_star, lam = min_lambda(model, min(1.0, kappa))
    return burn_in * math.log(lam), alpha_star


def recommended_burnin(
    model: EnvironmentModel, kappa: float, target_bias: float = DEFAULT_TARGET_BIAS
) -> int:
    """Smallest H with H log lambda(alpha*) <= log target_bias."""
    if target_bias >= 1.0:
        return 1
    _, lam = min_lambda(model, min(1.0, kappa))
    return max(1, math.ceil(math.log(target_bias) / math.log(lam)))


def sample_stationary(
    model: EnvironmentModel,
    burn_in: int,
    count: int,
    seed: int,
    workers: int = 1,
) -> StationaryBatch:
    """
    Draw ``count`` approximately stationary values.

    Each value is a chain started at 0 and run ``burn_in`` steps, which is
    exactly the ``burn_in``-term truncation of the backward series.
    """
    exponent, alpha_star = bias_exponent(model, burn_in)
    if exponent > math.log(BURNIN_BIAS_WARN):
        msg = (
            f"burn-in {burn_in} leaves bias bound {math.exp(exponent):.3g} "
            f"above {BURNIN_BIAS_WARN:g}"
        )
        _LOGGER.warning(msg)
        warnings.warn(msg, BurnInTooSmallWarning, stacklevel=2)
    sizes = split_tasks(count, CHAINS_PER_TASK)
    _LOGGER.info(
        "sampling %s stationary values (burn-in %s, %s tasks)", count, burn_in, len(sizes)
    )
    parts = run_tasks(
        _stationary_task,
        [(model, burn_in, size, seed, i) for i, size in enumerate(sizes)],
        workers,
    )
    values = np.concatenate(parts) if parts else np.empty(0, dtype=np.int64)
    return StationaryBatch(
        values=values,
        burn_in=burn_in,
        bias_bound_exponent=exponent,
        seed=seed,
        model_fingerprint=model.fingerprint(),
        alpha_star=alpha_star,
    )


def fixed_point_residual(
    model: EnvironmentModel,
    batch: StationaryBatch | np.ndarray,
    rng: np.random.Generator | None = None,
) -> float:
    """
    KS distance between a batch and the batch pushed one step forward.

    A stationary batch is a fixed point of the one-step law, so the distance
    sits in the KS null band.
    """
    values = batch.values if isinstance(batch, StationaryBatch) else np.asarray(batch)
    if values.size == 0:
        msg = "fixed-point residual needs a nonempty batch"
        raise DomainError(msg)
    if rng is None:
        seed = batch.seed if isinstance(batch, StationaryBatch) else 0
        rng = task_rng(seed, TASK_RESIDUAL, 0)
    evolved = evolve(values, model, rng)
    return float(stats.ks_2samp(values, evolved).statistic)


def _paths_task(
    model: EnvironmentModel,
    paths: int,
    length: int,
    burn_in: int,
    seed: int,
    index: int,
) -> np.ndarray:
    rng = task_rng(seed, TASK_PATHS, index)
    states = np.zeros(paths, dtype=np.int64)
    for _ in range(burn_in):
        states = evolve(states, model, rng)
    out = np.empty((paths, length), dtype=np.int64)
    for t in range(length):
        states = evolve(states, model, rng)
        out[:, t] = states
    return out


def stationary_paths(
    model: EnvironmentModel,
    count: int,
    length: int,
    burn_in: int,
    seed: int,
    workers: int = 1,
) -> np.ndarray:
    """
    Long-chain mode: ``count`` independent stationary paths of ``length``.

    :return: int64 array of shape (count, length)
    """
    sizes = split_tasks(count, PATHS_PER_TASK)
    _LOGGER.info("simulating %s paths of length %s", count, length)
    parts = run_tasks(
        _paths_task,
        [(model, size, length, burn_in, seed, i) for i, size in enumerate(sizes)],
        workers,
    )
    if not parts:
        return np.empty((0, length), dtype=np.int64)
    return np.concatenate(parts, axis=0)


def _stretch_task(
    model: EnvironmentModel,
    reps: int,
    n: int,
    burn_in: int,
    seed: int,
    index: int,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    rng = task_rng(seed, TASK_STRETCH, index)
    states = np.zeros(reps, dtype=np.int64)
    for _ in range(burn_in):
        states = evolve(states, model, rng)
    sums = np.zeros(reps, dtype=float)
    maxima = np.zeros(reps, dtype=np.int64)
    first = np.zeros(reps, dtype=np.int64)
    for t in range(n):
        states = evolve(states, model, rng)
        if t == 0:
            first = states.copy()
        sums += states
        np.maximum(maxima, states, out=maxima)
    return sums, maxima, first


def stretch_statistics(
    model: EnvironmentModel,
    n: int,
    reps: int,
    burn_in: int,
    seed: int,
    workers: int = 1,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Sums, maxima and first values of ``reps`` independent stationary stretches.

    :return: (sums as float64, maxima, first values), each of length ``reps``
    """
    if n < 1:
        msg = f"stretch length must be positive: {n!r}"
        raise DomainError(msg)
    sizes = split_tasks(reps, STRETCHES_PER_TASK)
    parts = run_tasks(
        _stretch_task,
        [(model, size, n, burn_in, seed, i) for i, size in enumerate(sizes)],
        workers,
    )
    if not parts:
        empty = np.empty(0, dtype=np.int64)
        return empty.astype(float), empty, empty
    sums, maxima, first = zip(*parts, strict=True)
    return np.concatenate(sums), np.concatenate(maxima), np.concatenate(first)


# exact oracles on rational probabilities


def _frac(p: float) -> Fraction:
    return Fraction(p).limit_denominator(10**9)


def _convolve(a: dict[int, Fraction], b: dict[int, Fraction]) -> dict[int, Fraction]:
    out: dict[int, Fraction] = {}
    for i, pa in a.items():
        for j, pb in b.items():
            out[i + j] = out.get(i + j, Fraction(0)) + pa * pb
    return out


def _branch(count_law: dict[int, Fraction], offspring: dict[int, Fraction]) -> dict[int, Fraction]:
    """Law of sum_{i <= N} A_i for N ~ count_law."""
    out: dict[int, Fraction] = {}
    power = {0: Fraction(1)}
    for k in range(max(count_law) + 1):
        if k in count_law:
            for v, p in power.items():
                out[v] = out.get(v, Fraction(0)) + count_law[k] * p
        power = _convolve(power, offspring)
    return out


def _exact_atoms(model: EnvironmentModel) -> list[tuple[Fraction, dict, dict]]:
    return [
        (_frac(p), atom.offspring.pmf_exact(), atom.immigration.pmf_exact())
        for atom, p in zip(model.atoms, model.probs, strict=True)
    ]


def _clean(law: dict[int, Fraction]) -> dict[int, Fraction]:
    return {k: v for k, v in sorted(law.items()) if v != 0}


def forward_law_exact(
    model: EnvironmentModel, steps: int, initial: int = 0
) -> dict[int, Fraction]:
    """
    Exact law of X_steps from X_0 = initial.

    Only finite-support laws qualify; probabilities are rationalized.
    """
    atoms = _exact_atoms(model)
    law = {initial: Fraction(1)}
    for _ in range(steps):
        nxt: dict[int, Fraction] = {}
        for p, off, imm in atoms:
            for v, q in _convolve(_branch(law, off), imm).items():
                nxt[v] = nxt.get(v, Fraction(0)) + p * q
        law = nxt
    return _clean(law)


def backward_series_law_exact(model: EnvironmentModel, terms: int) -> dict[int, Fraction]:
    """
    Exact law of the ``terms``-term backward series.

    Enumerates every environment sequence (xi_0, xi_-1, ...); given the
    sequence the immigrant cohorts evolve independently, so their laws
    convolve.
    """
    atoms = _exact_atoms(model)
    total: dict[int, Fraction] = {}
    for seq in itertools.product(range(len(atoms)), repeat=terms):
        weight = math.prod((atoms[j][0] for j in seq), start=Fraction(1))
        law = {0: Fraction(1)}
        for i in range(terms):
            cohort = atoms[seq[i]][2]
            for j in reversed(seq[:i]):
                cohort = _branch(cohort, atoms[j][1])
            law = _convolve(law, cohort)
        for v, q in law.items():
            total[v] = total.get(v, Fraction(0)) + weight * q
    return _clean(total)


def _sum_pmf(law: Law, count: int, size: int) -> np.ndarray:
    """pmf on {0..size-1} of the sum of ``count`` draws from ``law``."""
    grid = np.arange(size)
    if count == 0:
        out = np.zeros(size)
        out[0] = 1.0
        return out
    if law.kind == KIND_GEOMETRIC:
        return stats.nbinom.pmf(grid, count, law.success_prob)
    if law.kind == KIND_POISSON:
        return stats.poisson.pmf(grid, law.rate * count)
    if law.kind == KIND_DETERMINISTIC:
        out = np.zeros(size)
        if law.value * count < size:
            out[law.value * count] = 1.0
        return out
    if law.kind == KIND_FINITE:
        single = np.zeros(max(law.support) + 1)
        for k, w in zip(law.support, law.weights, strict=True):
            single[k] += w
        out = np.array([1.0])
        for _ in range(count):
            out = np.convolve(out, single)[:size]
        return np.pad(out, (0, size - out.size))
    msg = f"unknown law kind {law.kind!r}"
    raise DomainError(msg)


def stationary_law_capped(
    model: EnvironmentModel, cap: int, tol: float = 1e-13, max_iter: int = 100_000
) -> tuple[np.ndarray, np.ndarray]:
    """
    Stationary law of the chain on {0..cap} by transition-matrix power iteration.

    Mass that would land above ``cap`` is lumped into ``cap``.

    :return: (support, probabilities)
    """
    size = cap + 1
    matrix = np.zeros((size, size))
    for p, atom in zip(model.probs, model.atoms, strict=True):
        imm = _sum_pmf(atom.immigration, 1, size)
        for x in range(size):
            row = np.convolve(_sum_pmf(atom.offspring, x, size), imm)[:size]
            matrix[x] += p * row
    matrix[:, cap] += 1.0 - matrix.sum(axis=1)
    pi = np.zeros(size)
    pi[0] = 1.0
    for it in range(max_iter):
        nxt = pi @ matrix
        if np.abs(nxt - pi).sum() < tol:
            _LOGGER.debug("capped stationary law converged after %s iterations", it)
            return np.arange(size), nxt
        pi = nxt
    _LOGGER.warning("capped stationary law did not converge in %s iterations", max_iter)
    return np.arange(size), pi
