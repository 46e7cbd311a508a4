"""Extremal index by three routes and the Frechet limit of partial maxima."""

from __future__ import annotations

import math
from typing import TYPE_CHECKING

import numpy as np
from scipy import stats

from .const import (
    _LOGGER,
    DEFAULT_THETA_HORIZON,
    DEFAULT_THRESHOLD_QUANTILE,
    LATTICE_TOL,
    MIN_BLOCK_EXCEEDANCES,
    MIN_FRECHET_REPS,
    TASK_GOLDIE,
    TASK_THETA,
    THETA_REPS_PER_TASK,
)
from .chain_sim import recommended_burnin, sample_stationary, stretch_statistics
from .cramer import mean_log_m
from .data import FrechetFit, ThetaEstimate
from .exceptions import (
    DomainError,
    NotSubcriticalError,
    NotTwoPointLatticeError,
    TooFewExceedancesError,
)
from .tail_analysis import goldie_c_formula
from .utils import run_tasks, split_tasks, task_rng

if TYPE_CHECKING:
    from .env_model import EnvironmentModel

METHOD_EXACT = "exactLattice"
METHOD_DIRECT = "directMC"
METHOD_BLOCKS = "blocks"

BLOCKS_LOG = "log"
BLOCKS_RATIO = "ratio"

# relative Goldie error above which a_n falls back to the empirical quantile
_GOLDIE_MAX_REL_ERR = 0.1


def _theta_task(
    log_m: np.ndarray,
    probs: np.ndarray,
    kappa: float,
    horizon: int,
    reps: int,
    seed: int,
    index: int,
) -> tuple[int, float]:
    rng = task_rng(seed, TASK_THETA, index)
    # inverse CDF of Exp(kappa); 1 - U lies in (0, 1]
    e0 = -np.log1p(-rng.random(reps)) / kappa
    steps = log_m[rng.choice(log_m.size, size=(reps, horizon), p=probs)]
    walk = np.cumsum(steps, axis=1)
    running_max = walk.max(axis=1)
    last = walk[:, -1]
    ok = e0 + running_max <= 0.0
    # Lundberg: the walk after the horizon ever exceeds -e0 with
    # probability at most exp(-kappa (-e0 - S_T))
    with np.errstate(invalid="ignore", over="ignore"):
        later = np.where(np.isfinite(last), np.exp(-kappa * (-e0 - last)), 0.0)
    return int(ok.sum()), float(later[ok].sum())


def theta_direct(
    model: EnvironmentModel,
    kappa: float,
    horizon: int = DEFAULT_THETA_HORIZON,
    reps: int = 1_000_000,
    seed: int = 0,
    workers: int = 1,
) -> ThetaEstimate:
    """
    Monte Carlo P(E0 + max_{1<=t<=horizon} S_t <= 0) with E0 ~ Exp(kappa).

    S is the walk with steps log m under the original environment law. The
    truncation bias bound is reported alongside.
    """
    if mean_log_m(model) >= 0.0:
        msg = "theta needs E log m < 0"
        raise NotSubcriticalError(msg)
    if horizon < 1 or reps < 1:
        msg = f"horizon and reps must be positive: {horizon!r}, {reps!r}"
        raise DomainError(msg)
    with np.errstate(divide="ignore"):
        log_m = np.log(model.means)
    sizes = split_tasks(reps, THETA_REPS_PER_TASK)
    parts = run_tasks(
        _theta_task,
        [
            (log_m, model.probs_array, kappa, horizon, size, seed, i)
            for i, size in enumerate(sizes)
        ],
        workers,
    )
    hits = sum(p[0] for p in parts)
    value = hits / reps
    bias = sum(p[1] for p in parts) / reps
    _LOGGER.info("theta direct: %.5f (bias bound %.2g)", value, bias)
    return ThetaEstimate(
        value=value,
        method=METHOD_DIRECT,
        std_err=math.sqrt(value * (1.0 - value) / reps),
        horizon=horizon,
        bias_bound=bias,
    )


def lattice_parameters(model: EnvironmentModel) -> tuple[float, float]:
    """
    Span h and up-probability a of a two-point model with m in {e^-h, e^h}.

    :raises NotTwoPointLatticeError: for any other model
    """
    if len(model.atoms) != 2:  # noqa: PLR2004
        msg = f"lattice form needs exactly two atoms, got {len(model.atoms)}"
        raise NotTwoPointLatticeError(msg)
    means = model.means
    if (means <= 0.0).any():
        msg = "lattice form needs positive means"
        raise NotTwoPointLatticeError(msg)
    logs = np.log(means)
    lo, hi = int(np.argmin(logs)), int(np.argmax(logs))
    h = float(logs[hi])
    if lo == hi or h <= 0.0 or abs(logs[lo] + h) > LATTICE_TOL:
        msg = f"means {means.tolist()} are not of the form e^-h, e^h"
        raise NotTwoPointLatticeError(msg)
    up = float(model.probs[hi])
    if up >= 0.5:  # noqa: PLR2004
        msg = f"up-probability {up!r} must be below 1/2"
        raise NotTwoPointLatticeError(msg)
    return h, up


def theta_lattice_exact(model: EnvironmentModel, kappa: float) -> ThetaEstimate:
    """
    Closed-form theta for the two-point +-h lattice walk.

    sup_{t>=1} S_t equals S_1 plus the all-time maximum of a fresh walk,
    which is geometric on hZ with ratio r = a / (1 - a). Only a first step
    down with no later return to 0 leaves mass against E0, so
    theta = (1 - a)(1 - r)(1 - e^{-kappa h}).
    """
    h, up = lattice_parameters(model)
    r = up / (1.0 - up)
    value = (1.0 - up) * (1.0 - r) * (1.0 - math.exp(-kappa * h))
    return ThetaEstimate(value=value, method=METHOD_EXACT)


def theta_blocks(
    paths: np.ndarray,
    block_length: int,
    threshold_quantile: float = DEFAULT_THRESHOLD_QUANTILE,
    variant: str = BLOCKS_RATIO,
) -> ThetaEstimate:
    """
    Blocks estimator of theta on stationary paths.

    ``ratio`` is (blocks with an exceedance) / (exceedances); ``log`` is the
    runs-corrected form log(1 - K/k) / (r log(1 - N/n)), which stays
    unbiased when blocks hold more than one cluster.
    """
    paths = np.atleast_2d(paths)
    per_path = paths.shape[1] // block_length
    if per_path < 1:
        msg = f"paths of length {paths.shape[1]} hold no block of {block_length}"
        raise DomainError(msg)
    used = paths[:, : per_path * block_length]
    threshold = float(np.quantile(used, threshold_quantile))
    exceed = used > threshold
    total = int(exceed.sum())
    if total < MIN_BLOCK_EXCEEDANCES:
        msg = f"{total} exceedances, need {MIN_BLOCK_EXCEEDANCES}"
        raise TooFewExceedancesError(msg)
    blocks = exceed.reshape(paths.shape[0], per_path, block_length).any(axis=2)
    hit_blocks = int(blocks.sum())
    n_blocks = blocks.size
    if variant == BLOCKS_RATIO:
        value = hit_blocks / total
    elif variant == BLOCKS_LOG:
        if hit_blocks == n_blocks:
            msg = "every block exceeds the threshold; raise the quantile"
            raise TooFewExceedancesError(msg)
        value = math.log1p(-hit_blocks / n_blocks) / (
            block_length * math.log1p(-total / used.size)
        )
    else:
        msg = f"unknown blocks variant {variant!r}"
        raise DomainError(msg)
    if value > 1.0:
        _LOGGER.warning("blocks estimate %.4f clipped to 1", value)
        value = 1.0
    return ThetaEstimate(
        value=value,
        method=METHOD_BLOCKS,
        std_err=value / math.sqrt(hit_blocks),
        exceedances=total,
    )


def frechet_ks(maxima: np.ndarray, a_n: float, theta: float, kappa: float) -> float:
    """KS distance of maxima / a_n to the law exp(-theta x^-kappa)."""
    if a_n <= 0.0:
        msg = f"a_n must be positive: {a_n!r}"
        raise DomainError(msg)
    scaled = np.asarray(maxima, dtype=float) / a_n
    frechet = stats.invweibull(kappa, scale=theta ** (1.0 / kappa))
    return float(stats.kstest(scaled, frechet.cdf).statistic)


def scaling_a_n(
    model: EnvironmentModel,
    kappa: float,
    n: int,
    c: float | None,
    seed: int,
    workers: int = 1,
    count: int | None = None,
) -> tuple[float, str]:
    """
    a_n = (C n)^(1/kappa), with C estimated when not given.

    Falls back to the empirical (1 - 1/n)-quantile of a stationary batch
    when the Goldie estimate is too noisy.

    :return: (a_n, source) with source one of given, goldie, quantile
    """
    if c is not None:
        return (c * n) ** (1.0 / kappa), "given"
    burn_in = recommended_burnin(model, kappa)
    batch = sample_stationary(model, burn_in, count or max(100 * n, 100_000), seed, workers)
    goldie = goldie_c_formula(model, kappa, batch, task_rng(seed, TASK_GOLDIE, 0))
    if goldie.value > 0.0 and goldie.std_err <= _GOLDIE_MAX_REL_ERR * goldie.value:
        return (goldie.value * n) ** (1.0 / kappa), "goldie"
    _LOGGER.warning(
        "Goldie C %.4g +- %.2g too noisy; a_n from the empirical quantile",
        goldie.value,
        goldie.std_err,
    )
    return float(np.quantile(batch.values, 1.0 - 1.0 / n)), "quantile"


def frechet_gof(
    model: EnvironmentModel,
    kappa: float,
    c: float | None,
    n: int,
    reps: int,
    theta: float,
    seed: int = 0,
    workers: int = 1,
) -> FrechetFit:
    """Maxima of ``reps`` stationary stretches of length ``n`` against Frechet."""
    if reps < MIN_FRECHET_REPS:
        msg = f"Frechet fit needs at least {MIN_FRECHET_REPS} stretches: {reps!r}"
        raise DomainError(msg)
    a_n, source = scaling_a_n(model, kappa, n, c, seed, workers)
    burn_in = recommended_burnin(model, kappa)
    _, maxima, _ = stretch_statistics(model, n, reps, burn_in, seed, workers)
    ks = frechet_ks(maxima, a_n, theta, kappa)
    _LOGGER.info("Frechet fit n=%s: a_n=%.4g (%s), KS %.4f", n, a_n, source, ks)
    return FrechetFit(
        block_length=n,
        maxima_count=reps,
        a_n=a_n,
        ks_distance=ks,
        theta=theta,
        kappa=kappa,
        a_n_source=source,
        scaled_maxima=maxima / a_n,
    )
