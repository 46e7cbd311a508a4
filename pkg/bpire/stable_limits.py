"""
Partial-sum limits of the stationary chain.

kappa < 2 gives kappa-stable limits under a_n = (C n)^(1/kappa) with the
truncated-mean centering; kappa > 2 gives a Gaussian limit with
sigma^2 = (1 + E m) / (1 - E m) Var X. kappa = 2 is not handled.
"""

from __future__ import annotations

import math
from typing import TYPE_CHECKING

import numpy as np
from scipy import special, stats

from .const import (
    _LOGGER,
    CLUSTER_REPS_PER_TASK,
    CLUSTER_TAIL_FRACTION,
    CLUSTER_TAIL_RATIO,
    ECF_GRID_POINTS,
    ECF_WINDOW,
    KAPPA_ONE_TOL,
    KAPPA_TWO_EXCLUSION,
    MIN_ECF_POINTS,
    MIN_STABLE_SUMS,
    TASK_CLUSTER,
    TASK_GOLDIE,
)
from .chain_sim import recommended_burnin, sample_stationary, stretch_statistics
from .data import ClusterMomentEstimate, StableFitResult, StationaryBatch, SumExperiment
from .env_model import tilt
from .exceptions import (
    DomainError,
    HorizonTooSmallError,
    IllConditionedFitError,
    RegimeMismatchError,
)
from .tail_analysis import goldie_c_formula
from .utils import run_tasks, split_tasks, task_rng

if TYPE_CHECKING:
    from .env_model import EnvironmentModel

REGIME_SUB1 = "sub1"
REGIME_EQ1 = "eq1"
REGIME_BETWEEN = "between1and2"
REGIME_ABOVE2 = "above2"

# ecf t-grid spans this many decades either side of 1/scale
_ECF_DECADES = 3.0


def kappa_regime(kappa: float) -> str:
    """Classify kappa; the neighbourhood of 2 is rejected."""
    if abs(kappa - 2.0) <= KAPPA_TWO_EXCLUSION:
        msg = (
            f"kappa={kappa:.4f} is within {KAPPA_TWO_EXCLUSION} of 2, where "
            "normalization and centering need additional care"
        )
        raise RegimeMismatchError(msg)
    if abs(kappa - 1.0) <= KAPPA_ONE_TOL:
        return REGIME_EQ1
    if kappa < 1.0:
        return REGIME_SUB1
    if kappa < 2.0:  # noqa: PLR2004
        return REGIME_BETWEEN
    return REGIME_ABOVE2


def stationary_mean(model: EnvironmentModel) -> float:
    """E X = E B / (1 - E m) for a chain with E m < 1."""
    em = float(np.dot(model.probs_array, model.means))
    if em >= 1.0:
        msg = f"E m = {em!r}; the stationary mean is infinite"
        raise DomainError(msg)
    eb = float(np.dot(model.probs_array, model.immigration_means))
    return eb / (1.0 - em)


def centering_b_n(values: np.ndarray, a_n: float, n: int) -> tuple[float, float]:
    """
    b_n = n E[(X / a_n) 1{X <= a_n}] from a stationary sample.

    :return: (b_n, standard error)
    """
    x = np.asarray(values, dtype=float)
    terms = np.where(x <= a_n, x / a_n, 0.0)
    return float(n * terms.mean()), float(n * terms.std(ddof=1) / math.sqrt(x.size))


def centering_shift(values: np.ndarray, a_n: float, n: int, mean_x: float) -> float:
    """
    n E X / a_n - b_n, the location shift of the alternative centering.

    Tends to kappa / (kappa - 1) for kappa in (1, 2).
    """
    b_n, _ = centering_b_n(values, a_n, n)
    return n * mean_x / a_n - b_n


def partial_sum_experiment(
    model: EnvironmentModel,
    kappa: float,
    c: float | None,
    n: int,
    reps: int,
    seed: int = 0,
    workers: int = 1,
    batch: StationaryBatch | None = None,
) -> SumExperiment:
    """
    Normalized sums of ``reps`` independent stationary stretches of length ``n``.

    A stationary batch supplies C (when not given), b_n and Var X; one is
    drawn when not passed in.
    """
    regime = kappa_regime(kappa)
    burn_in = recommended_burnin(model, kappa)
    if batch is None:
        batch = sample_stationary(model, burn_in, max(10 * reps, 100_000), seed, workers)
    sums, _, _ = stretch_statistics(model, n, reps, burn_in, seed, workers)
    if regime == REGIME_ABOVE2:
        mean_x = stationary_mean(model)
        em = float(np.dot(model.probs_array, model.means))
        sigma2 = (1.0 + em) / (1.0 - em) * float(np.var(batch.values.astype(float), ddof=1))
        a_n = math.sqrt(n * sigma2)
        normalized = (sums - n * mean_x) / a_n
        _LOGGER.info("Gaussian regime: sigma^2 = %.4g", sigma2)
        return SumExperiment(
            n=n,
            reps=reps,
            kappa_regime=regime,
            normalized_sums=normalized,
            b_n=n * mean_x / a_n,
            a_n=a_n,
            sigma2=sigma2,
        )
    if c is None:
        c = goldie_c_formula(model, kappa, batch, task_rng(seed, TASK_GOLDIE, 0)).value
    a_n = (c * n) ** (1.0 / kappa)
    b_n, b_se = (0.0, 0.0) if regime == REGIME_SUB1 else centering_b_n(batch.values, a_n, n)
    _LOGGER.info("%s regime: a_n = %.4g, b_n = %.4g +- %.2g", regime, a_n, b_n, b_se)
    return SumExperiment(
        n=n,
        reps=reps,
        kappa_regime=regime,
        normalized_sums=sums / a_n - b_n,
        b_n=b_n,
        a_n=a_n,
        b_n_std_err=b_se,
    )


def _ecf(x: np.ndarray, t: np.ndarray, chunk: int = 100_000) -> np.ndarray:
    out = np.zeros(t.size, dtype=complex)
    for start in range(0, x.size, chunk):
        out += np.exp(1j * np.outer(t, x[start : start + chunk])).sum(axis=1)
    return out / x.size


def stable_index_fit(
    sums: np.ndarray,
    window: tuple[float, float] = ECF_WINDOW,
    grid_points: int = ECF_GRID_POINTS,
) -> StableFitResult:
    """
    Regress log(-log|phi(t)|) on log t over points with |phi| in ``window``.

    The slope is alpha and the intercept alpha log(scale). Skew comes from
    a least-squares fit of the unwrapped phase to
    scale^alpha tan(pi alpha / 2) beta t^alpha + mu t.
    """
    x = np.asarray(sums, dtype=float)
    if x.size < MIN_STABLE_SUMS:
        msg = f"need at least {MIN_STABLE_SUMS} sums: {x.size}"
        raise DomainError(msg)
    q25, q50, q75 = np.quantile(x, [0.25, 0.5, 0.75])
    spread = (q75 - q25) or float(np.std(x)) or 1.0
    x = x - q50
    t = np.logspace(-_ECF_DECADES, _ECF_DECADES, grid_points) / spread
    phi = _ecf(x, t)
    modulus = np.abs(phi)
    mask = (modulus >= window[0]) & (modulus <= window[1])
    if int(mask.sum()) < MIN_ECF_POINTS:
        msg = f"only {int(mask.sum())} ecf points with |phi| in {window}"
        raise IllConditionedFitError(msg)
    fit = stats.linregress(np.log(t[mask]), np.log(-np.log(modulus[mask])))
    alpha = float(min(fit.slope, 2.0))
    scale = float(math.exp(fit.intercept / fit.slope))
    phase = np.unwrap(np.angle(phi))[mask]
    design = np.column_stack([t[mask] ** alpha, t[mask]])
    (amp, _), *_ = np.linalg.lstsq(design, phase, rcond=None)
    tan = math.tan(math.pi * alpha / 2.0)
    skew = float(np.clip(amp / (scale**alpha * tan), -1.0, 1.0)) if abs(tan) > 1e-6 else 0.0
    return StableFitResult(
        alpha_hat=alpha,
        scale_hat=scale,
        skew_hat=skew,
        alpha_std_err=float(fit.stderr),
        points=int(mask.sum()),
    )


def _cluster_task(
    log_m: np.ndarray,
    probs: np.ndarray,
    log_m_star: np.ndarray,
    probs_star: np.ndarray,
    kappa: float,
    horizon: int,
    reps: int,
    seed: int,
    index: int,
) -> tuple[np.ndarray, int]:
    rng = task_rng(seed, TASK_CLUSTER, index)
    forward = np.cumsum(log_m[rng.choice(log_m.size, size=(reps, horizon), p=probs)], axis=1)
    # S_{-k} = -sum_{i<=k} log m*_i
    backward = -np.cumsum(
        log_m_star[rng.choice(log_m_star.size, size=(reps, horizon), p=probs_star)], axis=1
    )
    accept = (forward <= 0.0).all(axis=1) & (backward < 0.0).all(axis=1)
    fw, bw = forward[accept], backward[accept]
    total = 1.0 + np.exp(fw).sum(axis=1) + np.exp(bw).sum(axis=1)
    endpoint = (np.exp(fw[:, -1]) + np.exp(bw[:, -1])) / total
    return np.column_stack([total**kappa, endpoint]), reps


def cluster_moment(
    model: EnvironmentModel,
    kappa: float,
    horizon: int = 400,
    reps: int = 1_000_000,
    seed: int = 0,
    workers: int = 1,
) -> ClusterMomentEstimate:
    """
    Estimate E(sum_j Q_j)^kappa by rejection sampling of the two-sided walk.

    Proposals are accepted when S_t < 0 for -horizon <= t < 0 and S_t <= 0
    for 0 < t <= horizon; the backward side uses the tilted law.

    :raises HorizonTooSmallError: when the endpoint terms e^{S_{+-horizon}}
        exceed 1e-3 of the sum on more than 1% of accepted paths
    """
    if kappa > 1.0 + KAPPA_ONE_TOL:
        msg = f"cluster moment is used for kappa <= 1 only: {kappa!r}"
        raise RegimeMismatchError(msg)
    tilted = tilt(model, kappa)
    with np.errstate(divide="ignore"):
        log_m = np.log(model.means)
        log_m_star = np.log(tilted.means)
    sizes = split_tasks(reps, CLUSTER_REPS_PER_TASK)
    parts = run_tasks(
        _cluster_task,
        [
            (
                log_m,
                model.probs_array,
                log_m_star,
                tilted.probs_array,
                kappa,
                horizon,
                size,
                seed,
                i,
            )
            for i, size in enumerate(sizes)
        ],
        workers,
    )
    accepted = np.concatenate([p[0] for p in parts]) if parts else np.empty((0, 2))
    if accepted.shape[0] < 2:  # noqa: PLR2004
        msg = f"only {accepted.shape[0]} of {reps} proposals accepted"
        raise HorizonTooSmallError(msg)
    heavy = float(np.mean(accepted[:, 1] > CLUSTER_TAIL_RATIO))
    if heavy > CLUSTER_TAIL_FRACTION:
        msg = f"horizon {horizon} leaves walk mass at the ends on {heavy:.1%} of paths"
        raise HorizonTooSmallError(msg)
    values = accepted[:, 0]
    estimate = ClusterMomentEstimate(
        value=float(values.mean()),
        horizon=horizon,
        acceptance_rate=values.size / reps,
        std_err=float(values.std(ddof=1) / math.sqrt(values.size)),
        accepted=int(values.size),
    )
    _LOGGER.info("cluster moment: %s", estimate)
    return estimate


def stable_scale_d(theta: float, cluster_value: float, kappa: float) -> float:
    """
    Scale d of the stable limit.

    theta Gamma(1 - kappa) E(sum Q)^kappa cos(pi kappa / 2) for kappa != 1,
    theta (pi / 2) E sum Q for kappa = 1.
    """
    if abs(kappa - 1.0) <= KAPPA_ONE_TOL:
        return theta * math.pi / 2.0 * cluster_value
    if not 0.0 < kappa < 2.0:  # noqa: PLR2004
        msg = f"stable scale needs kappa in (0, 2): {kappa!r}"
        raise RegimeMismatchError(msg)
    return theta * special.gamma(1.0 - kappa) * cluster_value * math.cos(math.pi * kappa / 2.0)


def theoretical_chf(kappa: float, d: float, c: float, t: float) -> complex:
    """
    Characteristic function of the stable limit at ``t``.

    exp(-d|t|^k (1 - i sgn(t) tan(pi k / 2)) + i c t) for k != 1 (c = 0 for
    k < 1) and exp(-d|t| (1 + i (2/pi) sgn(t) log|t|) + i c t) for k = 1.
    """
    if t == 0.0:
        return complex(1.0, 0.0)
    sgn = math.copysign(1.0, t)
    if abs(kappa - 1.0) <= KAPPA_ONE_TOL:
        exponent = -d * abs(t) * (1.0 + 1j * (2.0 / math.pi) * sgn * math.log(abs(t)))
    else:
        exponent = -d * abs(t) ** kappa * (1.0 - 1j * sgn * math.tan(math.pi * kappa / 2.0))
    return complex(np.exp(exponent + 1j * c * t))


def sample_stable(
    alpha: float,
    beta: float,
    scale: float,
    loc: float,
    size: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """
    Chambers-Mallows-Stuck draws with characteristic function
    exp(-|scale t|^alpha (1 - i beta sgn(t) tan(pi alpha / 2)) + i loc t).
    """
    if not 0.0 < alpha <= 2.0 or abs(beta) > 1.0:  # noqa: PLR2004
        msg = f"stable parameters out of range: alpha={alpha!r}, beta={beta!r}"
        raise DomainError(msg)
    v = (rng.random(size) - 0.5) * math.pi
    w = -np.log1p(-rng.random(size))
    if abs(alpha - 1.0) < 1e-12:
        half = math.pi / 2.0 + beta * v
        x = (2.0 / math.pi) * (
            half * np.tan(v) - beta * np.log((math.pi / 2.0) * w * np.cos(v) / half)
        )
        return scale * x + (2.0 / math.pi) * beta * scale * math.log(scale) + loc
    zeta = beta * math.tan(math.pi * alpha / 2.0)
    shift = math.atan(zeta) / alpha
    factor = (1.0 + zeta**2) ** (1.0 / (2.0 * alpha))
    x = (
        factor
        * np.sin(alpha * (v + shift))
        / np.cos(v) ** (1.0 / alpha)
        * (np.cos(v - alpha * (v + shift)) / w) ** ((1.0 - alpha) / alpha)
    )
    return scale * x + loc
