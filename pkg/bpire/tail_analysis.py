"""Tail index, Goldie constant, tail process and anticlustering checks."""

from __future__ import annotations

import math
from typing import TYPE_CHECKING

import numpy as np

from .const import (
    _LOGGER,
    DEFAULT_THRESHOLD_QUANTILE,
    MIN_ANTICLUSTER_EXCEEDANCES,
    MIN_PLATEAU_EXCEEDANCES,
    MIN_SPECTRAL_EXCEEDANCES,
)
from .cramer import lambda_prime, solve_kappa
from .data import GoldieEstimate, SpectralTestReport, StationaryBatch, TailReport
from .env_model import sample_atom_indices, tilt
from .exceptions import (
    DegenerateTailError,
    DomainError,
    InsufficientExceedancesError,
    TooFewExceedancesError,
)
from .utils import discrete_ks

if TYPE_CHECKING:
    from .env_model import EnvironmentModel

_PLATEAU_POINTS_PER_PERIOD = 64
_PLATEAU_GRID_POINTS = 256
_RATIO_DIGITS = 12


def _as_values(values: StationaryBatch | np.ndarray) -> np.ndarray:
    if isinstance(values, StationaryBatch):
        return values.values
    return np.asarray(values)


def hill_estimator(values: StationaryBatch | np.ndarray, k: int) -> tuple[float, float]:
    """
    Hill estimate of the tail index from the top ``k`` order statistics.

    :param values: nonnegative sample
    :param k: number of upper order statistics, ``0 < k < len(values)``
    :return: (kappa_hat, std_err) with std_err = kappa_hat / sqrt(k)
    :raises DegenerateTailError: if X_(1) == X_(k+1)
    """
    x = np.asarray(_as_values(values), dtype=float)
    if not 0 < k < x.size:
        msg = f"k must be in 1..{x.size - 1}: {k!r}"
        raise DomainError(msg)
    # the k + 1 largest values; element 0 is X_(k+1)
    top = np.partition(x, x.size - k - 1)[x.size - k - 1 :]
    threshold = top[0]
    if threshold <= 0.0:
        msg = f"X_(k+1) = {threshold!r} must be positive"
        raise DomainError(msg)
    total = float(np.log(top[1:] / threshold).sum())
    if total == 0.0:
        msg = "top order statistics are all equal"
        raise DegenerateTailError(msg)
    kappa_hat = k / total
    return kappa_hat, kappa_hat / math.sqrt(k)


def goldie_c_formula(
    model: EnvironmentModel,
    kappa: float,
    batch: StationaryBatch | np.ndarray,
    rng: np.random.Generator,
) -> GoldieEstimate:
    """
    Monte Carlo Goldie constant C = E[Psi(X)^k - (m X)^k] / (k lambda'(k)).

    Each batch value is paired with one environment draw that drives both
    Psi(X) and m X.
    """
    x = np.asarray(_as_values(batch), dtype=np.int64)
    if x.size < 2:  # noqa: PLR2004
        msg = "Goldie estimate needs at least two values"
        raise DomainError(msg)
    idx = sample_atom_indices(model, x.size, rng)
    terms = np.empty(x.size, dtype=float)
    for j, atom in enumerate(model.atoms):
        sel = idx == j
        count = int(sel.sum())
        if not count:
            continue
        psi = atom.offspring.sample_sum(x[sel], rng) + atom.immigration.sample(count, rng)
        m = atom.offspring.mean()
        terms[sel] = np.power(psi.astype(float), kappa) - np.power(m * x[sel], kappa)
    numerator = float(terms.mean())
    numerator_se = float(terms.std(ddof=1) / math.sqrt(x.size))
    denom = kappa * lambda_prime(model, kappa)
    _LOGGER.debug("Goldie numerator %.6g +- %.3g, denominator %.6g", numerator, numerator_se, denom)
    return GoldieEstimate(
        value=numerator / denom,
        std_err=numerator_se / denom,
        numerator=numerator,
        numerator_std_err=numerator_se,
    )


def plateau_grid(window: tuple[float, float], lattice_period: float | None = None) -> np.ndarray:
    """
    Log-spaced evaluation points in ``window``.

    With a multiplicative lattice period the grid covers a whole number of
    periods uniformly in log scale, so the average is a Cesaro mean over
    the period.
    """
    x_low, x_high = window
    if not 0.0 < x_low < x_high:
        msg = f"window must satisfy 0 < low < high: {window!r}"
        raise DomainError(msg)
    span = math.log(x_high / x_low)
    if lattice_period is not None and lattice_period > 1.0:
        periods = math.floor(span / math.log(lattice_period) + 1e-12)
        if periods >= 1:
            points = periods * _PLATEAU_POINTS_PER_PERIOD
            u = (np.arange(points) + 0.5) / points * periods * math.log(lattice_period)
            return x_low * np.exp(u)
        _LOGGER.warning("window %s is shorter than one lattice period", window)
    u = (np.arange(_PLATEAU_GRID_POINTS) + 0.5) / _PLATEAU_GRID_POINTS * span
    return x_low * np.exp(u)


def tail_plateau(
    values: StationaryBatch | np.ndarray,
    kappa: float,
    window: tuple[float, float],
    lattice_period: float | None = None,
    sample_size: int | None = None,
) -> float:
    """
    Mean of x^kappa P(X > x) over a log grid in ``window``.

    :param sample_size: size of the original sample when ``values`` holds
        only its upper part
    :raises InsufficientExceedancesError: fewer than 100 values above the
        top of the window
    """
    x = np.sort(np.asarray(_as_values(values), dtype=float))
    n = x.size if sample_size is None else sample_size
    exceed = x.size - np.searchsorted(x, window[1], side="right")
    if exceed < MIN_PLATEAU_EXCEEDANCES:
        msg = (
            f"{exceed} values above {window[1]:g}, "
            f"need {MIN_PLATEAU_EXCEEDANCES}"
        )
        raise InsufficientExceedancesError(msg)
    grid = plateau_grid(window, lattice_period)
    survival = (x.size - np.searchsorted(x, grid, side="right")) / n
    return float(np.mean(np.power(grid, kappa) * survival))


def default_window(values: np.ndarray, top: int = 10 * MIN_PLATEAU_EXCEEDANCES) -> tuple[float, float]:
    """Window one decade wide ending where ``top`` exceedances remain."""
    x = np.sort(np.asarray(values, dtype=float))
    if x.size <= top:
        msg = f"sample of {x.size} is too small for a plateau window"
        raise InsufficientExceedancesError(msg)
    x_high = float(x[x.size - top - 1])
    return (x_high / 10.0, x_high)


def tail_report(
    model: EnvironmentModel,
    batch: StationaryBatch,
    hill_k: int,
    rng: np.random.Generator,
    window: tuple[float, float] | None = None,
) -> TailReport:
    """Hill, plateau and Goldie estimates for one stationary batch."""
    cramer = solve_kappa(model)
    hill, hill_se = hill_estimator(batch, hill_k)
    window = window or default_window(batch.values)
    period = math.exp(cramer.lattice_span) if cramer.lattice_span else None
    plateau = tail_plateau(batch, cramer.kappa, window, lattice_period=period)
    goldie = goldie_c_formula(model, cramer.kappa, batch, rng)
    _LOGGER.info(
        "tails: hill %.4f +- %.4f, plateau C %.4f, Goldie C %.4f +- %.4f",
        hill,
        hill_se,
        plateau,
        goldie.value,
        goldie.std_err,
    )
    return TailReport(
        hill_kappa=hill,
        hill_std_err=hill_se,
        plateau_c=plateau,
        window=window,
        sample_size=len(batch),
        hill_k=hill_k,
        lattice_period=period,
        goldie=goldie,
    )


def _law_power(
    support: np.ndarray, probs: np.ndarray, times: int
) -> dict[float, float]:
    law = {1.0: 1.0}
    for _ in range(times):
        nxt: dict[float, float] = {}
        for v, p in law.items():
            for s, q in zip(support, probs, strict=True):
                if q == 0.0:
                    continue
                key = round(float(v * s), _RATIO_DIGITS)
                nxt[key] = nxt.get(key, 0.0) + p * q
        law = nxt
    return dict(sorted(law.items()))


def reference_ratio_law(
    model: EnvironmentModel, kappa: float, lag: int
) -> dict[float, float]:
    """
    Exact law of Y_lag / Y_0 for the tail process.

    Forward lags multiply i.i.d. m under the original law; backward lags
    multiply i.i.d. 1/m* under the law tilted by m^kappa.
    """
    if lag == 0:
        return {1.0: 1.0}
    if lag > 0:
        return _law_power(model.means, model.probs_array, lag)
    tilted = tilt(model, kappa)
    with np.errstate(divide="ignore"):
        inverse = 1.0 / tilted.means
    return _law_power(inverse, tilted.probs_array, -lag)


def _bucket(ratios: np.ndarray, support: np.ndarray) -> np.ndarray:
    """
    Index into the sorted ``support`` of the nearest point on the log scale.

    Zero ratios go to a zero support point when there is one, else to the
    smallest point.
    """
    offset = int(support[0] == 0.0)
    logs = np.log(support[offset:])
    out = np.zeros(ratios.size, dtype=np.int64)
    nz = ratios > 0.0
    if logs.size > 1:
        lr = np.log(ratios[nz])
        pos = np.clip(np.searchsorted(logs, lr), 1, logs.size - 1)
        nearest = np.where(lr - logs[pos - 1] <= logs[pos] - lr, pos - 1, pos)
        out[nz] = nearest + offset
    elif logs.size == 1:
        out[nz] = offset
    return out


def _exceedance_ratios(
    paths: np.ndarray, lag: int, threshold: float
) -> np.ndarray:
    paths = np.atleast_2d(paths)
    length = paths.shape[1]
    start, stop = max(0, -lag), length - max(0, lag)
    if stop <= start:
        msg = f"paths of length {length} do not fit lag {lag}"
        raise DomainError(msg)
    base = paths[:, start:stop]
    shifted = paths[:, start + lag : stop + lag]
    mask = base > threshold
    return shifted[mask].astype(float) / base[mask].astype(float)


def spectral_ratio_test(
    model: EnvironmentModel,
    kappa: float,
    lag: int,
    paths: np.ndarray,
    threshold_quantile: float = DEFAULT_THRESHOLD_QUANTILE,
) -> SpectralTestReport:
    """
    Compare X_lag / X_0 given X_0 > u with the tail-process reference law.

    Ratios are bucketed to the nearest reference point before the KS
    distance of the two discrete laws is taken.
    """
    if not 0.9 < threshold_quantile < 1.0:  # noqa: PLR2004
        msg = f"threshold quantile must be in (0.9, 1): {threshold_quantile!r}"
        raise DomainError(msg)
    threshold = float(np.quantile(paths, threshold_quantile))
    ratios = _exceedance_ratios(paths, lag, threshold)
    if ratios.size < MIN_SPECTRAL_EXCEEDANCES:
        msg = f"{ratios.size} exceedances at lag {lag}, need {MIN_SPECTRAL_EXCEEDANCES}"
        raise TooFewExceedancesError(msg)
    reference = reference_ratio_law(model, kappa, lag)
    support = np.array(list(reference.keys()))
    ref_probs = np.array(list(reference.values()))
    buckets = _bucket(ratios, support)
    freqs = np.bincount(buckets, minlength=support.size) / ratios.size
    ks = discrete_ks(support[buckets], support, ref_probs)
    _LOGGER.debug("lag %s: %s exceedances above %s, KS %.4f", lag, ratios.size, threshold, ks)
    return SpectralTestReport(
        lag=lag,
        threshold_quantile=threshold_quantile,
        empirical_ratio_law=dict(zip(support.tolist(), freqs.tolist(), strict=True)),
        reference_law=reference,
        ks_distance=ks,
        exceedances=int(ratios.size),
    )


def anticlustering_diagnostic(
    threshold: float, k_list: list[int], r: int, paths: np.ndarray
) -> dict[int, float]:
    """
    P(max_{k <= |t| <= r} X_t > u | X_0 > u) per k, estimated along paths.

    Only positions with a full two-sided window of radius ``r`` count.
    """
    paths = np.atleast_2d(paths)
    length = paths.shape[1]
    if not 0 < r < length / 2:
        msg = f"r must be below half the path length {length}: {r!r}"
        raise DomainError(msg)
    exceed = paths > threshold
    # cs[:, i] counts exceedances at positions < i
    cs = np.concatenate(
        [np.zeros((paths.shape[0], 1), dtype=np.int64), np.cumsum(exceed, axis=1)],
        axis=1,
    )
    rows, cols = np.nonzero(exceed[:, r : length - r])
    cols = cols + r
    if rows.size < MIN_ANTICLUSTER_EXCEEDANCES:
        msg = f"{rows.size} exceedances, need {MIN_ANTICLUSTER_EXCEEDANCES}"
        raise TooFewExceedancesError(msg)
    out: dict[int, float] = {}
    for k in k_list:
        if k > r:
            out[k] = 0.0
            continue
        k = max(k, 1)
        right = cs[rows, cols + r + 1] - cs[rows, cols + k]
        left = cs[rows, cols - k + 1] - cs[rows, cols - r]
        out[k] = float(np.mean((right + left) > 0))
    return out
