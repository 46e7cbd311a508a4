"""
Random walk in random environment and its branching representation.

Site x holds the right-step probability xi_x. Before hitting n the walk
crosses edge (k, k+1) V_k = 2 L_{n-k} - 1 times, where L is the branching
chain with geometric(xi) offspring and one immigrant, so
T_n = 2 sum L - n + R_n with R_n the steps spent left of the origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np
from scipy import stats

from .const import (
    _LOGGER,
    COUPLED_WALKS_PER_TASK,
    DEFAULT_STEP_BUDGET,
    KS_CRITICAL_1PCT,
    LCHAINS_PER_TASK,
    MAX_CENSORED_FRACTION,
    PROB_SUM_TOL,
    TASK_GOLDIE,
    TASK_LCHAIN,
    TASK_WALK,
    TASK_WALK_COUPLED,
    TASK_WALK_TIME,
    WALKS_PER_TASK,
)
from .chain_sim import evolve, recommended_burnin, sample_stationary
from .data import EquivalenceReport, FrechetFit, HittingTimeLimitsReport, LChainRun, RwreRun
from .env_model import (
    Deterministic,
    EnvironmentAtom,
    EnvironmentModel,
    Geometric,
    sample_atom_indices,
)
from .exceptions import DomainError, StepBudgetExceededError, ValidationError
from .extremes import frechet_ks, scaling_a_n
from .stable_limits import (
    REGIME_ABOVE2,
    REGIME_EQ1,
    REGIME_SUB1,
    centering_b_n,
    kappa_regime,
    stationary_mean,
)
from .tail_analysis import goldie_c_formula
from .utils import fingerprint, ks_critical_value, run_tasks, split_tasks, task_rng

BOUNDARY_REFLECTED = "reflected"
BOUNDARY_FREE = "free"

ENGINE_AUTO = "auto"
ENGINE_WALK = "walk"
ENGINE_BRANCHING = "branching"

_INITIAL_LEFT_SITES = 64
_INITIAL_RIGHT_SITES = 1024
_NOISE_BLOCK = 64
_TRANSFORM_QUANTILES = (0.25, 0.5, 0.75)


@dataclass(frozen=True)
class RwreModel:
    """i.i.d. site law of xi (right-step probability) on a finite support."""

    site_values: tuple[float, ...]
    probs: tuple[float, ...]
    reflect_at_origin: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "site_values", tuple(float(v) for v in self.site_values))
        object.__setattr__(self, "probs", tuple(float(p) for p in self.probs))
        problems = []
        if not self.site_values or len(self.site_values) != len(self.probs):
            problems.append("site law needs one probability per site value")
        if any(not 0.0 < v <= 1.0 for v in self.site_values):
            problems.append(f"site values must lie in (0, 1]: {self.site_values!r}")
        if any(p <= 0.0 for p in self.probs):
            problems.append(f"site probabilities must be positive: {self.probs!r}")
        if abs(math.fsum(self.probs) - 1.0) > PROB_SUM_TOL:
            problems.append(f"probs sum {math.fsum(self.probs):.12g}, not 1")
        if not problems and self.drift() >= 0.0:
            problems.append(f"E log(xi'/xi) = {self.drift():.6g} must be negative")
        if problems:
            raise ValidationError(problems)

    def drift(self) -> float:
        """E log(xi'/xi); -inf when some site always steps right."""
        if any(v >= 1.0 for v in self.site_values):
            return -math.inf
        return math.fsum(
            p * math.log((1.0 - v) / v)
            for v, p in zip(self.site_values, self.probs, strict=True)
        )

    @property
    def values_array(self) -> np.ndarray:
        return np.asarray(self.site_values, dtype=float)

    @property
    def probs_array(self) -> np.ndarray:
        return np.asarray(self.probs, dtype=float)

    def to_config(self) -> dict[str, Any]:
        return {
            "sites": [
                {"value": v, "prob": p}
                for v, p in zip(self.site_values, self.probs, strict=True)
            ],
            "reflect_at_origin": self.reflect_at_origin,
        }

    def fingerprint(self) -> str:
        return fingerprint(self.to_config())


def derive_ratio_model(rwre: RwreModel) -> EnvironmentModel:
    """
    Branching environment of the walk: offspring geometric(xi), one immigrant.

    The offspring mean is xi'/xi; xi = 1 gives no offspring.
    """
    atoms = tuple(
        EnvironmentAtom(
            Geometric(v) if v < 1.0 else Deterministic(0),
            Deterministic(1),
        )
        for v in rwre.site_values
    )
    return EnvironmentModel(atoms=atoms, probs=rwre.probs)


class _WalkBatch:
    """Vectorized walks with a lazily grown per-replicate environment."""

    def __init__(
        self,
        rwre: RwreModel,
        reps: int,
        rng: np.random.Generator,
        right_sites: int,
        *,
        track_crossings: bool,
    ) -> None:
        self.rwre = rwre
        self.reps = reps
        self.rng = rng
        self.offset = 0 if rwre.reflect_at_origin else _INITIAL_LEFT_SITES
        width = self.offset + right_sites + 1
        self.env = self._draw(width)
        self._apply_reflection()
        self.crossings = np.zeros((reps, width), dtype=np.int64) if track_crossings else None

    def _draw(self, width: int) -> np.ndarray:
        idx = self.rng.choice(
            len(self.rwre.site_values), size=(self.reps, width), p=self.rwre.probs_array
        )
        return self.rwre.values_array[idx]

    def _apply_reflection(self) -> None:
        if self.rwre.reflect_at_origin:
            self.env[:, : self.offset + 1] = 1.0

    def ensure(self, low: int, high: int) -> None:
        """Grow the site range to cover walkers in [low, high] and their left edges."""
        width = self.env.shape[1]
        # a reflected walk never steps left from 0
        need_low = low if self.rwre.reflect_at_origin else low - 1
        if need_low < -self.offset:
            extra = max(self.offset, _INITIAL_LEFT_SITES, -need_low - self.offset)
            self.env = np.concatenate([self._draw(extra), self.env], axis=1)
            if self.crossings is not None:
                pad = np.zeros((self.reps, extra), dtype=np.int64)
                self.crossings = np.concatenate([pad, self.crossings], axis=1)
            self.offset += extra
            width += extra
        if high > width - 1 - self.offset:
            extra = max(width, high - (width - 1 - self.offset))
            self.env = np.concatenate([self.env, self._draw(extra)], axis=1)
            if self.crossings is not None:
                pad = np.zeros((self.reps, extra), dtype=np.int64)
                self.crossings = np.concatenate([self.crossings, pad], axis=1)

    def run(
        self,
        target: int | None,
        until_time: int | None,
        step_budget: int,
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """
        Step every walk until it hits ``target`` or reaches ``until_time``.

        :return: (positions, steps, left steps, censored)
        """
        pos = np.zeros(self.reps, dtype=np.int64)
        steps = np.zeros(self.reps, dtype=np.int64)
        lefts = np.zeros(self.reps, dtype=np.int64)
        censored = np.zeros(self.reps, dtype=bool)
        active = np.arange(self.reps)
        limit = until_time if until_time is not None else step_budget
        while active.size:
            here = pos[active]
            self.ensure(int(here.min()), int(here.max()))
            col = here + self.offset
            right = self.rng.random(active.size) < self.env[active, col]
            if self.crossings is not None:
                # edge (x, x+1) lives in column x + offset
                self.crossings[active, np.where(right, col, col - 1)] += 1
            pos[active] = here + np.where(right, 1, -1)
            lefts[active] += ~right
            steps[active] += 1
            done = np.zeros(active.size, dtype=bool)
            if target is not None:
                done |= pos[active] >= target
            stop = steps[active] >= limit
            if until_time is None:
                censored[active[stop & ~done]] = True
            active = active[~(done | stop)]
        return pos, steps, lefts, censored


def _walk_task(
    rwre: RwreModel,
    n: int,
    reps: int,
    step_budget: int,
    record: bool,
    seed: int,
    index: int,
) -> dict[str, np.ndarray]:
    batch = _WalkBatch(rwre, reps, task_rng(seed, TASK_WALK, index), n, track_crossings=True)
    _, steps, lefts, censored = batch.run(n, None, step_budget)
    crossings = batch.crossings
    start = batch.offset
    inside = crossings[:, start : start + n]
    out = {
        "steps": steps,
        "lefts": lefts,
        "censored": censored,
        "max": inside.max(axis=1),
        "left_crossings": crossings[:, :start].sum(axis=1),
    }
    if record:
        out["crossings"] = inside.copy()
    return out


def simulate_walk(
    rwre: RwreModel,
    n: int,
    reps: int = 1,
    seed: int = 0,
    workers: int = 1,
    step_budget: int = DEFAULT_STEP_BUDGET,
    *,
    record_crossings: bool = False,
) -> RwreRun:
    """
    Run ``reps`` independent walks from 0 until they first hit ``n``.

    Each replicate draws its own environment. Walks exceeding
    ``step_budget`` steps are censored and flagged, not retried.
    """
    if n < 1:
        msg = f"target level must be positive: {n!r}"
        raise DomainError(msg)
    sizes = split_tasks(reps, WALKS_PER_TASK)
    parts = run_tasks(
        _walk_task,
        [(rwre, n, size, step_budget, record_crossings, seed, i) for i, size in enumerate(sizes)],
        workers,
    )
    censored = np.concatenate([p["censored"] for p in parts])
    if censored.any():
        _LOGGER.warning(
            "%s of %s walks censored at %s steps", int(censored.sum()), reps, step_budget
        )
    return RwreRun(
        target_n=n,
        hitting_times=np.concatenate([p["steps"] for p in parts]),
        max_crossings=np.concatenate([p["max"] for p in parts]),
        left_crossings=np.concatenate([p["left_crossings"] for p in parts]),
        censored=censored,
        seed=seed,
        reflect_at_origin=rwre.reflect_at_origin,
        crossing_counts=(
            np.concatenate([p["crossings"] for p in parts]) if record_crossings else None
        ),
    )


class _SiteNoise:
    """
    Environment and step uniforms of one replicate, one stream per site.

    Two walkers built from the same (seed, index) read identical xi_x and
    identical k-th uniforms at every site x.
    """

    def __init__(self, rwre: RwreModel, seed: int, index: int) -> None:
        self.rwre = rwre
        self.seed = seed
        self.index = index
        self._sites: dict[int, list[Any]] = {}

    def _open(self, x: int) -> list[Any]:
        key = 2 * x if x >= 0 else -2 * x - 1
        rng = np.random.default_rng(
            np.random.SeedSequence(
                [self.seed, TASK_WALK_COUPLED, self.index], spawn_key=(key,)
            )
        )
        pick = rng.choice(len(self.rwre.site_values), p=self.rwre.probs_array)
        xi = self.rwre.site_values[pick]
        return [rng, xi, rng.random(_NOISE_BLOCK), 0]

    def steps_right(self, x: int) -> bool:
        site = self._sites.get(x)
        if site is None:
            site = self._sites[x] = self._open(x)
        rng, xi, noise, used = site
        if used == noise.size:
            noise = site[2] = rng.random(_NOISE_BLOCK)
            used = 0
        site[3] = used + 1
        return bool(noise[used] < xi)


def _coupled_walk(
    rwre: RwreModel, n: int, reflect: bool, step_budget: int, seed: int, index: int
) -> tuple[int, int, int, bool]:
    """
    One walk to n.

    :return: (steps, most crossings of an edge in [0, n), crossings left of 0, censored)
    """
    noise = _SiteNoise(rwre, seed, index)
    crossings = [0] * n
    pos = steps = left = 0
    while pos < n and steps < step_budget:
        right = (reflect and pos <= 0) or noise.steps_right(pos)
        edge = pos if right else pos - 1
        if edge < 0:
            left += 1
        elif edge < n:
            crossings[edge] += 1
        pos += 1 if right else -1
        steps += 1
    return steps, max(crossings), left, pos < n


def _coupled_task(
    rwre: RwreModel, n: int, reps: int, step_budget: int, seed: int, first: int
) -> dict[str, np.ndarray]:
    out: dict[str, np.ndarray] = {}
    for reflect, name in ((False, BOUNDARY_FREE), (True, BOUNDARY_REFLECTED)):
        rows = [
            _coupled_walk(rwre, n, reflect, step_budget, seed, first + i) for i in range(reps)
        ]
        steps, most, left, censored = zip(*rows, strict=True)
        out[f"{name}_steps"] = np.array(steps, dtype=np.int64)
        out[f"{name}_max"] = np.array(most, dtype=np.int64)
        out[f"{name}_left"] = np.array(left, dtype=np.int64)
        out[f"{name}_censored"] = np.array(censored, dtype=bool)
    return out


def simulate_walk_coupled(
    rwre: RwreModel,
    n: int,
    reps: int = 1,
    seed: int = 0,
    workers: int = 1,
    step_budget: int = DEFAULT_STEP_BUDGET,
) -> tuple[RwreRun, RwreRun]:
    """
    Free and reflected walks driven by the same environment and step noise.

    Each site owns its stream of uniforms and the k-th departure from x uses
    its k-th uniform in both walks. The reflected walk steps right from every
    site <= 0. Walks are stepped one at a time, so keep ``n`` moderate.

    :return: (free run, reflected run)
    """
    if n < 1:
        msg = f"target level must be positive: {n!r}"
        raise DomainError(msg)
    sizes = split_tasks(reps, COUPLED_WALKS_PER_TASK)
    firsts = np.cumsum([0, *sizes[:-1]]).tolist() if sizes else []
    parts = run_tasks(
        _coupled_task,
        [
            (rwre, n, size, step_budget, seed, first)
            for size, first in zip(sizes, firsts, strict=True)
        ],
        workers,
    )

    def _run(name: str, reflect: bool) -> RwreRun:
        steps = np.concatenate([p[f"{name}_steps"] for p in parts])
        return RwreRun(
            target_n=n,
            hitting_times=steps,
            max_crossings=np.concatenate([p[f"{name}_max"] for p in parts]),
            left_crossings=np.concatenate([p[f"{name}_left"] for p in parts]),
            censored=np.concatenate([p[f"{name}_censored"] for p in parts]),
            seed=seed,
            reflect_at_origin=reflect,
        )

    return _run(BOUNDARY_FREE, False), _run(BOUNDARY_REFLECTED, True)


def _walk_time_task(
    rwre: RwreModel, t: int, reps: int, seed: int, index: int
) -> np.ndarray:
    batch = _WalkBatch(
        rwre, reps, task_rng(seed, TASK_WALK_TIME, index), _INITIAL_RIGHT_SITES,
        track_crossings=False,
    )
    pos, _, _, _ = batch.run(None, t, t)
    return pos


def walk_positions(
    rwre: RwreModel, t: int, reps: int, seed: int = 0, workers: int = 1
) -> np.ndarray:
    """Positions W_t of ``reps`` independent walks after ``t`` steps."""
    sizes = split_tasks(reps, WALKS_PER_TASK)
    parts = run_tasks(
        _walk_time_task,
        [(rwre, t, size, seed, i) for i, size in enumerate(sizes)],
        workers,
    )
    return np.concatenate(parts) if parts else np.empty(0, dtype=np.int64)


def _offspring_step(
    states: np.ndarray, model: EnvironmentModel, rng: np.random.Generator
) -> np.ndarray:
    idx = sample_atom_indices(model, states.size, rng)
    out = np.zeros_like(states)
    for j, atom in enumerate(model.atoms):
        sel = idx == j
        if sel.any():
            out[sel] = atom.offspring.sample_sum(states[sel], rng)
    return out


def _lchain_task(
    model: EnvironmentModel,
    n: int,
    reps: int,
    boundary: str,
    record: bool,
    seed: int,
    index: int,
) -> tuple[np.ndarray, np.ndarray, np.ndarray | None]:
    rng = task_rng(seed, TASK_LCHAIN, index)
    state = np.ones(reps, dtype=np.int64)
    total = state.copy()
    values = np.empty((reps, n), dtype=np.int64) if record else None
    if values is not None:
        values[:, 0] = state
    for i in range(1, n):
        state = evolve(state, model, rng)
        total += state
        if values is not None:
            values[:, i] = state
    extra = np.zeros(reps, dtype=np.int64)
    if boundary == BOUNDARY_FREE:
        # left steps from site 0, then from -1, -2, ... until extinction
        count = _offspring_step(state, model, rng)
        while count.any():
            extra += count
            count = _offspring_step(count, model, rng)
        extra *= 2
    return 2 * total - n, extra, values


def simulate_L_chain(  # noqa: N802
    model: EnvironmentModel,
    n: int,
    reps: int = 1,
    seed: int = 0,
    workers: int = 1,
    boundary: str = BOUNDARY_REFLECTED,
    *,
    record_values: bool = False,
) -> LChainRun:
    """
    Run L_1 = 1, L_i = sum^{L_{i-1}} G + 1 for i <= n in ``reps`` replicates.

    Under reflection xi_0 = 1 and R_n = 0. With ``boundary="free"`` the
    left-of-origin steps R_n come from the offspring-only chain started at
    L_n, which dies out since E log m < 0.
    """
    if n < 1:
        msg = f"chain length must be positive: {n!r}"
        raise DomainError(msg)
    if boundary not in (BOUNDARY_REFLECTED, BOUNDARY_FREE):
        msg = f"unknown boundary {boundary!r}"
        raise DomainError(msg)
    sizes = split_tasks(reps, LCHAINS_PER_TASK)
    parts = run_tasks(
        _lchain_task,
        [(model, n, size, boundary, record_values, seed, i) for i, size in enumerate(sizes)],
        workers,
    )
    return LChainRun(
        sum2l_minus_n=np.concatenate([p[0] for p in parts]),
        boundary=boundary,
        values=np.concatenate([p[2] for p in parts]) if record_values else None,
        boundary_sums=np.concatenate([p[1] for p in parts]),
    )


def _boundary(rwre: RwreModel) -> str:
    return BOUNDARY_REFLECTED if rwre.reflect_at_origin else BOUNDARY_FREE


def branching_hitting_times(
    rwre: RwreModel, n: int, reps: int, seed: int = 0, workers: int = 1
) -> np.ndarray:
    """T_n drawn as 2 sum L - n + R_n."""
    run = simulate_L_chain(derive_ratio_model(rwre), n, reps, seed, workers, _boundary(rwre))
    return run.sum2l_minus_n + run.boundary_sums


def _uncensored_times(walks: RwreRun) -> np.ndarray:
    """Hitting times of walks that finished; too many censored walks is an error."""
    if walks.censored_fraction > MAX_CENSORED_FRACTION:
        msg = (
            f"{walks.censored_fraction:.2g} of walks to {walks.target_n} exceeded the step "
            f"budget, limit {MAX_CENSORED_FRACTION:g}"
        )
        raise StepBudgetExceededError(msg)
    return walks.hitting_times[~walks.censored]


def hitting_time_equivalence(
    rwre: RwreModel,
    n: int,
    reps: int,
    seed: int = 0,
    workers: int = 1,
    step_budget: int = DEFAULT_STEP_BUDGET,
) -> EquivalenceReport:
    """
    Two-sample KS between walk hitting times and their branching form.

    Censored walks are dropped and their fraction reported.

    :raises StepBudgetExceededError: when more than 0.1% of walks are censored
    """
    walks = simulate_walk(rwre, n, reps, seed, workers, step_budget)
    walk_times = _uncensored_times(walks)
    chain_times = branching_hitting_times(rwre, n, reps, seed, workers)
    result = stats.ks_2samp(walk_times, chain_times)
    critical = ks_critical_value(walk_times.size, chain_times.size, KS_CRITICAL_1PCT)
    report = EquivalenceReport(
        n=n,
        reps=reps,
        ks_distance=float(result.statistic),
        critical_value=critical,
        p_value=float(result.pvalue),
        passed=bool(result.statistic < critical),
        censored_fraction=walks.censored_fraction,
    )
    _LOGGER.info("hitting-time equivalence: %s", report)
    return report


def _limit_samples(
    rwre: RwreModel,
    n: int,
    reps: int,
    engine: str,
    seed: int,
    workers: int,
    step_budget: int,
) -> tuple[np.ndarray, float]:
    if engine == ENGINE_BRANCHING:
        return branching_hitting_times(rwre, n, reps, seed, workers).astype(float), 0.0
    walks = simulate_walk(rwre, n, reps, seed, workers, step_budget)
    return _uncensored_times(walks).astype(float), walks.censored_fraction


def hitting_time_limits(
    rwre: RwreModel,
    kappa: float,
    c: float | None,
    n_grid: tuple[int, ...],
    reps: int,
    seed: int = 0,
    workers: int = 1,
    engine: str = ENGINE_AUTO,
    transform_t: int | None = None,
    step_budget: int = DEFAULT_STEP_BUDGET,
) -> HittingTimeLimitsReport:
    """
    Scaled hitting times across ``n_grid`` and the KS between consecutive n.

    kappa < 1 scales T_n by n^(1/kappa); kappa in (1, 2) centers by
    n (2 E L - 1); kappa = 1 centers by n (2 E[L 1{L <= C n}] - 1); kappa > 2
    centers like (1, 2) and scales by sqrt(n). ``engine="auto"`` walks for
    kappa >= 1 and uses the branching form below 1, where T_n is too
    heavy-tailed to simulate step by step.
    """
    regime = kappa_regime(kappa)
    if engine == ENGINE_AUTO:
        engine = ENGINE_BRANCHING if regime == REGIME_SUB1 else ENGINE_WALK
    ratio_model = derive_ratio_model(rwre)
    mean_l = stationary_mean(ratio_model) if regime != REGIME_SUB1 else 0.0
    batch = None
    if regime == REGIME_EQ1:
        burn_in = recommended_burnin(ratio_model, kappa)
        batch = sample_stationary(ratio_model, burn_in, max(100 * max(n_grid), 100_000), seed, workers)
        if c is None:
            c = goldie_c_formula(ratio_model, kappa, batch, task_rng(seed, TASK_GOLDIE, 0)).value

    scaled: dict[int, np.ndarray] = {}
    centering: dict[int, float] = {}
    censored = 0.0
    for n in n_grid:
        times, frac = _limit_samples(rwre, n, reps, engine, seed, workers, step_budget)
        censored = max(censored, frac)
        if regime == REGIME_SUB1:
            center, scale = 0.0, n ** (1.0 / kappa)
        elif regime == REGIME_EQ1:
            b_n, _ = centering_b_n(batch.values, c * n, n)
            center, scale = 2.0 * c * n * b_n - n, float(n)
        elif regime == REGIME_ABOVE2:
            center, scale = n * (2.0 * mean_l - 1.0), math.sqrt(n)
        else:
            center, scale = n * (2.0 * mean_l - 1.0), n ** (1.0 / kappa)
        centering[n] = center
        scaled[n] = (times - center) / scale
    ks = tuple(
        float(stats.ks_2samp(scaled[a], scaled[b]).statistic)
        for a, b in zip(n_grid, n_grid[1:], strict=False)
    )
    transform_err = None
    if transform_t is not None and regime == REGIME_SUB1:
        transform_err = _transform_error(
            rwre, kappa, transform_t, reps, scaled[n_grid[-1]], seed, workers
        )
    return HittingTimeLimitsReport(
        regime=regime,
        kappa=kappa,
        n_grid=tuple(n_grid),
        engine=engine,
        ks_consecutive=ks,
        centering=centering,
        censored_fraction=censored,
        transform_relative_error=transform_err,
        scaled_samples=scaled,
    )


def _transform_error(
    rwre: RwreModel,
    kappa: float,
    t: int,
    reps: int,
    scaled_times: np.ndarray,
    seed: int,
    workers: int,
) -> float:
    """
    Largest relative gap between quantiles of W_t / t^kappa and the
    q -> q^-kappa image of the scaled hitting-time quantiles.
    """
    positions = walk_positions(rwre, t, reps, seed, workers) / t**kappa
    probs = np.asarray(_TRANSFORM_QUANTILES)
    observed = np.quantile(positions, probs)
    expected = np.quantile(scaled_times, 1.0 - probs) ** (-kappa)
    return float(np.max(np.abs(observed / expected - 1.0)))


def most_visited_edge(
    rwre: RwreModel,
    n: int,
    reps: int,
    theta: float,
    kappa: float,
    c: float | None,
    seed: int = 0,
    workers: int = 1,
    step_budget: int = DEFAULT_STEP_BUDGET,
) -> FrechetFit:
    """KS of max_k V_k / (2 a_n) against exp(-theta x^-kappa)."""
    a_n, source = scaling_a_n(derive_ratio_model(rwre), kappa, n, c, seed, workers)
    walks = simulate_walk(rwre, n, reps, seed, workers, step_budget)
    _uncensored_times(walks)  # raises past the censoring limit
    maxima = walks.max_crossings[~walks.censored]
    ks = frechet_ks(maxima, 2.0 * a_n, theta, kappa)
    _LOGGER.info("most visited edge n=%s: KS %.4f", n, ks)
    return FrechetFit(
        block_length=n,
        maxima_count=int(maxima.size),
        a_n=a_n,
        ks_distance=ks,
        theta=theta,
        kappa=kappa,
        a_n_source=source,
        scaled_maxima=maxima / (2.0 * a_n),
    )
