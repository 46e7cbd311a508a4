"""Subcommand orchestration for bpire."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Any

import numpy as np
from scipy import stats

from .chain_sim import (
    fixed_point_residual,
    recommended_burnin,
    sample_stationary,
    stationary_paths,
)
from .const import (
    _LOGGER,
    BUDGET_FULL,
    BUDGETS,
    DEFAULT_THRESHOLD_QUANTILE,
    EXIT_ACCEPTANCE,
    EXIT_OK,
    EXIT_RUNTIME,
    EXIT_USAGE,
    EXIT_VALIDATION,
    GOLDIE_C_KAPPA_ONE,
    KAPPA_ONE_TOL,
    KS_CRITICAL_1PCT,
    PRESET_KAPPAS,
    SITE_PRESET_KAPPAS,
    TASK_GOLDIE,
    TASK_RESIDUAL,
)
from .cramer import cramer_lambda, mean_log_m, solve_kappa
from .data import AcceptanceCheck
from .env_model import EnvironmentModel, tilt
from .exceptions import (
    BpireError,
    FingerprintMismatchError,
    NotTwoPointLatticeError,
    ParseError,
    RegimeMismatchError,
    RunFailedError,
    UsageError,
    ValidationError,
)
from .extremes import (
    BLOCKS_LOG,
    frechet_gof,
    theta_blocks,
    theta_direct,
    theta_lattice_exact,
)
from .model_config import parse_model
from .report import (
    KEY_MODEL_FINGERPRINT,
    RunManifest,
    compare_reports,
    write_batch_csv,
    write_json_report,
    write_manifest,
)
from .rwre import (
    RwreModel,
    derive_ratio_model,
    hitting_time_equivalence,
    hitting_time_limits,
    most_visited_edge,
)
from .stable_limits import (
    REGIME_ABOVE2,
    REGIME_EQ1,
    REGIME_SUB1,
    centering_b_n,
    centering_shift,
    cluster_moment,
    kappa_regime,
    partial_sum_experiment,
    stable_index_fit,
    stable_scale_d,
)
from .tail_analysis import anticlustering_diagnostic, spectral_ratio_test, tail_report
from .utils import task_rng

if TYPE_CHECKING:
    from collections.abc import Callable

    from .data import StableFitResult, ThetaEstimate

SUBCOMMANDS = ("kappa", "simulate", "tails", "extremes", "sums", "rwre", "report", "compare")

RELATION_CLOSE = "~"
RELATION_BELOW = "<"
RELATION_ABOVE = ">"

_ANTICLUSTER_K = (1, 5, 20)
_ANTICLUSTER_R = 100
_FILE_SUFFIXES = (".json", ".csv")
# 2^6 apart so the log-periodic part of lattice tails cancels
_CENTERING_GROWTH_N = (128, 8192)


@dataclass
class RunOutcome:
    """What a subcommand produced."""

    results: dict[str, Any] = field(default_factory=dict)
    bulk: dict[str, np.ndarray] = field(default_factory=dict)
    checks: list[AcceptanceCheck] = field(default_factory=list)
    exit_code: int = EXIT_OK
    files: list[Path] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)


def make_check(
    name: str,
    value: float,
    expected: float,
    tolerance: float = 0.0,
    relation: str = RELATION_CLOSE,
    note: str = "",
) -> AcceptanceCheck:
    """Acceptance row; ``~`` means within tolerance, ``<``/``>`` a strict bound."""
    if relation == RELATION_CLOSE:
        passed = abs(value - expected) <= tolerance
    elif relation == RELATION_BELOW:
        passed = value < expected
    else:
        passed = value > expected
    return AcceptanceCheck(
        name=name,
        value=float(value),
        expected=float(expected),
        tolerance=float(tolerance),
        passed=bool(passed),
        relation=relation,
        note=note,
    )


def _regime_or_none(kappa: float) -> str | None:
    """Regime of kappa, None next to 2 where no limit is checked."""
    try:
        return kappa_regime(kappa)
    except RegimeMismatchError:
        _LOGGER.info("kappa=%.4f is next to 2; skipping the partial-sum limits", kappa)
        return None


def _ks_tolerance(base: float, reps: int) -> float:
    """The stated KS bound, loosened to the 1% critical value for small samples."""
    return max(base, KS_CRITICAL_1PCT / math.sqrt(reps))


class ExperimentCoordinator:
    """Runs one subcommand, writes its files and maps failures to exit codes."""

    def __init__(
        self,
        out: Path,
        seed: int,
        workers: int = 1,
        budget: str = "quick",
    ) -> None:
        """Initialize."""
        if budget not in BUDGETS:
            msg = f"unknown budget {budget!r}; choose from {sorted(BUDGETS)}"
            raise UsageError(msg)
        out = Path(out)
        # a .json or .csv path names the main file; its directory takes the rest
        if out.suffix.lower() in _FILE_SUFFIXES and not out.is_dir():
            self.out_dir, self.out_file = out.parent, out
        else:
            self.out_dir, self.out_file = out, None
        self.seed = int(seed)
        self.workers = max(1, int(workers))
        self.budget = budget
        self._handlers: dict[str, Callable[[Any, dict[str, Any]], RunOutcome]] = {
            "kappa": self._run_kappa,
            "simulate": self._run_simulate,
            "tails": self._run_tails,
            "extremes": self._run_extremes,
            "sums": self._run_sums,
            "rwre": self._run_rwre,
            "report": self._run_report,
        }

    def run(self, subcommand: str, model_source: str | None, flags: dict[str, Any]) -> RunOutcome:
        """
        Parse the model, run ``subcommand`` and write JSON, CSV and manifest.

        :raises RunFailedError: carrying exit code 1 (usage), 2 (validation)
            or 3 (runtime)
        """
        start = time.perf_counter()
        try:
            if subcommand not in self._handlers:
                msg = f"unknown subcommand {subcommand!r}"
                raise UsageError(msg)
            if not model_source:
                msg = f"{subcommand} needs --model (a preset name or a model file)"
                raise UsageError(msg)
            model = parse_model(model_source)
            _LOGGER.info("%s on %s (seed %s, %s workers)", subcommand, model_source, self.seed, self.workers)
            params = self._params(flags)
            if model_source in PRESET_KAPPAS or model_source in SITE_PRESET_KAPPAS:
                params.setdefault("preset", model_source)
            outcome = self._handlers[subcommand](model, params)
        except UsageError as exception:
            raise RunFailedError(str(exception), EXIT_USAGE) from exception
        except (ParseError, ValidationError) as exception:
            raise RunFailedError(str(exception), EXIT_VALIDATION) from exception
        except BpireError as exception:
            _LOGGER.exception("%s failed", subcommand)
            raise RunFailedError(str(exception), EXIT_RUNTIME) from exception

        manifest = RunManifest(
            master_seed=self.seed,
            model_fingerprint=model.fingerprint(),
            subcommand=subcommand,
            flags={"model": str(model_source), "budget": self.budget, **flags},
            wall_time=time.perf_counter() - start,
            workers=self.workers,
        )
        self._write(subcommand, outcome, manifest)
        if outcome.checks and not outcome.passed:
            outcome.exit_code = EXIT_ACCEPTANCE
        return outcome

    def compare(self, paths: list[Path]) -> RunOutcome:
        """
        Put the numeric results of reports from one model side by side.

        :raises RunFailedError: exit code 1 for fewer than two reports, 2 when
            a report is unreadable or stems from another model
        """
        start = time.perf_counter()
        if len(paths) < 2:
            msg = "compare needs at least two reports"
            raise RunFailedError(msg, EXIT_USAGE)
        try:
            table = compare_reports(paths)
        except (ParseError, FingerprintMismatchError) as exception:
            raise RunFailedError(str(exception), EXIT_VALIDATION) from exception
        _LOGGER.info("compared %s reports on %s shared values", len(paths), len(table["values"]))
        manifest = RunManifest(
            master_seed=self.seed,
            model_fingerprint=table[KEY_MODEL_FINGERPRINT],
            subcommand="compare",
            flags={"reports": table["reports"]},
            wall_time=time.perf_counter() - start,
            workers=self.workers,
        )
        outcome = RunOutcome(results=table)
        self._write("compare", outcome, manifest)
        return outcome

    def _params(self, flags: dict[str, Any]) -> dict[str, Any]:
        """Budget table with explicit flags on top."""
        params = dict(BUDGETS[self.budget])
        params.update({k: v for k, v in flags.items() if v is not None})
        return params

    def _write(self, subcommand: str, outcome: RunOutcome, manifest: RunManifest) -> None:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        results = dict(outcome.results)
        if outcome.checks:
            results["checks"] = [check.as_dict() for check in outcome.checks]
            results["passed"] = outcome.passed
        outcome.files.append(
            write_json_report(self._target(".json", f"{subcommand}.json"), results, manifest)
        )
        for i, (name, values) in enumerate(outcome.bulk.items()):
            default = f"{subcommand}_{name}.csv"
            path = self._target(".csv", default) if i == 0 else self.out_dir / default
            outcome.files.append(write_batch_csv(path, values, manifest))
        outcome.files.append(write_manifest(self.out_dir, manifest))

    def _target(self, suffix: str, default: str) -> Path:
        if self.out_file is not None and self.out_file.suffix.lower() == suffix:
            return self.out_file
        return self.out_dir / default

    # shared pieces

    @staticmethod
    def _environment(model: EnvironmentModel | RwreModel) -> EnvironmentModel:
        if isinstance(model, RwreModel):
            return derive_ratio_model(model)
        return model

    @staticmethod
    def _site_law(model: EnvironmentModel | RwreModel) -> RwreModel:
        if not isinstance(model, RwreModel):
            msg = "rwre needs a site law (a model file with 'sites' or SITES-A..C)"
            raise UsageError(msg)
        return model

    def _theta(self, model: EnvironmentModel, kappa: float, reps: int) -> ThetaEstimate:
        try:
            return theta_lattice_exact(model, kappa)
        except NotTwoPointLatticeError:
            _LOGGER.debug("no lattice closed form; theta by simulation")
        return theta_direct(model, kappa, reps=reps, seed=self.seed, workers=self.workers)

    def _paths(self, model: EnvironmentModel, kappa: float, params: dict[str, Any]) -> np.ndarray:
        return stationary_paths(
            model,
            params["path_count"],
            params["path_length"],
            recommended_burnin(model, kappa),
            self.seed,
            self.workers,
        )

    # subcommands

    def _run_kappa(self, model: EnvironmentModel | RwreModel, params: dict[str, Any]) -> RunOutcome:  # noqa: ARG002
        env = self._environment(model)
        report = solve_kappa(env)
        tilted = tilt(env, report.kappa)
        return RunOutcome(
            results={
                **report.as_dict(),
                "regime": _regime_or_none(report.kappa),
                "tilted_probs": list(tilted.probs),
                "tilted_mean_log_m": mean_log_m(tilted),
            }
        )

    def _run_simulate(self, model: EnvironmentModel | RwreModel, params: dict[str, Any]) -> RunOutcome:
        env = self._environment(model)
        kappa = solve_kappa(env).kappa
        burn_in = params.get("burn_in")
        if burn_in is None:
            burn_in = recommended_burnin(env, kappa)
        batch = sample_stationary(env, burn_in, params["count"], self.seed, self.workers)
        residual = fixed_point_residual(env, batch, task_rng(self.seed, TASK_RESIDUAL, 0))
        return RunOutcome(
            results={
                **batch.as_dict(),
                "bias_bound": batch.bias_bound,
                "count": len(batch),
                "mean": float(batch.values.mean()),
                "max": int(batch.values.max()),
                "fixed_point_ks": residual,
            },
            bulk={"batch": batch.values},
        )

    def _run_tails(self, model: EnvironmentModel | RwreModel, params: dict[str, Any]) -> RunOutcome:
        env = self._environment(model)
        kappa = solve_kappa(env).kappa
        batch = sample_stationary(
            env, recommended_burnin(env, kappa), params["count"], self.seed, self.workers
        )
        report = tail_report(env, batch, params["hill_k"], task_rng(self.seed, TASK_GOLDIE, 1))
        paths = self._paths(env, kappa, params)
        lag = params.get("lag", 1)
        spectral = {
            str(lag_): spectral_ratio_test(env, kappa, lag_, paths).as_dict()
            for lag_ in (lag, -lag)
        }
        threshold = float(np.quantile(paths, DEFAULT_THRESHOLD_QUANTILE))
        anticluster = anticlustering_diagnostic(
            threshold, list(_ANTICLUSTER_K), _ANTICLUSTER_R, paths
        )
        return RunOutcome(
            results={
                "kappa": kappa,
                "tail": report.as_dict(),
                "spectral": spectral,
                "anticlustering": anticluster,
            },
            bulk={"batch": batch.values},
        )

    def _run_extremes(self, model: EnvironmentModel | RwreModel, params: dict[str, Any]) -> RunOutcome:
        env = self._environment(model)
        kappa = solve_kappa(env).kappa
        results: dict[str, Any] = {"kappa": kappa}
        try:
            results["theta_exact"] = theta_lattice_exact(env, kappa).as_dict()
        except NotTwoPointLatticeError as exception:
            results["theta_exact"] = None
            _LOGGER.info("lattice theta unavailable: %s", exception)
        direct = theta_direct(
            env, kappa, reps=params["theta_reps"], seed=self.seed, workers=self.workers
        )
        results["theta_direct"] = direct.as_dict()
        blocks = theta_blocks(
            self._paths(env, kappa, params), params["block_length"], variant=BLOCKS_LOG
        )
        results["theta_blocks"] = blocks.as_dict()
        theta = results["theta_exact"]["value"] if results["theta_exact"] else direct.value
        fit = frechet_gof(
            env, kappa, params.get("c"), params["n"], params["reps"], theta, self.seed, self.workers
        )
        results["frechet"] = fit.as_dict()
        return RunOutcome(results=results, bulk={"scaled_maxima": fit.scaled_maxima})

    def _run_sums(self, model: EnvironmentModel | RwreModel, params: dict[str, Any]) -> RunOutcome:
        env = self._environment(model)
        kappa = solve_kappa(env).kappa
        experiment = partial_sum_experiment(
            env, kappa, params.get("c"), params["n"], params["reps"], self.seed, self.workers
        )
        results: dict[str, Any] = {"kappa": kappa, "sums": experiment.as_dict()}
        if experiment.kappa_regime == REGIME_ABOVE2:
            sums = experiment.normalized_sums
            results["variance_ratio"] = float(np.var(sums, ddof=1))
            results["normal_ks"] = float(stats.kstest(sums, "norm").statistic)
        else:
            fit = stable_index_fit(experiment.normalized_sums)
            results["stable_fit"] = fit.as_dict()
            results["fitted_scale_pow_kappa"] = fit.scale_hat**kappa
            try:
                cluster = cluster_moment(
                    env, kappa, reps=params["theta_reps"], seed=self.seed, workers=self.workers
                )
            except RegimeMismatchError:
                _LOGGER.debug("no cluster moment above kappa = 1")
            else:
                theta = self._theta(env, kappa, params["theta_reps"]).value
                results["cluster_moment"] = cluster.as_dict()
                results["theta"] = theta
                results["stable_scale_d"] = stable_scale_d(theta, cluster.value, kappa)
        return RunOutcome(results=results, bulk={"normalized_sums": experiment.normalized_sums})

    def _run_rwre(self, model: EnvironmentModel | RwreModel, params: dict[str, Any]) -> RunOutcome:
        rwre = self._site_law(model)
        env = derive_ratio_model(rwre)
        kappa = solve_kappa(env).kappa
        n, reps = params["walk_n"], params["walk_reps"]
        equivalence = hitting_time_equivalence(rwre, n, reps, self.seed, self.workers)
        limits = None
        if _regime_or_none(kappa) is not None:
            limits = hitting_time_limits(
                rwre,
                kappa,
                params.get("c"),
                (n, 2 * n),
                reps,
                self.seed,
                self.workers,
                transform_t=params.get("transform_t"),
            ).as_dict()
        theta = self._theta(env, kappa, params["theta_reps"]).value
        edge = most_visited_edge(rwre, n, reps, theta, kappa, params.get("c"), self.seed, self.workers)
        return RunOutcome(
            results={
                "kappa": kappa,
                "drift": rwre.drift(),
                "equivalence": equivalence.as_dict(),
                "limits": limits,
                "most_visited_edge": edge.as_dict(),
            },
            bulk={"edge_scaled_maxima": edge.scaled_maxima},
        )

    # acceptance suite

    def _guarded(self, name: str, func: Callable[[], list[AcceptanceCheck]]) -> list[AcceptanceCheck]:
        """Run one group of checks; a module error fails the group instead of the run."""
        try:
            return func()
        except (ValidationError, ParseError):
            raise
        except BpireError as exception:
            _LOGGER.warning("acceptance check %s could not run: %s", name, exception)
            return [make_check(name, math.nan, math.nan, note=str(exception))]

    def _run_report(self, model: EnvironmentModel | RwreModel, params: dict[str, Any]) -> RunOutcome:
        name = params.get("preset")
        if isinstance(model, RwreModel):
            checks = self._site_checks(model, params, name)
        else:
            checks = self._environment_checks(model, params, name)
        for check in checks:
            _LOGGER.info(
                "%-28s %s  value %.6g  expected %s %.6g (tol %.3g)%s",
                check.name,
                "PASS" if check.passed else "FAIL",
                check.value,
                check.relation,
                check.expected,
                check.tolerance,
                f"  [{check.note}]" if check.note else "",
            )
        return RunOutcome(results={"preset": name}, checks=checks)

    def _environment_checks(
        self, model: EnvironmentModel, params: dict[str, Any], name: str | None
    ) -> list[AcceptanceCheck]:
        full = self.budget == BUDGET_FULL
        report = solve_kappa(model)
        kappa = report.kappa
        checks = [make_check("lambda(kappa)", cramer_lambda(model, kappa), 1.0, 1e-9)]
        if name in PRESET_KAPPAS:
            checks.append(make_check("kappa", kappa, PRESET_KAPPAS[name], 1e-9))
        checks.append(
            make_check("tilted E log m", mean_log_m(tilt(model, kappa)), 0.0, relation=RELATION_ABOVE)
        )

        batch = sample_stationary(
            model, recommended_burnin(model, kappa), params["count"], self.seed, self.workers
        )

        def tails() -> list[AcceptanceCheck]:
            tail = tail_report(model, batch, params["hill_k"], task_rng(self.seed, TASK_GOLDIE, 1))
            rows = [make_check("hill kappa", tail.hill_kappa, kappa, 0.1 * kappa)]
            if abs(kappa - 1.0) < KAPPA_ONE_TOL:
                target = GOLDIE_C_KAPPA_ONE
                rows.append(make_check("plateau C", tail.plateau_c, target, 0.15 * target))
                if tail.goldie is not None:
                    rows.append(make_check("goldie C", tail.goldie.value, target, 0.15 * target))
            return rows

        checks.extend(self._guarded("tails", tails))
        paths = self._paths(model, kappa, params)

        def spectral() -> list[AcceptanceCheck]:
            return [
                make_check(
                    f"spectral lag {lag}",
                    spectral_ratio_test(model, kappa, lag, paths).ks_distance,
                    0.03,
                    relation=RELATION_BELOW,
                )
                for lag in (1, -1)
            ]

        def anticlustering() -> list[AcceptanceCheck]:
            threshold = float(np.quantile(paths, DEFAULT_THRESHOLD_QUANTILE))
            probs = anticlustering_diagnostic(threshold, list(_ANTICLUSTER_K), _ANTICLUSTER_R, paths)
            values = [probs[k] for k in _ANTICLUSTER_K]
            monotone = all(a >= b for a, b in zip(values, values[1:], strict=False))
            return [
                make_check("anticlustering monotone", float(monotone), 1.0),
                make_check(
                    f"anticlustering k={_ANTICLUSTER_K[-1]}", values[-1], 0.05, relation=RELATION_BELOW
                ),
            ]

        checks.extend(self._guarded("spectral", spectral))
        checks.extend(self._guarded("anticlustering", anticlustering))

        theta_holder: dict[str, float] = {}

        def extremal_index() -> list[AcceptanceCheck]:
            direct = theta_direct(
                model, kappa, reps=params["theta_reps"], seed=self.seed, workers=self.workers
            )
            blocks = theta_blocks(paths, params["block_length"], variant=BLOCKS_LOG)
            try:
                exact = theta_lattice_exact(model, kappa).value
            except NotTwoPointLatticeError:
                theta_holder["theta"] = direct.value
                return [make_check("theta blocks", blocks.value, direct.value, 0.05)]
            theta_holder["theta"] = exact
            return [
                make_check(
                    "theta direct",
                    direct.value,
                    exact,
                    3.0 * direct.std_err + (direct.bias_bound or 0.0),
                ),
                make_check("theta blocks", blocks.value, exact, 0.05),
            ]

        checks.extend(self._guarded("theta", extremal_index))

        def frechet() -> list[AcceptanceCheck]:
            theta = theta_holder.get("theta") or self._theta(model, kappa, params["theta_reps"]).value
            fit = frechet_gof(
                model, kappa, params.get("c"), params["n"], params["reps"], theta, self.seed, self.workers
            )
            return [
                make_check(
                    "frechet KS",
                    fit.ks_distance,
                    _ks_tolerance(0.03, params["reps"]),
                    relation=RELATION_BELOW,
                )
            ]

        checks.extend(self._guarded("frechet", frechet))

        fit_holder: dict[str, StableFitResult] = {}

        def sums() -> list[AcceptanceCheck]:
            if _regime_or_none(kappa) is None:
                return []
            experiment = partial_sum_experiment(
                model, kappa, params.get("c"), params["n"], params["reps"], self.seed, self.workers, batch
            )
            values = experiment.normalized_sums
            if experiment.kappa_regime == REGIME_SUB1:
                fit = fit_holder["fit"] = stable_index_fit(values)
                return [
                    make_check("stable alpha", fit.alpha_hat, kappa, 0.05 if full else 0.1),
                    make_check("sums positive", float((values > 0).all()), 1.0),
                ]
            if experiment.kappa_regime == REGIME_ABOVE2:
                return [
                    make_check("gaussian variance", float(np.var(values, ddof=1)), 1.0, 0.15),
                    make_check(
                        "gaussian KS",
                        float(stats.kstest(values, "norm").statistic),
                        _ks_tolerance(0.02, params["reps"]),
                        relation=RELATION_BELOW,
                    ),
                ]
            if experiment.kappa_regime == REGIME_EQ1:
                # a_n = C n, so b_n grows like log n with unit slope
                c = experiment.a_n / experiment.n
                small, large = _CENTERING_GROWTH_N
                b_small, _ = centering_b_n(batch.values, c * small, small)
                b_large, _ = centering_b_n(batch.values, c * large, large)
                growth = math.log(large / small)
                return [make_check("b_n log growth", b_large - b_small, growth, 0.1 * growth)]
            # n P(X > a_n) = 1 at the empirical quantile, about 1000 exceedances
            shift_n = max(2, batch.values.size // 1000)
            a_n = float(np.quantile(batch.values, 1.0 - 1.0 / shift_n))
            shift = centering_shift(batch.values, a_n, shift_n, float(batch.values.mean()))
            target = kappa / (kappa - 1.0)
            return [make_check("alternative centering shift", shift, target, 0.2 * target)]

        def scale() -> list[AcceptanceCheck]:
            fit = fit_holder.get("fit")
            if fit is None:
                return []
            theta = theta_holder.get("theta") or self._theta(model, kappa, params["theta_reps"]).value
            cluster = cluster_moment(
                model, kappa, reps=params["theta_reps"], seed=self.seed, workers=self.workers
            )
            d = stable_scale_d(theta, cluster.value, kappa)
            return [make_check("stable scale d", fit.scale_hat**kappa, d, 0.2 * d)]

        checks.extend(self._guarded("sums", sums))
        checks.extend(self._guarded("stable scale", scale))
        return checks

    def _site_checks(
        self, rwre: RwreModel, params: dict[str, Any], name: str | None
    ) -> list[AcceptanceCheck]:
        env = derive_ratio_model(rwre)
        kappa = solve_kappa(env).kappa
        n, reps = params["walk_n"], params["walk_reps"]
        checks = []
        if name in SITE_PRESET_KAPPAS:
            checks.append(make_check("kappa", kappa, SITE_PRESET_KAPPAS[name], 1e-9))

        def equivalence() -> list[AcceptanceCheck]:
            report = hitting_time_equivalence(rwre, n, reps, self.seed, self.workers)
            return [
                make_check(
                    "walk vs L-chain KS",
                    report.ks_distance,
                    report.critical_value,
                    relation=RELATION_BELOW,
                )
            ]

        def limits() -> list[AcceptanceCheck]:
            if _regime_or_none(kappa) != REGIME_SUB1:
                return []
            report = hitting_time_limits(rwre, kappa, params.get("c"), (n, 2 * n), reps, self.seed, self.workers)
            return [
                make_check(
                    "T_n / n^(1/kappa) KS",
                    report.ks_consecutive[0],
                    _ks_tolerance(0.05, reps),
                    relation=RELATION_BELOW,
                )
            ]

        def edge() -> list[AcceptanceCheck]:
            theta = self._theta(env, kappa, params["theta_reps"]).value
            fit = most_visited_edge(rwre, n, reps, theta, kappa, params.get("c"), self.seed, self.workers)
            return [
                make_check(
                    "most visited edge KS",
                    fit.ks_distance,
                    _ks_tolerance(0.05, reps),
                    relation=RELATION_BELOW,
                )
            ]

        checks.extend(self._guarded("equivalence", equivalence))
        checks.extend(self._guarded("limits", limits))
        checks.extend(self._guarded("edge", edge))
        return checks
