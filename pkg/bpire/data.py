"""Result records for bpire."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import TYPE_CHECKING, Any

import numpy as np

from .utils import to_builtin

if TYPE_CHECKING:
    from .env_model import EnvironmentModel


class _Record:
    """Mixin giving every record a JSON-friendly view."""

    # bulky per-replicate arrays go to CSV, not JSON
    _bulk_fields: tuple[str, ...] = ()

    def as_dict(self, *, include_bulk: bool = False) -> dict[str, Any]:
        data = asdict(self)  # type: ignore[call-overload]
        if not include_bulk:
            for name in self._bulk_fields:
                data.pop(name, None)
        return to_builtin(data)


@dataclass(frozen=True)
class CramerReport(_Record):
    """Cramer root and the quantities checked alongside it."""

    kappa: float
    lambda_prime_at_kappa: float
    mean_log_m: float
    subcritical: bool
    nonarithmetic_hint: bool
    lattice_span: float | None = None


@dataclass(frozen=True)
class ChainConfig:
    """Start, burn-in and seed of a single forward trajectory."""

    model: EnvironmentModel
    initial_value: int = 0
    burn_in: int = 0
    seed: int = 0


@dataclass(frozen=True)
class TrajectorySample(_Record):
    """Consecutive chain values; ``values[0]`` is the state after burn-in + 1 steps."""

    values: np.ndarray
    start_index: int


@dataclass(frozen=True)
class StationaryBatch(_Record):
    """Independent forward-from-zero chains stopped after ``burn_in`` steps."""

    values: np.ndarray
    burn_in: int
    bias_bound_exponent: float
    seed: int
    model_fingerprint: str
    alpha_star: float = 1.0

    _bulk_fields = ("values",)

    @property
    def bias_bound(self) -> float:
        return float(np.exp(self.bias_bound_exponent))

    def __len__(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class GoldieEstimate(_Record):
    """Monte Carlo Goldie constant with its standard error."""

    value: float
    std_err: float
    numerator: float
    numerator_std_err: float


@dataclass(frozen=True)
class TailReport(_Record):
    hill_kappa: float
    hill_std_err: float
    plateau_c: float
    window: tuple[float, float]
    sample_size: int
    hill_k: int
    lattice_period: float | None = None
    goldie: GoldieEstimate | None = None


@dataclass(frozen=True)
class SpectralTestReport(_Record):
    """Exceedance ratio law at one lag against its reference."""

    lag: int
    threshold_quantile: float
    empirical_ratio_law: dict[float, float]
    reference_law: dict[float, float]
    ks_distance: float
    exceedances: int


@dataclass(frozen=True)
class ThetaEstimate(_Record):
    value: float
    method: str
    std_err: float = 0.0
    horizon: int | None = None
    bias_bound: float | None = None
    exceedances: int | None = None


@dataclass(frozen=True)
class FrechetFit(_Record):
    """KS fit of rescaled maxima to exp(-theta x^-kappa)."""

    block_length: int
    maxima_count: int
    a_n: float
    ks_distance: float
    theta: float
    kappa: float
    a_n_source: str = "goldie"
    scaled_maxima: np.ndarray = field(default_factory=lambda: np.empty(0))

    _bulk_fields = ("scaled_maxima",)


@dataclass(frozen=True)
class SumExperiment(_Record):
    n: int
    reps: int
    kappa_regime: str
    normalized_sums: np.ndarray
    b_n: float
    a_n: float
    b_n_std_err: float = 0.0
    sigma2: float | None = None

    _bulk_fields = ("normalized_sums",)


@dataclass(frozen=True)
class StableFitResult(_Record):
    alpha_hat: float
    scale_hat: float
    skew_hat: float
    method: str = "ecf-regression"
    alpha_std_err: float = 0.0
    points: int = 0


@dataclass(frozen=True)
class ClusterMomentEstimate(_Record):
    """Estimate of E(sum_j Q_j)^kappa from accepted two-sided walks."""

    value: float
    horizon: int
    acceptance_rate: float
    std_err: float = 0.0
    accepted: int = 0


@dataclass(frozen=True)
class RwreRun(_Record):
    """A batch of walks to level ``target_n``; one entry per replicate."""

    target_n: int
    hitting_times: np.ndarray
    max_crossings: np.ndarray
    left_crossings: np.ndarray
    censored: np.ndarray
    seed: int
    reflect_at_origin: bool
    crossing_counts: np.ndarray | None = None

    _bulk_fields = (
        "hitting_times",
        "max_crossings",
        "left_crossings",
        "censored",
        "crossing_counts",
    )

    @property
    def censored_fraction(self) -> float:
        if self.censored.size == 0:
            return 0.0
        return float(self.censored.mean())


@dataclass(frozen=True)
class LChainRun(_Record):
    """Branching representation of hitting times, one chain per replicate."""

    sum2l_minus_n: np.ndarray
    boundary: str
    values: np.ndarray | None = None
    boundary_sums: np.ndarray | None = None

    _bulk_fields = ("sum2l_minus_n", "values", "boundary_sums")


@dataclass(frozen=True)
class EquivalenceReport(_Record):
    n: int
    reps: int
    ks_distance: float
    critical_value: float
    p_value: float
    passed: bool
    censored_fraction: float = 0.0


@dataclass(frozen=True)
class HittingTimeLimitsReport(_Record):
    regime: str
    kappa: float
    n_grid: tuple[int, ...]
    engine: str
    ks_consecutive: tuple[float, ...]
    centering: dict[int, float]
    censored_fraction: float = 0.0
    transform_relative_error: float | None = None
    scaled_samples: dict[int, np.ndarray] = field(default_factory=dict)

    _bulk_fields = ("scaled_samples",)


@dataclass(frozen=True)
class AcceptanceCheck(_Record):
    """One row of the acceptance table."""

    name: str
    value: float
    expected: float
    tolerance: float
    passed: bool
    relation: str = "~"
    note: str = ""
