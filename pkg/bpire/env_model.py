"""
Random environment of the branching chain.

An environment atom pairs an offspring law with an immigration law; a model
is a finite mixture of atoms. Every law here has an exact mean, so lambda,
the Cramer root and the tilted law can be computed without Monte Carlo.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Any, ClassVar

import numpy as np

from .const import (
    _LOGGER,
    FINITE_PROGENY_CAP,
    KIND_DETERMINISTIC,
    KIND_FINITE,
    KIND_GEOMETRIC,
    KIND_POISSON,
    PRESET_ENV_A,
    PRESET_ENV_B,
    PRESET_ENV_C,
    PRESET_ENV_D,
    PRESET_ENV_E,
    PRESET_KAPPAS,
    PROB_SUM_TOL,
    TILT_TOL,
)
from .exceptions import (
    CramerNotSatisfiedError,
    DomainError,
    ProgenyCapExceededError,
    ValidationError,
)
from .utils import fingerprint

if TYPE_CHECKING:
    from collections.abc import Mapping, Sequence


class _Law:
    """Common surface of the offspring/immigration law variants."""

    kind: ClassVar[str]

    def mean(self) -> float:
        raise NotImplementedError

    def variance(self) -> float:
        raise NotImplementedError

    def prob_zero(self) -> float:
        raise NotImplementedError

    def problems(self) -> list[str]:
        return []

    def param(self) -> Any:
        raise NotImplementedError

    def sample(self, size: int, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def sample_sum(self, counts: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """Sum of ``counts[i]`` i.i.d. draws, independently for every ``i``."""
        raise NotImplementedError

    def pmf_exact(self) -> dict[int, Fraction]:
        msg = f"{self.kind} law has unbounded support, no exact pmf"
        raise DomainError(msg)

    def is_zero(self) -> bool:
        """True when the law is the point mass at 0."""
        return self.prob_zero() >= 1.0

    def to_config(self) -> dict[str, Any]:
        return {"kind": self.kind, "param": self.param()}


@dataclass(frozen=True)
class Geometric(_Law):
    """P(A = k) = (1 - p)^k p on {0, 1, 2, ...}."""

    success_prob: float
    kind: ClassVar[str] = KIND_GEOMETRIC

    def mean(self) -> float:
        return (1.0 - self.success_prob) / self.success_prob

    def variance(self) -> float:
        return (1.0 - self.success_prob) / self.success_prob**2

    def prob_zero(self) -> float:
        return self.success_prob

    def problems(self) -> list[str]:
        if not 0.0 < self.success_prob < 1.0:
            return [f"geometric success prob must be in (0,1): {self.success_prob!r}"]
        return []

    def param(self) -> float:
        return self.success_prob

    def sample(self, size: int, rng: np.random.Generator) -> np.ndarray:
        return rng.negative_binomial(1, self.success_prob, size=size).astype(np.int64)

    def sample_sum(self, counts: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        # a sum of n geometric(p) failure counts is negative binomial (n, p)
        out = np.zeros(counts.shape, dtype=np.int64)
        live = counts > 0
        if live.any():
            out[live] = rng.negative_binomial(counts[live], self.success_prob)
        return out


@dataclass(frozen=True)
class Poisson(_Law):
    """Poisson law with the given rate."""

    rate: float
    kind: ClassVar[str] = KIND_POISSON

    def mean(self) -> float:
        return self.rate

    def variance(self) -> float:
        return self.rate

    def prob_zero(self) -> float:
        return math.exp(-self.rate)

    def problems(self) -> list[str]:
        if not self.rate > 0.0:
            return [f"poisson rate must be positive: {self.rate!r}"]
        return []

    def param(self) -> float:
        return self.rate

    def sample(self, size: int, rng: np.random.Generator) -> np.ndarray:
        return rng.poisson(self.rate, size=size).astype(np.int64)

    def sample_sum(self, counts: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        # poisson superposition
        return rng.poisson(self.rate * counts.astype(float)).astype(np.int64)


@dataclass(frozen=True)
class Deterministic(_Law):
    """Point mass at ``value``."""

    value: int
    kind: ClassVar[str] = KIND_DETERMINISTIC

    def mean(self) -> float:
        return float(self.value)

    def variance(self) -> float:
        return 0.0

    def prob_zero(self) -> float:
        return 1.0 if self.value == 0 else 0.0

    def problems(self) -> list[str]:
        if self.value < 0 or int(self.value) != self.value:
            return [f"deterministic value must be a natural number: {self.value!r}"]
        return []

    def param(self) -> int:
        return int(self.value)

    def sample(self, size: int, rng: np.random.Generator) -> np.ndarray:  # noqa: ARG002
        return np.full(size, self.value, dtype=np.int64)

    def sample_sum(
        self,
        counts: np.ndarray,
        rng: np.random.Generator,  # noqa: ARG002
    ) -> np.ndarray:
        return counts.astype(np.int64) * int(self.value)

    def pmf_exact(self) -> dict[int, Fraction]:
        return {int(self.value): Fraction(1)}


@dataclass(frozen=True)
class FiniteDiscrete(_Law):
    """Law with finite support; ``weights[i]`` is P(A = support[i])."""

    support: tuple[int, ...]
    weights: tuple[float, ...]
    cap: int = FINITE_PROGENY_CAP
    kind: ClassVar[str] = KIND_FINITE

    @classmethod
    def from_pmf(cls, pmf: Mapping[int, float], cap: int = FINITE_PROGENY_CAP) -> FiniteDiscrete:
        """Build from a ``{value: probability}`` mapping."""
        items = sorted((int(k), float(v)) for k, v in pmf.items())
        return cls(
            support=tuple(k for k, _ in items),
            weights=tuple(v for _, v in items),
            cap=cap,
        )

    def mean(self) -> float:
        return float(sum(k * w for k, w in zip(self.support, self.weights, strict=True)))

    def variance(self) -> float:
        mu = self.mean()
        return float(
            sum(w * (k - mu) ** 2 for k, w in zip(self.support, self.weights, strict=True))
        )

    def prob_zero(self) -> float:
        return float(
            sum(w for k, w in zip(self.support, self.weights, strict=True) if k == 0)
        )

    def problems(self) -> list[str]:
        problems = []
        if len(self.support) != len(self.weights) or not self.support:
            problems.append("finite law needs one weight per support point")
        if any(k < 0 for k in self.support):
            problems.append(f"finite law support must be natural numbers: {self.support!r}")
        if any(w < 0 for w in self.weights):
            problems.append(f"finite law weights must be nonnegative: {self.weights!r}")
        total = sum(self.weights)
        if abs(total - 1.0) > PROB_SUM_TOL:
            problems.append(f"finite law weights sum {total!r}, not 1")
        return problems

    def param(self) -> dict[int, float]:
        return dict(zip(self.support, self.weights, strict=True))

    def sample(self, size: int, rng: np.random.Generator) -> np.ndarray:
        return rng.choice(
            np.asarray(self.support, dtype=np.int64), size=size, p=self.weights
        )

    def sample_sum(self, counts: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        if counts.size and int(counts.max()) > self.cap:
            msg = f"finite-support progeny sum over {int(counts.max())} draws exceeds cap {self.cap}"
            raise ProgenyCapExceededError(msg)
        # multinomial cell counts times support values
        cells = rng.multinomial(counts.astype(np.int64), self.weights)
        return (cells @ np.asarray(self.support, dtype=np.int64)).astype(np.int64)

    def pmf_exact(self) -> dict[int, Fraction]:
        pmf: dict[int, Fraction] = {}
        for k, w in zip(self.support, self.weights, strict=True):
            pmf[k] = pmf.get(k, Fraction(0)) + Fraction(w).limit_denominator(10**9)
        return pmf


Law = Geometric | Poisson | Deterministic | FiniteDiscrete
OffspringLaw = Law
ImmigrationLaw = Law


@dataclass(frozen=True)
class EnvironmentAtom:
    """One environment value: an offspring law and an immigration law."""

    offspring: Law
    immigration: Law

    def to_config(self) -> dict[str, Any]:
        return {
            "offspring": self.offspring.to_config(),
            "immigration": self.immigration.to_config(),
        }


@dataclass(frozen=True)
class EnvironmentModel:
    """Finite mixture of environment atoms; immutable once validated."""

    atoms: tuple[EnvironmentAtom, ...]
    probs: tuple[float, ...]

    def __post_init__(self) -> None:
        """Validate, listing every violated invariant at once."""
        object.__setattr__(self, "atoms", tuple(self.atoms))
        object.__setattr__(self, "probs", tuple(float(p) for p in self.probs))
        problems = self._problems()
        if problems:
            raise ValidationError(problems)

    def _structural_problems(self, *, allow_zero_probs: bool = False) -> list[str]:
        problems = []
        if not self.atoms:
            problems.append("model needs at least one atom")
        if len(self.atoms) != len(self.probs):
            problems.append(
                f"{len(self.atoms)} atoms but {len(self.probs)} probabilities"
            )
        for i, atom in enumerate(self.atoms):
            problems.extend(f"atom {i} offspring: {p}" for p in atom.offspring.problems())
            problems.extend(
                f"atom {i} immigration: {p}" for p in atom.immigration.problems()
            )
        if any(p < 0.0 or (p == 0.0 and not allow_zero_probs) for p in self.probs):
            problems.append(f"every atom probability must be positive: {self.probs!r}")
        total = math.fsum(self.probs)
        if abs(total - 1.0) > PROB_SUM_TOL:
            problems.append(f"probs sum {total:.12g}, not 1")
        return problems

    def _problems(self) -> list[str]:
        problems = self._structural_problems()
        if self.atoms and all(atom.immigration.is_zero() for atom in self.atoms):
            problems.append(
                "immigration is concentrated at 0 on every atom; "
                "it must not be concentrated at 0"
            )
        if self.atoms and all(atom.offspring.prob_zero() <= 0.0 for atom in self.atoms):
            problems.append("no atom gives positive probability to zero offspring")
        return problems

    @property
    def means(self) -> np.ndarray:
        """m(xi) per atom."""
        return np.array([mean_offspring(atom) for atom in self.atoms])

    @property
    def immigration_means(self) -> np.ndarray:
        """m°(xi) per atom."""
        return np.array([atom.immigration.mean() for atom in self.atoms])

    @property
    def probs_array(self) -> np.ndarray:
        return np.asarray(self.probs, dtype=float)

    def to_config(self) -> dict[str, Any]:
        return {
            "atoms": [
                {**atom.to_config(), "prob": prob}
                for atom, prob in zip(self.atoms, self.probs, strict=True)
            ]
        }

    def fingerprint(self) -> str:
        return fingerprint(self.to_config())


@dataclass(frozen=True)
class TiltedModel(EnvironmentModel):
    """Environment law reweighted by m^kappa."""

    source_kappa: float = 0.0
    # source probabilities of atoms with m = 0, zero elsewhere
    zero_mean_probs: tuple[float, ...] = ()

    def _problems(self) -> list[str]:
        # the tilted law is supercritical in general; only structure is checked
        return self._structural_problems(allow_zero_probs=True)


def mean_offspring(atom: EnvironmentAtom) -> float:
    """
    Exact conditional offspring mean m(xi).

    :param atom: environment atom
    :return: (1-p)/p for geometric, the rate for poisson, the value for a
        point mass, sum k pmf(k) for a finite law
    """
    return atom.offspring.mean()


def tilt(model: EnvironmentModel, kappa: float) -> TiltedModel:
    """
    Reweight atom probabilities by m^kappa.

    Atoms are kept in order; those with m = 0 get tilted probability 0.

    :raises CramerNotSatisfiedError: if E m^kappa is not 1 within tolerance
    """
    weights = model.probs_array * np.power(model.means, kappa)
    lam = float(weights.sum())
    if abs(lam - 1.0) > TILT_TOL:
        msg = f"lambda({kappa!r}) = {lam!r}; tilting needs the Cramer root"
        raise CramerNotSatisfiedError(msg)
    probs = weights / lam
    _LOGGER.debug("tilted probs at kappa=%s: %s", kappa, probs)
    return TiltedModel(
        atoms=model.atoms,
        probs=tuple(probs.tolist()),
        source_kappa=kappa,
        zero_mean_probs=tuple(np.where(model.means > 0.0, 0.0, model.probs_array).tolist()),
    )


def untilt(tilted: TiltedModel) -> EnvironmentModel:
    """Undo ``tilt``: reweight by m^-kappa and renormalize."""
    means = tilted.means
    with np.errstate(divide="ignore", invalid="ignore"):
        weights = tilted.probs_array * np.power(means, -tilted.source_kappa)
    if tilted.zero_mean_probs:
        weights = np.where(means > 0.0, weights, tilted.zero_mean_probs)
    return EnvironmentModel(
        atoms=tilted.atoms, probs=tuple((weights / weights.sum()).tolist())
    )


def sample_atom_indices(
    model: EnvironmentModel, size: int, rng: np.random.Generator
) -> np.ndarray:
    """Categorical draws of atom indices by ``model.probs``."""
    if len(model.atoms) == 1:
        return np.zeros(size, dtype=np.int64)
    return rng.choice(len(model.atoms), size=size, p=model.probs_array)


def sample_environment(
    model: EnvironmentModel, rng: np.random.Generator
) -> EnvironmentAtom:
    """Draw one environment atom."""
    return model.atoms[int(sample_atom_indices(model, 1, rng)[0])]


def sample_immigration(atom: EnvironmentAtom, rng: np.random.Generator) -> int:
    """Draw the immigrant count B given the atom."""
    return int(atom.immigration.sample(1, rng)[0])


def sample_progeny_sum(
    atom: EnvironmentAtom, count: int, rng: np.random.Generator
) -> int:
    """
    Total offspring of ``count`` individuals under one atom.

    Geometric and poisson sums are drawn in O(1) (negative binomial and
    poisson superposition); finite laws cost O(support).
    """
    if count < 0:
        msg = f"progeny count must be nonnegative: {count!r}"
        raise DomainError(msg)
    return int(atom.offspring.sample_sum(np.array([count], dtype=np.int64), rng)[0])


def geometric_with_mean(mean: float) -> Law:
    """Geometric law with the given mean; mean 0 degenerates to a point mass."""
    if mean == 0.0:
        return Deterministic(0)
    return Geometric(1.0 / (1.0 + mean))


def two_point_environment(
    kappa: float, low: float = 0.5, high: float = 2.0
) -> EnvironmentModel:
    """
    Two geometric atoms with m in {low, high} and Cramer root ``kappa``.

    The down-probability solves p low^kappa + (1 - p) high^kappa = 1, immigration
    is one immigrant per generation.
    """
    down = (high**kappa - 1.0) / (high**kappa - low**kappa)
    return EnvironmentModel(
        atoms=(
            EnvironmentAtom(geometric_with_mean(low), Deterministic(1)),
            EnvironmentAtom(geometric_with_mean(high), Deterministic(1)),
        ),
        probs=(down, 1.0 - down),
    )


def preset_model(name: str) -> EnvironmentModel:
    """Built-in preset ENV-A .. ENV-E."""
    if name not in PRESET_KAPPAS:
        msg = f"unknown preset {name!r}"
        raise KeyError(msg)
    return two_point_environment(PRESET_KAPPAS[name])


def from_components(
    laws: Sequence[tuple[Law, Law]], probs: Sequence[float]
) -> EnvironmentModel:
    """Convenience constructor from (offspring, immigration) pairs."""
    return EnvironmentModel(
        atoms=tuple(EnvironmentAtom(a, b) for a, b in laws), probs=tuple(probs)
    )


PRESET_NAMES = (PRESET_ENV_A, PRESET_ENV_B, PRESET_ENV_C, PRESET_ENV_D, PRESET_ENV_E)
