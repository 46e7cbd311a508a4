"""Shared fixtures for bpire tests."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from bpire.env_model import (
    Deterministic,
    EnvironmentModel,
    FiniteDiscrete,
    Poisson,
    from_components,
    preset_model,
)
from bpire.model_config import site_preset
from bpire.rwre import RwreModel

CONFIG_DIR = Path(__file__).resolve().parent.parent / "config"


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def env_a() -> EnvironmentModel:
    return preset_model("ENV-A")


@pytest.fixture
def env_b() -> EnvironmentModel:
    return preset_model("ENV-B")


@pytest.fixture
def env_c() -> EnvironmentModel:
    return preset_model("ENV-C")


@pytest.fixture
def env_d() -> EnvironmentModel:
    return preset_model("ENV-D")


@pytest.fixture
def micro() -> EnvironmentModel:
    """Finite laws only, so the exact rational oracles apply."""
    return from_components(
        [
            (
                FiniteDiscrete.from_pmf({0: 0.75, 1: 0.25}),
                FiniteDiscrete.from_pmf({0: 0.5, 1: 0.5}),
            ),
            (FiniteDiscrete.from_pmf({0: 0.25, 2: 0.75}), Deterministic(1)),
        ],
        [0.5, 0.5],
    )


@pytest.fixture
def poisson_model() -> EnvironmentModel:
    """Non-lattice model with three atoms."""
    return from_components(
        [
            (Poisson(0.4), Deterministic(1)),
            (Poisson(1.3), Poisson(1.0)),
            (Poisson(3.0), Deterministic(0)),
        ],
        [0.6, 0.3, 0.1],
    )


@pytest.fixture
def sites_a() -> RwreModel:
    return site_preset("SITES-A")


@pytest.fixture
def sites_c() -> RwreModel:
    return site_preset("SITES-C")


@pytest.fixture
def config_dir() -> Path:
    return CONFIG_DIR


@pytest.fixture
def env_e() -> EnvironmentModel:
    return preset_model("ENV-E")
