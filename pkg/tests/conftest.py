from pathlib import Path

import numpy as np
import pytest

from src.core.grid import TimeGrid
from src.core.hurst import HurstModel
from src.runners.experiment import ExperimentConfig

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"


@pytest.fixture
def config_dir() -> Path:
    return CONFIG_DIR


@pytest.fixture
def model() -> HurstModel:
    return HurstModel(0.7)


@pytest.fixture
def grid() -> TimeGrid:
    return TimeGrid(100.0, 1000)


@pytest.fixture
def small_grid() -> TimeGrid:
    return TimeGrid(10.0, 100)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(2024)


@pytest.fixture
def small_config() -> ExperimentConfig:
    """A fast end-to-end configuration."""
    return ExperimentConfig(
        density="beta_3_5",
        horizon=10.0,
        steps=50,
        n_subjects=30,
        replicates=3,
        seed=7,
    )
