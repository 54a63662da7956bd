from __future__ import annotations

import json
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import TYPE_CHECKING, Dict, List, Optional

import numpy as np

from src.core.grid import TimeGrid
from src.core.hurst import HurstModel
from src.density.bernstein import fit_bernstein
from src.density.kernel import fit_kde
from src.density.policies import resolve_bandwidth, resolve_order
from src.errors import NumericalError
from src.estimation.mle import estimate_arrays
from src.simulation.densities import EffectDensity, density_suite
from src.simulation.drift import build_drift
from src.simulation.sde import simulate_bundle, subject_effects
from src.utils.metrics import density_errors

if TYPE_CHECKING:
    from src.runners.experiment import ExperimentConfig

_DENSITY_CACHE: Dict[str, EffectDensity] = {}


def build_density(config: "ExperimentConfig") -> EffectDensity:
    """Suite density for the config, built once per process."""
    key = json.dumps([config.density, config.density_components], sort_keys=True)
    if key not in _DENSITY_CACHE:
        _DENSITY_CACHE[key] = density_suite(config.density, config.density_components)
    return _DENSITY_CACHE[key]


@dataclass
class ReplicateResult:
    index: int
    metrics: Dict[str, Dict[str, float]]
    boundary: Dict[str, List[float]]
    m: int = 0
    h: float = 0.0
    curves: Optional[Dict[str, np.ndarray]] = None
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.error is not None


class Replicate(ABC):
    """One Monte Carlo replicate: effects -> both density estimates -> errors."""

    def __init__(self, config: "ExperimentConfig", density: EffectDensity) -> None:
        self.config = config
        self.density = density
        self.x = config.eval_points()
        self.truth = density.pdf(self.x)
        self.boundary_index = np.searchsorted(self.x, config.boundary_points)

    @abstractmethod
    def effects(self, index: int) -> np.ndarray:
        """Samples handed to the density estimators for replicate `index`."""
        raise NotImplementedError("Subclass must implement effects")

    def run(self, index: int, keep_curves: bool = False) -> ReplicateResult:
        cfg = self.config
        self.before_replicate(index)
        samples = self.effects(index)
        m = resolve_order(samples, cfg.m_policy, cfg.m, cfg.m_grid, self.density.model, cfg.bias_constant)
        h = resolve_bandwidth(samples, cfg.kde_policy, cfg.h)
        estimates = {
            "bernstein": fit_bernstein(samples, m)(self.x),
            "kde": fit_kde(samples, h)(self.x),
        }
        for name, values in estimates.items():
            if not np.all(np.isfinite(values)):
                raise NumericalError(f"Non-finite {name} estimate in replicate {index}")

        result = ReplicateResult(
            index=index,
            metrics={name: density_errors(self.x, self.truth, values) for name, values in estimates.items()},
            boundary={
                "truth": self.truth[self.boundary_index].tolist(),
                **{name: values[self.boundary_index].tolist() for name, values in estimates.items()},
            },
            m=m,
            h=h,
            curves={"x": self.x, "truth": self.truth, **estimates} if keep_curves else None,
        )
        self.after_replicate(result)
        return result

    # hooks
    def before_replicate(self, index: int) -> None:
        """Hook before each replicate."""
        return None

    def after_replicate(self, result: ReplicateResult) -> None:
        """Hook after each replicate."""
        return None


class KnownEffectsReplicate(Replicate):
    """Feeds the true effects to the estimators, bypassing SDE and MLE."""

    def effects(self, index: int) -> np.ndarray:
        return subject_effects(self.density, self.config.n_subjects, self.config.seed, index)


class EstimatedEffectsReplicate(Replicate):
    """Simulates the trajectories and estimates every effect by maximum likelihood."""

    def __init__(self, config: "ExperimentConfig", density: EffectDensity) -> None:
        super().__init__(config, density)
        self.model = HurstModel(config.hurst)
        self.grid = TimeGrid(config.horizon, config.steps)
        self.drift = build_drift(config.drift)

    def effects(self, index: int) -> np.ndarray:
        cfg = self.config
        bundle = simulate_bundle(
            self.model,
            self.grid,
            self.drift,
            self.density,
            cfg.n_subjects,
            cfg.seed,
            x0=cfg.x0,
            replicate=index,
            fbm_method=cfg.fbm_method,
            max_cholesky_steps=cfg.max_cholesky_steps,
        )
        phi_hat, _ = estimate_arrays(bundle)
        return phi_hat


def select_replicate(config: "ExperimentConfig", density: Optional[EffectDensity] = None) -> Replicate:
    density = density or build_density(config)
    if config.known_effects:
        return KnownEffectsReplicate(config, density)
    return EstimatedEffectsReplicate(config, density)


def run_replicate(config: "ExperimentConfig", index: int, keep_curves: bool = False) -> ReplicateResult:
    """Pool entry point: numerical failures come back as failed results."""
    try:
        return select_replicate(config).run(index, keep_curves=keep_curves)
    except NumericalError as exc:
        return ReplicateResult(index=index, metrics={}, boundary={}, error=f"{type(exc).__name__}: {exc}")
