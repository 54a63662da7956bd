"""Experiment orchestration.

Validates the configuration, runs the Monte Carlo replicates (optionally
in a process pool), and reduces them in replicate order into a
MetricsReport.
"""

from __future__ import annotations

import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

import numpy as np

from src.density.policies import KDE_POLICIES, M_POLICIES
from src.errors import ConfigError, NumericalError
from src.runners.replicate import ReplicateResult, run_replicate
from src.runners.report import ESTIMATORS, MetricsReport, ReportEntry
from src.simulation.densities import available_densities
from src.simulation.drift import DRIFT_REGISTRY
from src.simulation.fbm import FBM_METHODS
from src.utils.config import ConfigManager
from src.utils.logging import RunLogger
from src.utils.metrics import MetricsTracker

logger = logging.getLogger(__name__)

BOUNDARY_POINTS = (0.0, 0.01, 0.99, 1.0)
SWEEP_KEYS = {
    "density": "density.name",
    "n_subjects": "experiment.n_subjects",
    "replicates": "experiment.replicates",
    "hurst": "model.hurst",
    "horizon": "grid.horizon",
    "steps": "grid.steps",
    "m_policy": "estimator.bernstein.m_policy",
    "m": "estimator.bernstein.m",
}


@dataclass(frozen=True)
class ExperimentConfig:
    density: str = "beta_1_2"
    hurst: float = 0.7
    horizon: float = 100.0
    steps: int = 1000
    n_subjects: int = 250
    replicates: int = 100
    m_policy: str = "lscv"
    m: Optional[int] = None
    m_grid: Optional[Tuple[int, ...]] = None
    bias_constant: str = "derivative"
    kde_policy: str = "silverman_paper"
    h: Optional[float] = None
    seed: int = 41
    eval_grid: int = 101
    boundary_points: Tuple[float, ...] = BOUNDARY_POINTS
    known_effects: bool = False
    drift: Mapping[str, Any] = field(default_factory=lambda: {"name": "vasicek", "beta": 1.0, "sigma": 1.0})
    x0: float = 0.0
    fbm_method: str = "cholesky"
    max_cholesky_steps: int = 4096
    density_components: Optional[Tuple[Mapping[str, Any], ...]] = None
    workers: int = 1
    max_failure_rate: float = 0.05

    def __post_init__(self) -> None:
        errors = self._validate()
        if errors:
            raise ConfigError("Config validation failed:\n" + "\n".join(f"- {error}" for error in errors))

    def _validate(self) -> List[str]:
        errors = []
        if self.density not in available_densities():
            errors.append(f"Unknown density '{self.density}' (expected one of {available_densities()})")
        if self.density == "user" and not self.density_components:
            errors.append("density 'user' requires density.components")
        if not 0.5 < self.hurst < 1.0:
            errors.append(f"model.hurst must lie in (1/2, 1), got {self.hurst}")
        if not self.horizon > 0:
            errors.append("grid.horizon must be positive")
        if self.steps < 8:
            errors.append("grid.steps must be at least 8")
        if self.n_subjects < 3:
            errors.append("experiment.n_subjects must be at least 3")
        if self.replicates < 1:
            errors.append("experiment.replicates must be at least 1")
        if self.m_policy not in M_POLICIES:
            errors.append(f"Unknown m_policy '{self.m_policy}' (expected one of {M_POLICIES})")
        if self.m_policy == "fixed" and (self.m is None or self.m < 1):
            errors.append("m_policy 'fixed' requires estimator.bernstein.m >= 1")
        if self.m_grid is not None and (not self.m_grid or min(self.m_grid) < 1):
            errors.append("estimator.bernstein.m_grid must be a nonempty list of integers >= 1")
        if self.bias_constant not in ("derivative", "printed"):
            errors.append("estimator.bernstein.bias_constant must be 'derivative' or 'printed'")
        if self.kde_policy not in KDE_POLICIES:
            errors.append(f"Unknown kde_policy '{self.kde_policy}' (expected one of {KDE_POLICIES})")
        if self.kde_policy == "fixed" and (self.h is None or not self.h > 0):
            errors.append("kde_policy 'fixed' requires estimator.kernel.h > 0")
        if self.eval_grid < 2:
            errors.append("evaluation.eval_grid must be at least 2")
        if any(not 0.0 <= x <= 1.0 for x in self.boundary_points):
            errors.append("evaluation.boundary_points must lie in [0, 1]")
        if self.drift.get("name", "vasicek") not in DRIFT_REGISTRY:
            errors.append(f"Unknown drift '{self.drift.get('name')}' (expected one of {sorted(DRIFT_REGISTRY)})")
        if self.fbm_method not in FBM_METHODS:
            errors.append(f"Unknown simulation.fbm_method '{self.fbm_method}'")
        elif self.fbm_method == "cholesky" and self.steps > self.max_cholesky_steps:
            errors.append(
                f"grid.steps={self.steps} exceeds simulation.max_cholesky_steps={self.max_cholesky_steps}"
            )
        if self.workers < 1:
            errors.append("global.workers must be at least 1")
        if not 0.0 <= self.max_failure_rate < 1.0:
            errors.append("experiment.max_failure_rate must lie in [0, 1)")
        return errors

    @classmethod
    def from_mapping(cls, config: Mapping[str, Any]) -> "ExperimentConfig":
        """Build from the nested YAML layout (see configs/defaults.yaml)."""
        glob = config.get("global", {}) or {}
        model = config.get("model", {}) or {}
        grid = config.get("grid", {}) or {}
        drift = dict(config.get("drift", {}) or {"name": "vasicek"})
        simulation = config.get("simulation", {}) or {}
        density = config.get("density", {}) or {}
        experiment = config.get("experiment", {}) or {}
        bernstein = (config.get("estimator", {}) or {}).get("bernstein", {}) or {}
        kernel = (config.get("estimator", {}) or {}).get("kernel", {}) or {}
        evaluation = config.get("evaluation", {}) or {}
        try:
            m_grid = bernstein.get("m_grid")
            components = density.get("components")
            return cls(
                density=str(density.get("name", "beta_1_2")),
                hurst=float(model.get("hurst", 0.7)),
                horizon=float(grid.get("horizon", 100.0)),
                steps=int(grid.get("steps", 1000)),
                n_subjects=int(experiment.get("n_subjects", 250)),
                replicates=int(experiment.get("replicates", 100)),
                m_policy=str(bernstein.get("m_policy", "lscv")),
                m=None if bernstein.get("m") is None else int(bernstein["m"]),
                m_grid=None if m_grid is None else tuple(int(m) for m in m_grid),
                bias_constant=str(bernstein.get("bias_constant", "derivative")),
                kde_policy=str(kernel.get("kde_policy", "silverman_paper")),
                h=None if kernel.get("h") is None else float(kernel["h"]),
                seed=int(glob.get("seed", 41)),
                eval_grid=int(evaluation.get("eval_grid", 101)),
                boundary_points=tuple(float(x) for x in evaluation.get("boundary_points", BOUNDARY_POINTS)),
                known_effects=bool(experiment.get("known_effects", False)),
                drift={k: v for k, v in drift.items() if k != "x0"},
                x0=float(drift.get("x0", 0.0)),
                fbm_method=str(simulation.get("fbm_method", "cholesky")),
                max_cholesky_steps=int(simulation.get("max_cholesky_steps", 4096)),
                density_components=None if not components else tuple(dict(c) for c in components),
                workers=int(glob.get("workers", 1)),
                max_failure_rate=float(experiment.get("max_failure_rate", 0.05)),
            )
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"Config validation failed:\n- {exc}") from exc

    def eval_points(self) -> np.ndarray:
        """Equispaced grid on [0, 1] plus the boundary points."""
        return np.union1d(np.linspace(0.0, 1.0, self.eval_grid), np.asarray(self.boundary_points))

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


class ExperimentRunner:
    """Runs the replicates for one (density, n_subjects) configuration."""

    def __init__(self, config: ExperimentConfig, run_logger: Optional[RunLogger] = None) -> None:
        self.config = config
        self.run_logger = run_logger

    def run(self) -> MetricsReport:
        self.before_run()
        try:
            results = self.run_replicates()
            return MetricsReport(entries=[self.reduce(results)])
        finally:
            self.after_run()

    def run_replicates(self) -> List[ReplicateResult]:
        cfg = self.config
        indices = list(range(cfg.replicates))
        keep = [i == 0 for i in indices]
        if cfg.workers > 1:
            with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
                return list(pool.map(run_replicate, itertools.repeat(cfg), indices, keep))
        return [run_replicate(cfg, i, k) for i, k in zip(indices, keep)]

    def reduce(self, results: List[ReplicateResult]) -> ReportEntry:
        """Aggregate replicate results in replicate order."""
        cfg = self.config
        tracker = MetricsTracker()
        boundary: Dict[str, List[List[float]]] = {"truth": [], **{e: [] for e in ESTIMATORS}}
        selected_m: List[int] = []
        selected_h: List[float] = []
        curve = None

        for result in sorted(results, key=lambda r: r.index):
            tracker.record_replicate(failed=result.failed)
            if result.failed:
                logger.warning("Replicate %d failed: %s", result.index, result.error)
                if self.run_logger:
                    self.run_logger.log_failure(result.index, result.error)
                continue
            for estimator, metrics in result.metrics.items():
                tracker.update(estimator, metrics)
            for key in boundary:
                boundary[key].append(result.boundary[key])
            selected_m.append(result.m)
            selected_h.append(result.h)
            if curve is None and result.curves is not None:
                curve = result.curves
            if self.run_logger:
                self.run_logger.log_replicate(result.index, result.metrics, result.m, result.h)

        if tracker.failure_rate > cfg.max_failure_rate:
            raise NumericalError(
                f"{tracker.failed_replicates} of {tracker.total_replicates} replicates failed "
                f"(limit {cfg.max_failure_rate:.0%})"
            )
        succeeded = tracker.total_replicates - tracker.failed_replicates
        if succeeded == 0:
            raise NumericalError("No replicate completed")

        truth = np.asarray(boundary["truth"][0])
        return ReportEntry(
            density=cfg.density,
            n_subjects=cfg.n_subjects,
            replicates=succeeded,
            failures=tracker.failed_replicates,
            stats=tracker.get_stats(),
            boundary_points=cfg.boundary_points,
            boundary_truth=truth.tolist(),
            boundary_means={e: np.mean(boundary[e], axis=0).tolist() for e in ESTIMATORS},
            boundary_abs_errors={e: np.mean(np.abs(np.asarray(boundary[e]) - truth), axis=0).tolist() for e in ESTIMATORS},
            selected_m=selected_m,
            selected_h=selected_h,
            curve=curve,
        )

    # hooks
    def before_run(self) -> None:
        """Hook before the replicates start."""
        logger.info(
            "Running %s: density=%s n=%d replicates=%d known_effects=%s",
            type(self).__name__, self.config.density, self.config.n_subjects,
            self.config.replicates, self.config.known_effects,
        )
        if self.run_logger:
            self.run_logger.log_config(self.config.to_dict(), self.config.seed)

    def after_run(self) -> None:
        """Hook after all replicates end."""
        return None


def run_experiment(
    config: Union[ExperimentConfig, Mapping[str, Any]],
    run_logger: Optional[RunLogger] = None,
) -> MetricsReport:
    """Top-level API: validate `config`, run every replicate, return the report."""
    if not isinstance(config, ExperimentConfig):
        config = ExperimentConfig.from_mapping(config)
    runner = ExperimentRunner(config, run_logger)
    return runner.run()


def _set_dotted(config: Dict[str, Any], dotted: str, value: Any) -> Dict[str, Any]:
    override: Dict[str, Any] = {}
    node = override
    parts = dotted.split(".")
    for part in parts[:-1]:
        node = node.setdefault(part, {})
    node[parts[-1]] = value
    return ConfigManager._deep_merge_dicts(config, override)


def expand_sweep(config: Mapping[str, Any], sweep: Mapping[str, Any]) -> List[Dict[str, Any]]:
    """Grid expansion of `sweep.parameters`, first parameter varying slowest."""
    if sweep.get("method", "grid") != "grid":
        raise ConfigError(f"Unsupported sweep method '{sweep.get('method')}'")
    parameters = sweep.get("parameters", {}) or {}
    names = list(parameters)
    values = []
    for name in names:
        spec = parameters[name]
        if not isinstance(spec, dict) or not isinstance(spec.get("values"), list) or not spec["values"]:
            raise ConfigError(f"Sweep parameter '{name}' needs a nonempty 'values' list")
        values.append(spec["values"])
    configs = []
    for combo in itertools.product(*values):
        current = dict(config)
        for name, value in zip(names, combo):
            current = _set_dotted(current, SWEEP_KEYS.get(name, name), value)
        configs.append(current)
    return configs


def run_sweep(
    config: Mapping[str, Any],
    sweep: Mapping[str, Any],
    run_logger: Optional[RunLogger] = None,
) -> MetricsReport:
    report = MetricsReport()
    for item in expand_sweep(config, sweep):
        report = report.merge(run_experiment(item, run_logger))
    return report
