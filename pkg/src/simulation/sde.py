"""Simulation of n i.i.d. trajectories

    dX^j = (a(X^j) + phi_j b(t)) dt + sigma(t) dW^{H,j},   X^j_0 = x0

with Euler (left-point) steps and exact-in-distribution fBm increments.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from src.core.grid import SamplePath, TimeGrid
from src.core.hurst import HurstModel
from src.errors import DomainError, ReportError, SimulationError
from src.simulation.densities import EffectDensity, sample_effects
from src.simulation.drift import DriftSpec, build_drift
from src.simulation.fbm import DEFAULT_MAX_CHOLESKY_STEPS, FbmMethod, simulate_fbm
from src.utils.seeding import substream

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class TrajectoryBundle:
    model: HurstModel
    grid: TimeGrid
    drift: DriftSpec
    values: np.ndarray
    x0: float = 0.0
    true_effects: Optional[np.ndarray] = None
    seed: Optional[int] = None
    replicate: int = 0
    noise: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        values = np.atleast_2d(np.asarray(self.values, dtype=float))
        if values.shape[1] != self.grid.N + 1:
            raise DomainError(f"Bundle paths need {self.grid.N + 1} values, got {values.shape[1]}")
        if not np.all(values[:, 0] == values[0, 0]):
            raise DomainError("All paths of a bundle must share one initial value")
        object.__setattr__(self, "values", values)
        if self.true_effects is not None:
            effects = np.asarray(self.true_effects, dtype=float)
            if effects.shape != (values.shape[0],):
                raise DomainError("true_effects must hold one value per subject")
            object.__setattr__(self, "true_effects", effects)

    @property
    def n_subjects(self) -> int:
        return self.values.shape[0]

    @property
    def paths(self) -> List[SamplePath]:
        return [SamplePath(self.grid, row) for row in self.values]

    def path(self, subject: int) -> SamplePath:
        return SamplePath(self.grid, self.values[subject])

    def permuted(self, order: Sequence[int]) -> "TrajectoryBundle":
        order = np.asarray(order)
        return replace(
            self,
            values=self.values[order],
            true_effects=None if self.true_effects is None else self.true_effects[order],
            noise=None if self.noise is None else self.noise[order],
        )


def euler_paths(
    drift: DriftSpec,
    grid: TimeGrid,
    effects: np.ndarray,
    noise: np.ndarray,
    x0: float = 0.0,
) -> np.ndarray:
    """Euler recursion for every subject at once.

    `noise` holds the driving fBm at the grid nodes, shape (n, N+1).
    """
    effects = np.atleast_1d(np.asarray(effects, dtype=float))
    noise = np.atleast_2d(np.asarray(noise, dtype=float))
    if noise.shape != (effects.size, grid.N + 1):
        raise DomainError(f"noise must have shape {(effects.size, grid.N + 1)}, got {noise.shape}")
    b, sigma = drift.at_nodes(grid)
    dW = np.diff(noise, axis=1)
    dt = grid.dt

    X = np.empty_like(noise)
    X[:, 0] = x0
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(grid.N):
            X[:, k + 1] = X[:, k] + (drift.a(X[:, k]) + effects * b[k]) * dt + sigma[k] * dW[:, k]

    finite = np.isfinite(X).all(axis=1)
    if not finite.all():
        index = int(np.argmin(finite))
        raise SimulationError(f"Trajectory {index} left the finite range", index=index)
    return X


def subject_effects(density: EffectDensity, n_subjects: int, seed: int, replicate: int = 0) -> np.ndarray:
    """The effects simulate_bundle would draw for (seed, replicate)."""
    return np.array([sample_effects(density, 1, substream(seed, replicate, j))[0] for j in range(n_subjects)])


def simulate_bundle(
    model: HurstModel,
    grid: TimeGrid,
    drift: DriftSpec,
    density: EffectDensity,
    n_subjects: int,
    master_seed: int,
    x0: float = 0.0,
    replicate: int = 0,
    fbm_method: FbmMethod = "cholesky",
    max_cholesky_steps: int = DEFAULT_MAX_CHOLESKY_STEPS,
    keep_noise: bool = False,
) -> TrajectoryBundle:
    if n_subjects < 1:
        raise DomainError(f"n_subjects must be >= 1, got {n_subjects}")
    drift.validate(grid)

    effects = np.empty(n_subjects)
    noise = np.empty((n_subjects, grid.N + 1))
    for j in range(n_subjects):
        rng = substream(master_seed, replicate, j)
        effects[j] = sample_effects(density, 1, rng)[0]
        noise[j] = simulate_fbm(model, grid, rng, method=fbm_method, max_cholesky_steps=max_cholesky_steps).values

    values = euler_paths(drift, grid, effects, noise, x0)
    logger.debug("Simulated %d trajectories (replicate %d, N=%d)", n_subjects, replicate, grid.N)
    return TrajectoryBundle(
        model=model,
        grid=grid,
        drift=drift,
        values=values,
        x0=x0,
        true_effects=effects,
        seed=master_seed,
        replicate=replicate,
        noise=noise if keep_noise else None,
    )


def _sidecar(path: Path) -> Path:
    return path.with_suffix(".json")


def save_bundle(bundle: TrajectoryBundle, path: Union[str, Path]) -> None:
    """Long-format CSV (subject, k, t_k, X) plus a JSON sidecar."""
    path = Path(path)
    n, width = bundle.values.shape
    frame = pd.DataFrame({
        "subject": np.repeat(np.arange(n), width),
        "k": np.tile(np.arange(width), n),
        "t_k": np.tile(bundle.grid.nodes, n),
        "X": bundle.values.ravel(),
    })
    meta = {
        "hurst": bundle.model.H,
        "T": bundle.grid.T,
        "N": bundle.grid.N,
        "drift": bundle.drift.to_dict(),
        "x0": bundle.x0,
        "seed": bundle.seed,
        "replicate": bundle.replicate,
        "true_effects": None if bundle.true_effects is None else bundle.true_effects.tolist(),
    }
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False)
        with open(_sidecar(path), "w") as f:
            json.dump(meta, f, indent=2)
    except OSError as exc:
        raise ReportError(f"Could not write bundle: {exc}", str(path)) from exc


def load_bundle(path: Union[str, Path]) -> TrajectoryBundle:
    path = Path(path)
    try:
        frame = pd.read_csv(path, float_precision="round_trip")
        with open(_sidecar(path)) as f:
            meta = json.load(f)
    except OSError as exc:
        raise ReportError(f"Could not read bundle: {exc}", str(path)) from exc

    grid = TimeGrid(float(meta["T"]), int(meta["N"]))
    frame = frame.sort_values(["subject", "k"])
    n = int(frame["subject"].nunique())
    values = frame["X"].to_numpy().reshape(n, grid.N + 1)
    effects = meta.get("true_effects")
    return TrajectoryBundle(
        model=HurstModel(float(meta["hurst"])),
        grid=grid,
        drift=build_drift(meta["drift"]),
        values=values,
        x0=float(meta["x0"]),
        true_effects=None if effects is None else np.asarray(effects, dtype=float),
        seed=meta.get("seed"),
        replicate=int(meta.get("replicate", 0)),
    )
