"""Fractional Brownian motion on a TimeGrid.

Primary method  : Cholesky factor of the node covariance (exact, O(N^3) once per grid)
Fast path       : Davies-Harte circulant embedding (exact, O(N log N))
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Literal, Union

import numpy as np
import pandas as pd

from src.core.grid import TimeGrid
from src.core.hurst import HurstModel
from src.errors import ConfigError, DomainError, FactorizationError

logger = logging.getLogger(__name__)

FbmMethod = Literal["cholesky", "davies_harte"]
FBM_METHODS = ("cholesky", "davies_harte")
DEFAULT_MAX_CHOLESKY_STEPS = 4096
JITTER = 1e-12


@dataclass(frozen=True)
class FbmPath:
    grid: TimeGrid
    values: np.ndarray
    seed_tag: int = 0

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.N + 1,):
            raise DomainError(f"fBm path needs {self.grid.N + 1} values, got {values.shape}")
        if values[0] != 0.0:
            raise DomainError("fBm path must start at 0")
        object.__setattr__(self, "values", values)

    @property
    def increments(self) -> np.ndarray:
        return np.diff(self.values)


def fbm_covariance(model: HurstModel, s, t):
    """E[W_s W_t] = (s^2H + t^2H - |t-s|^2H) / 2."""
    two_h = 2.0 * model.H
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    return 0.5 * (s**two_h + t**two_h - np.abs(t - s) ** two_h)


@lru_cache(maxsize=8)
def cholesky_factor(model: HurstModel, grid: TimeGrid) -> np.ndarray:
    """Lower Cholesky factor of Cov(W_{t_1..t_N}); t_0 = 0 is exact."""
    nodes = grid.nodes[1:]
    cov = fbm_covariance(model, nodes[:, None], nodes[None, :])
    try:
        factor = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        logger.warning(
            "Cholesky failed for H=%.3f N=%d; retrying with diagonal jitter %.0e",
            model.H, grid.N, JITTER,
        )
        try:
            factor = np.linalg.cholesky(cov + JITTER * np.eye(grid.N))
        except np.linalg.LinAlgError as exc:
            raise FactorizationError(
                f"fBm covariance is not positive definite for H={model.H}, N={grid.N}; "
                "use a smaller N or simulation.fbm_method=davies_harte"
            ) from exc
    factor.setflags(write=False)
    return factor


@lru_cache(maxsize=8)
def circulant_eigenvalues(H: float, N: int) -> np.ndarray:
    """Eigenvalues of the 2N circulant embedding of unit-step fGn."""
    k = np.arange(N + 1, dtype=float)
    gamma = 0.5 * ((k + 1) ** (2 * H) - 2 * k ** (2 * H) + np.abs(k - 1) ** (2 * H))
    first_row = np.concatenate([gamma, gamma[1:N][::-1]])
    eigs = np.fft.fft(first_row).real
    if eigs.min() < -1e-10 * eigs.max():
        raise FactorizationError(
            f"Circulant embedding has negative eigenvalue {eigs.min():.3e} (H={H}, N={N})"
        )
    eigs = np.clip(eigs, 0.0, None)
    eigs.setflags(write=False)
    return eigs


def _seed_tag(rng: np.random.Generator) -> int:
    seed_seq = getattr(rng.bit_generator, "seed_seq", None) or getattr(rng.bit_generator, "_seed_seq", None)
    if seed_seq is None:
        return 0
    return int(seed_seq.generate_state(1, dtype=np.uint64)[0])


def _davies_harte(model: HurstModel, grid: TimeGrid, rng: np.random.Generator) -> np.ndarray:
    eigs = circulant_eigenvalues(model.H, grid.N)
    size = eigs.size
    noise = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    fgn = np.fft.fft(np.sqrt(eigs / size) * noise).real[: grid.N]
    return np.concatenate([[0.0], np.cumsum(fgn * grid.dt**model.H)])


def simulate_fbm(
    model: HurstModel,
    grid: TimeGrid,
    rng: np.random.Generator,
    method: FbmMethod = "cholesky",
    max_cholesky_steps: int = DEFAULT_MAX_CHOLESKY_STEPS,
) -> FbmPath:
    if method == "cholesky":
        if grid.N > max_cholesky_steps:
            raise ConfigError(
                f"N={grid.N} exceeds simulation.max_cholesky_steps={max_cholesky_steps}; "
                "use simulation.fbm_method=davies_harte"
            )
        values = np.concatenate([[0.0], cholesky_factor(model, grid) @ rng.standard_normal(grid.N)])
    elif method == "davies_harte":
        values = _davies_harte(model, grid, rng)
    else:
        raise ConfigError(f"Unknown fBm method '{method}', expected one of {FBM_METHODS}")
    return FbmPath(grid=grid, values=values, seed_tag=_seed_tag(rng))


def save_fbm_csv(path: FbmPath, filepath: Union[str, Path]) -> None:
    frame = pd.DataFrame({"k": np.arange(path.grid.N + 1), "t_k": path.grid.nodes, "value": path.values})
    frame.to_csv(filepath, index=False)
