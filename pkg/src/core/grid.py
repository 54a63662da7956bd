from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from src.errors import DomainError


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid t_k = k*T/N, k = 0..N."""

    T: float
    N: int

    def __post_init__(self) -> None:
        if not (np.isfinite(self.T) and self.T > 0):
            raise DomainError(f"Grid horizon must be positive, got T={self.T}")
        if int(self.N) != self.N or self.N < 2:
            raise DomainError(f"Grid needs at least 2 steps, got N={self.N}")
        object.__setattr__(self, "N", int(self.N))

    @property
    def dt(self) -> float:
        return self.T / self.N

    @cached_property
    def nodes(self) -> np.ndarray:
        nodes = np.arange(self.N + 1) * self.dt
        nodes[-1] = self.T
        nodes.setflags(write=False)
        return nodes

    def refine(self, factor: int = 2) -> "TimeGrid":
        return TimeGrid(self.T, self.N * factor)


@dataclass(frozen=True)
class SamplePath:
    """Values of one trajectory at the nodes of a grid."""

    grid: TimeGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.N + 1,):
            raise DomainError(
                f"Path has {values.shape} values, grid expects {self.grid.N + 1}"
            )
        object.__setattr__(self, "values", values)

    @property
    def increments(self) -> np.ndarray:
        return np.diff(self.values)
