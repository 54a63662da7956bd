"""Molchan transform of observed paths.

    Z_t  = int_0^t k_H(t,s) / sigma(s) dX_s
    J1_t = d/dw int_0^t k_H(t,s) a(X_s) / sigma(s) ds
    J2_t = d/dw int_0^t k_H(t,s) b(s) / sigma(s) ds

Every integral is a left-point sum over the grid cells with the kernel
replaced by its exact cell integral. Because Z, J1 and J2 share those
weights, Z = int (J1 + phi J2) dw + M holds exactly on the grid.
Cost is O(N^2) per path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from src.core.grid import SamplePath, TimeGrid
from src.core.hurst import HurstModel, d_dw, kernel_cumulative, kernel_weight_matrix, weight_wH
from src.errors import DomainError, NumericalError
from src.simulation.drift import DriftSpec

MIN_CELLS = 8


@dataclass(frozen=True, eq=False)
class MolchanView:
    grid: TimeGrid
    Z: np.ndarray
    J1: np.ndarray
    J2: np.ndarray
    w: np.ndarray


def _check_finite(name: str, values: np.ndarray) -> None:
    bad = ~np.isfinite(values)
    if bad.any():
        position = np.argwhere(bad)[0]
        raise NumericalError(f"Non-finite {name} at node {int(position[-1])}")


def molchan_functionals(
    model: HurstModel,
    grid: TimeGrid,
    values: np.ndarray,
    drift: DriftSpec,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """(Z, J1, J2, w) for a batch of paths, `values` of shape (n, N+1)."""
    if grid.N < MIN_CELLS:
        raise DomainError(f"Grid too coarse for the Molchan transform: {grid.N} < {MIN_CELLS} cells")
    values = np.atleast_2d(np.asarray(values, dtype=float))
    b, sigma = drift.at_nodes(grid)
    if np.any(sigma <= 0):
        raise DomainError(f"Drift '{drift.name}': sigma must be positive")

    weights = kernel_weight_matrix(model, grid)
    # cell average of k_H(t_k, .) times the path increment
    Z = (np.diff(values, axis=1) / sigma) @ weights.T / grid.dt
    J1 = d_dw(model, grid, kernel_cumulative(model, grid, drift.a(values[:, :-1]) / sigma))
    J2 = d_dw(model, grid, kernel_cumulative(model, grid, b / sigma))
    w = weight_wH(model, grid.nodes)

    for name, array in (("Z", Z), ("J1", J1), ("J2", J2)):
        _check_finite(name, array)
    return Z, J1, np.broadcast_to(J2, J1.shape), w


def molchan_transform(model: HurstModel, path: SamplePath, drift: DriftSpec) -> MolchanView:
    Z, J1, J2, w = molchan_functionals(model, path.grid, path.values[None, :], drift)
    return MolchanView(grid=path.grid, Z=Z[0], J1=J1[0], J2=np.array(J2[0]), w=w)
