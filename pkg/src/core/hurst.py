"""Hurst-indexed constants, the kernel k_H, the weight w^H and the
singular-integral machinery built on them.

    k_H(t, s) = kappa^-1 s^(1/2-H) (t-s)^(1/2-H) on (0, t)
    w_t       = lambda^-1 t^(2-2H)

The kernel is integrable but unbounded at both ends of (0, t). Integrals
against it use a product rule: the kernel is integrated exactly over each
cell (regularized incomplete beta) and the integrand is sampled at cell
midpoints, so neither endpoint is ever evaluated.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Union

import numpy as np
from scipy import special

from src.core.grid import TimeGrid
from src.errors import DomainError, NumericalError, QuadratureError

ArrayLike = Union[float, np.ndarray]

DEFAULT_SUBINTERVALS = 2048


def gamma_fn(x: float) -> float:
    """Euler's Gamma function for x > 0."""
    if not x > 0:
        raise DomainError(f"gamma_fn is defined for x > 0, got {x}")
    return float(special.gamma(x))


@dataclass(frozen=True)
class HurstModel:
    H: float
    kappa: float = field(init=False)
    lam: float = field(init=False)

    def __post_init__(self) -> None:
        if not 0.5 < self.H < 1.0:
            raise DomainError(f"Hurst index must lie in (1/2, 1), got H={self.H}")
        self._set_constants()

    def _set_constants(self) -> None:
        H = float(self.H)
        kappa = 2.0 * H * gamma_fn(1.5 - H) * gamma_fn(H + 0.5)
        lam = 2.0 * H * gamma_fn(3.0 - 2.0 * H) * gamma_fn(H + 0.5) / gamma_fn(1.5 - H)
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "kappa", kappa)
        object.__setattr__(self, "lam", lam)

    @classmethod
    def degenerate_brownian(cls) -> "HurstModel":
        """H = 1/2 (standard Brownian motion). Only meant for oracle tests."""
        model = object.__new__(cls)
        object.__setattr__(model, "H", 0.5)
        model._set_constants()
        return model

    @property
    def exponent(self) -> float:
        """1/2 - H, the kernel exponent."""
        return 0.5 - self.H

    @property
    def beta_shape(self) -> float:
        return 1.5 - self.H


def kernel_kH(model: HurstModel, t: float, s: ArrayLike) -> ArrayLike:
    if not t > 0:
        raise DomainError(f"kernel_kH needs t > 0, got {t}")
    s_arr = np.asarray(s, dtype=float)
    inside = (s_arr > 0) & (s_arr < t)
    # placeholder value keeps the power well defined off the support
    safe = np.where(inside, s_arr, 0.5 * t)
    value = np.where(
        inside,
        (safe * (t - safe)) ** model.exponent / model.kappa,
        0.0,
    )
    return float(value) if value.ndim == 0 else value


def weight_wH(model: HurstModel, t: ArrayLike) -> ArrayLike:
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise DomainError("weight_wH needs t >= 0")
    value = t_arr ** (2.0 - 2.0 * model.H) / model.lam
    return float(value) if value.ndim == 0 else value


def kernel_cell_weights(model: HurstModel, t: float, edges: np.ndarray) -> np.ndarray:
    """Exact integrals of k_H(t, .) over [edges[i], edges[i+1]]."""
    if not t > 0:
        raise DomainError(f"kernel_cell_weights needs t > 0, got {t}")
    p = model.beta_shape
    ratio = np.clip(np.asarray(edges, dtype=float) / t, 0.0, 1.0)
    scale = t ** (2.0 - 2.0 * model.H) * special.beta(p, p) / model.kappa
    return scale * np.diff(special.betainc(p, p, ratio))


def kernel_integral(
    model: HurstModel,
    t: float,
    h: Callable[[np.ndarray], ArrayLike],
    subintervals: int = DEFAULT_SUBINTERVALS,
    rtol: float = 1e-6,
    atol: float = 1e-12,
    max_refinements: int = 4,
) -> float:
    """Integral of k_H(t, s) h(s) over (0, t).

    Evaluates at `subintervals` and at twice as many cells, doubling again
    while the two disagree, up to `max_refinements` doublings.
    """
    if subintervals < 1 or max_refinements < 1:
        raise DomainError("subintervals and max_refinements must be >= 1")

    def _evaluate(cells: int) -> float:
        edges = np.linspace(0.0, t, cells + 1)
        mids = 0.5 * (edges[:-1] + edges[1:])
        values = np.broadcast_to(np.asarray(h(mids), dtype=float), mids.shape)
        return float(kernel_cell_weights(model, t, edges) @ values)

    cells = subintervals
    previous = _evaluate(cells)
    for _ in range(max_refinements):
        cells *= 2
        current = _evaluate(cells)
        if not np.isfinite(current):
            raise QuadratureError(f"kernel_integral produced {current} at t={t}")
        if abs(current - previous) <= rtol * abs(current) + atol:
            return current
        previous = current
    raise QuadratureError(
        f"kernel_integral did not converge at t={t} after {max_refinements} doublings "
        f"(last change {abs(current - previous):.3e})"
    )


@lru_cache(maxsize=8)
def kernel_weight_matrix(model: HurstModel, grid: TimeGrid) -> np.ndarray:
    """Row k holds the cell integrals of k_H(t_k, .) over the grid cells.

    Shape (N+1, N); row 0 is zero and cells at or beyond t_k are zero.
    Shared read-only between callers.
    """
    p = model.beta_shape
    N = grid.N
    k = np.arange(1, N + 1, dtype=float)[:, None]
    i = np.arange(N + 1, dtype=float)[None, :]
    ratio = np.minimum(i / k, 1.0)
    cells = np.diff(special.betainc(p, p, ratio), axis=1)
    scale = grid.nodes[1:] ** (2.0 - 2.0 * model.H) * special.beta(p, p) / model.kappa
    weights = np.zeros((N + 1, N))
    weights[1:] = scale[:, None] * cells
    weights.setflags(write=False)
    return weights


def kernel_cumulative(model: HurstModel, grid: TimeGrid, values: np.ndarray) -> np.ndarray:
    """Integral of k_H(t_k, s) v(s) over (0, t_k) at every node.

    `values` holds v at the left end of each cell (piecewise constant);
    a trailing batch axis of shape (..., N) is supported.
    """
    values = np.asarray(values, dtype=float)
    if values.shape[-1] != grid.N:
        raise DomainError(f"Expected {grid.N} cell values, got {values.shape[-1]}")
    return values @ kernel_weight_matrix(model, grid).T


def d_dw(model: HurstModel, grid: TimeGrid, g: np.ndarray) -> np.ndarray:
    """Forward difference of node values with respect to w, one value per cell."""
    g = np.asarray(g, dtype=float)
    if g.shape[-1] != grid.N + 1:
        raise DomainError(f"Expected {grid.N + 1} node values, got {g.shape[-1]}")
    dw = np.diff(weight_wH(model, grid.nodes))
    if np.any(dw <= 0):
        bad = int(np.argmax(dw <= 0))
        raise NumericalError(f"Degenerate grid: zero w-increment at cell {bad}")
    return np.diff(g, axis=-1) / dw
