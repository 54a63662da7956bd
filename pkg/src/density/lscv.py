"""Least-squares cross-validation for the Bernstein order.

    LSCV(m) = int_0^1 f_hat_m^2 - (2/n) sum_j f_hat_m^(-j)(X_j)
"""

from __future__ import annotations

import math
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy import integrate

from src.density.bernstein import bernstein_basis_matrix, bernstein_knots, bin_counts, fit_bernstein
from src.density.ecdf import EmpiricalCdf
from src.errors import DomainError

SIMPSON_NODES = 513


def default_m_grid(n: int) -> list[int]:
    return list(range(2, math.ceil(4.0 * n**0.4) + 1))


def lscv_score(samples, m: int, nodes: int = SIMPSON_NODES) -> float:
    x = np.asarray(samples, dtype=float).ravel()
    n = x.size
    if n < 3:
        raise DomainError(f"LSCV needs at least 3 samples, got {n}")

    density = fit_bernstein(x, m)
    grid = np.linspace(0.0, 1.0, nodes)
    integral_sq = integrate.simpson(density(grid) ** 2, x=grid)

    # Leave-one-out fits differ from the full fit only in the bin of X_j.
    counts = bin_counts(EmpiricalCdf(x), m)
    inside = (x >= 0.0) & (x <= 1.0)
    loo = np.zeros(n)
    if inside.any():
        xs = x[inside]
        basis = bernstein_basis_matrix(m - 1, xs)
        own_bin = np.searchsorted(bernstein_knots(m), xs, side="left") - 1
        in_bin = (own_bin >= 0) & (own_bin < m)
        own = np.zeros(xs.size)
        own[in_bin] = basis[np.flatnonzero(in_bin), own_bin[in_bin]]
        loo[inside] = m * (basis @ counts - own) / (n - 1)
    return float(integral_sq - 2.0 * loo.mean())


def lscv_select_m(samples, m_grid: Optional[Iterable[int]] = None, nodes: int = SIMPSON_NODES) -> int:
    """argmin of LSCV over m_grid, ties going to the smaller m."""
    x = np.asarray(samples, dtype=float).ravel()
    grid: Sequence[int] = sorted(set(int(m) for m in (m_grid if m_grid is not None else default_m_grid(x.size))))
    if not grid:
        raise DomainError("m_grid must not be empty")
    scores = np.array([lscv_score(x, m, nodes) for m in grid])
    return int(grid[int(np.argmin(scores))])
