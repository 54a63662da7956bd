"""Bernstein-polynomial density estimator on [0, 1]:

    f_hat(x) = sum_k m [F_n((k+1)/m) - F_n(k/m)] p_k(m-1, x)
    p_k(m, x) = C(m, k) x^k (1-x)^(m-k)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

from src.density.ecdf import EmpiricalCdf
from src.errors import DomainError


def bernstein_basis(m: int, k, x):
    """p_k(m, x), evaluated in log space."""
    k = np.asarray(k)
    x = np.asarray(x, dtype=float)
    if m < 0 or np.any(k < 0) or np.any(k > m):
        raise DomainError(f"Bernstein index out of range: m={m}, k={k}")
    if np.any((x < 0) | (x > 1)):
        raise DomainError("Bernstein basis is defined on [0, 1]")
    log_binom = special.gammaln(m + 1) - special.gammaln(k + 1) - special.gammaln(m - k + 1)
    value = np.exp(log_binom + special.xlogy(k, x) + special.xlog1py(m - k, -x))
    return float(value) if value.ndim == 0 else value


def bernstein_basis_matrix(degree: int, x) -> np.ndarray:
    """Rows are evaluation points, columns p_0..p_degree."""
    x = np.asarray(x, dtype=float).ravel()
    return bernstein_basis(degree, np.arange(degree + 1)[None, :], x[:, None])


def bernstein_knots(m: int) -> np.ndarray:
    return np.arange(m + 1) / m


@dataclass(frozen=True, eq=False)
class BernsteinDensity:
    m: int
    coeffs: np.ndarray

    @property
    def mass(self) -> float:
        """Integral over [0, 1], equal to F_n(1) - F_n(0)."""
        return float(np.sum(self.coeffs) / self.m)

    def evaluate(self, x) -> np.ndarray:
        """f_hat at x; zero outside [0, 1]."""
        x = np.asarray(x, dtype=float)
        inside = (x >= 0.0) & (x <= 1.0)
        out = np.zeros(x.shape)
        if inside.any():
            out[inside] = bernstein_basis_matrix(self.m - 1, x[inside]) @ self.coeffs
        return out

    __call__ = evaluate

    @property
    def hyperparameter(self) -> float:
        return float(self.m)


def bin_counts(cdf: EmpiricalCdf, m: int) -> np.ndarray:
    """#samples in (k/m, (k+1)/m] for k = 0..m-1."""
    return np.diff(cdf.counts(bernstein_knots(m)))


def fit_bernstein(samples, m: int) -> BernsteinDensity:
    if int(m) != m or m < 1:
        raise DomainError(f"Bernstein order must be an integer >= 1, got {m}")
    m = int(m)
    cdf = EmpiricalCdf(samples)
    coeffs = m * np.diff(cdf(bernstein_knots(m)))
    return BernsteinDensity(m=m, coeffs=coeffs)
