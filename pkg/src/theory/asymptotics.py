"""Closed-form asymptotics of the Bernstein density estimator.

    bias(x)     ~ m^-1 (1-2x)/2 f'(x)
    var(x)      ~ m^1/2 n^-1 f(x) psi(x)    0 < x < 1,  psi = (4 pi x(1-x))^-1/2
                ~ m n^-1 f(x)               x in {0, 1}
    MISE(m, n)  ~ m^1/2 n^-1 C_var + m^-2 C_bias
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Literal, Union

import numpy as np
import sympy as sp
from scipy import integrate

from src.core.hurst import HurstModel
from src.errors import DomainError, QuadratureError

BiasConstant = Literal["derivative", "printed"]
SUP_NORM_POINTS = 10_001
DEFAULT_QUAD_LIMIT = 200


def _vectorize(func: Callable) -> Callable[[np.ndarray], np.ndarray]:
    # lambdify returns a scalar for constant expressions
    def wrapped(x):
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(np.asarray(func(x), dtype=float), x.shape).copy()

    return wrapped


@dataclass(frozen=True)
class DensityModel:
    """A C^2 density on [0, 1] with its first two derivatives."""

    name: str
    f: Callable[[np.ndarray], np.ndarray]
    df: Callable[[np.ndarray], np.ndarray]
    d2f: Callable[[np.ndarray], np.ndarray]
    sup_df: float = field(init=False)
    sup_d2f: float = field(init=False)

    def __post_init__(self) -> None:
        grid = np.linspace(0.0, 1.0, SUP_NORM_POINTS)
        values = self.f(grid)
        if not np.all(np.isfinite(values)) or values.min() < -1e-12:
            raise DomainError(f"Density '{self.name}' must be finite and nonnegative on [0, 1]")
        sup_df = float(np.max(np.abs(self.df(grid))))
        sup_d2f = float(np.max(np.abs(self.d2f(grid))))
        if not (np.isfinite(sup_df) and np.isfinite(sup_d2f)):
            raise DomainError(f"Density '{self.name}' is not twice differentiable on [0, 1]")
        object.__setattr__(self, "sup_df", sup_df)
        object.__setattr__(self, "sup_d2f", sup_d2f)
        mass = _quad(self.f, 0.0, 1.0)
        if abs(mass - 1.0) > 1e-6:
            raise DomainError(f"Density '{self.name}' integrates to {mass:.8f}, not 1")

    @classmethod
    def from_expression(cls, name: str, expr: sp.Expr, x: sp.Symbol) -> "DensityModel":
        d1 = sp.diff(expr, x)
        d2 = sp.diff(d1, x)
        modules = ["scipy", "numpy"]
        return cls(
            name=name,
            f=_vectorize(sp.lambdify(x, expr, modules=modules)),
            df=_vectorize(sp.lambdify(x, d1, modules=modules)),
            d2f=_vectorize(sp.lambdify(x, d2, modules=modules)),
        )

    @classmethod
    def uniform(cls) -> "DensityModel":
        x = sp.Symbol("x")
        return cls.from_expression("uniform", sp.Integer(1) + 0 * x, x)


def _quad(func: Callable, a: float, b: float, limit: int = DEFAULT_QUAD_LIMIT) -> float:
    value, abserr = integrate.quad(lambda u: float(func(np.asarray(u))), a, b, limit=limit, epsabs=1e-12, epsrel=1e-10)
    if not np.isfinite(value) or abserr > 1e-8 * max(1.0, abs(value)):
        raise QuadratureError(f"Quadrature on [{a}, {b}] did not converge (error estimate {abserr:.2e})")
    return float(value)


def psi(x):
    x = np.asarray(x, dtype=float)
    return (4.0 * np.pi * x * (1.0 - x)) ** -0.5


def asymptotic_bias(model: DensityModel, m: int, x):
    x = np.asarray(x, dtype=float)
    return (1.0 - 2.0 * x) / 2.0 * model.df(x) / m


def asymptotic_variance(model: DensityModel, m: int, n_subjects: int, x):
    x = np.asarray(x, dtype=float)
    f = model.f(x)
    boundary = (x <= 0.0) | (x >= 1.0)
    interior_x = np.where(boundary, 0.5, x)
    value = np.where(
        boundary,
        m * f / n_subjects,
        np.sqrt(m) * f * psi(interior_x) / n_subjects,
    )
    return float(value) if value.ndim == 0 else value


def mise_constants(
    model: DensityModel,
    bias_constant: BiasConstant = "derivative",
    limit: int = DEFAULT_QUAD_LIMIT,
) -> tuple[float, float]:
    """(C_var, C_bias).

    C_var = int f psi, computed as pi^-1/2 int_0^{pi/2} f(sin^2 theta) d theta.
    C_bias = int ((1-2x)/2)^2 f'(x)^2, or with f(x)^2 for bias_constant="printed".
    """
    c_var = _quad(lambda theta: model.f(np.sin(theta) ** 2), 0.0, np.pi / 2.0, limit) / np.sqrt(np.pi)
    if bias_constant == "derivative":
        g = model.df
    elif bias_constant == "printed":
        g = model.f
    else:
        raise DomainError(f"Unknown bias_constant '{bias_constant}'")
    c_bias = _quad(lambda x: ((1.0 - 2.0 * x) / 2.0) ** 2 * g(x) ** 2, 0.0, 1.0, limit)
    return c_var, c_bias


def asymptotic_mise(
    model: DensityModel,
    m: float,
    n_subjects: int,
    bias_constant: BiasConstant = "derivative",
) -> float:
    if m < 1 or n_subjects < 1:
        raise DomainError("asymptotic_mise needs m >= 1 and n >= 1")
    c_var, c_bias = mise_constants(model, bias_constant)
    return float(np.sqrt(m) * c_var / n_subjects + c_bias / m**2)


@dataclass(frozen=True)
class OptimalOrder:
    m_opt: float
    mise: float
    c_var: float
    c_bias: float

    @property
    def m_rounded(self) -> int:
        return max(1, int(round(self.m_opt)))


def optimal_m(
    model: DensityModel,
    n_subjects: int,
    bias_constant: BiasConstant = "derivative",
) -> OptimalOrder:
    """Minimizer of the asymptotic MISE in m and the MISE it attains."""
    c_var, c_bias = mise_constants(model, bias_constant)
    if c_bias <= 1e-14:
        raise DomainError(
            f"C_bias vanishes for '{model.name}'; the MISE is variance-only, choose m directly"
        )
    m_opt = (4.0 * c_bias / c_var) ** 0.4 * n_subjects**0.4
    mise = 1.25 * 4.0**0.2 * c_var**0.8 * c_bias**0.2 * n_subjects**-0.8
    return OptimalOrder(m_opt=float(m_opt), mise=float(mise), c_var=c_var, c_bias=c_bias)


def uniform_error_bound(
    model: DensityModel,
    m: int,
    n_subjects: int,
    T: float,
    H: Union[float, HurstModel],
    C_lower: float,
) -> float:
    """Non-asymptotic bound on E sup |f_hat - f| with estimated effects.

    Explicit terms only; the middle term carries constant 1.
    """
    if C_lower <= 0:
        raise DomainError(f"C_lower must be positive, got {C_lower}")
    hurst = H if isinstance(H, HurstModel) else HurstModel(H)
    effect_error = hurst.lam * m**4 / (C_lower**2 * T ** (2.0 - 2.0 * hurst.H))
    sampling = m**1.5 / np.sqrt(n_subjects)
    smoothing = (model.sup_df / 2.0 + model.sup_d2f / 8.0) / m
    return float(effect_error + sampling + smoothing)
