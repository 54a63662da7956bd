from typing import Iterable, Optional

import numpy as np

from src.density.kernel import silverman_bandwidth
from src.density.lscv import lscv_select_m
from src.errors import ConfigError
from src.theory.asymptotics import BiasConstant, DensityModel, optimal_m

M_POLICIES = ("lscv", "fixed", "theoretical_opt")
KDE_POLICIES = ("silverman_paper", "silverman_classical", "fixed")


def resolve_order(
    samples: np.ndarray,
    policy: str,
    m: Optional[int] = None,
    m_grid: Optional[Iterable[int]] = None,
    truth: Optional[DensityModel] = None,
    bias_constant: BiasConstant = "derivative",
) -> int:
    """Bernstein order for `samples` under the configured policy."""
    if policy == "lscv":
        return lscv_select_m(samples, m_grid)
    if policy == "fixed":
        if m is None or int(m) < 1:
            raise ConfigError("m_policy 'fixed' requires estimator.bernstein.m >= 1")
        return int(m)
    if policy == "theoretical_opt":
        if truth is None:
            raise ConfigError("m_policy 'theoretical_opt' requires the true density")
        return optimal_m(truth, len(samples), bias_constant).m_rounded
    raise ConfigError(f"Unknown m_policy '{policy}', expected one of {M_POLICIES}")


def resolve_bandwidth(samples: np.ndarray, policy: str, h: Optional[float] = None) -> float:
    if policy == "silverman_paper":
        return silverman_bandwidth(samples, "paper")
    if policy == "silverman_classical":
        return silverman_bandwidth(samples, "classical")
    if policy == "fixed":
        if h is None or not float(h) > 0:
            raise ConfigError("kde_policy 'fixed' requires estimator.kernel.h > 0")
        return float(h)
    raise ConfigError(f"Unknown kde_policy '{policy}', expected one of {KDE_POLICIES}")
