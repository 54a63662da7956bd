"""Gaussian kernel density estimator with Silverman's bandwidth."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy import stats

from src.errors import BandwidthError, DomainError

SilvermanVariant = Literal["paper", "classical"]


@dataclass(frozen=True, eq=False)
class KernelDensity:
    samples: np.ndarray
    h: float

    def __post_init__(self) -> None:
        if not self.h > 0:
            raise DomainError(f"Bandwidth must be positive, got {self.h}")
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=float).ravel())

    def evaluate(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        z = (x[..., None] - self.samples) / self.h
        return stats.norm.pdf(z).mean(axis=-1) / self.h

    __call__ = evaluate

    @property
    def hyperparameter(self) -> float:
        return float(self.h)


def fit_kde(samples, h: float) -> KernelDensity:
    samples = np.asarray(samples, dtype=float).ravel()
    if samples.size == 0:
        raise DomainError("fit_kde needs at least one sample")
    return KernelDensity(samples=samples, h=float(h))


def silverman_rule(sd: float, iqr: float, n: int, variant: SilvermanVariant = "paper") -> float:
    """1.06 min(sd, s) n^-1/5 with s = 1.34 IQR ("paper") or IQR / 1.34 ("classical").

    A zero spread measure is skipped in favour of the other one.
    """
    if variant == "paper":
        spread = 1.34 * iqr
    elif variant == "classical":
        spread = iqr / 1.34
    else:
        raise DomainError(f"Unknown Silverman variant '{variant}'")
    candidates = [v for v in (sd, spread) if v > 0]
    if not candidates:
        raise BandwidthError("All samples are identical (sd = IQR = 0); set an explicit bandwidth")
    return 1.06 * min(candidates) * n**-0.2


def silverman_bandwidth(samples, variant: SilvermanVariant = "paper") -> float:
    samples = np.asarray(samples, dtype=float).ravel()
    if samples.size < 2:
        raise DomainError("silverman_bandwidth needs at least 2 samples")
    if np.ptp(samples) == 0:
        raise BandwidthError("All samples are identical; set an explicit bandwidth")
    q1, q3 = np.percentile(samples, [25.0, 75.0], method="linear")
    return silverman_rule(float(np.std(samples, ddof=1)), float(q3 - q1), samples.size, variant)
