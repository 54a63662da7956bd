from __future__ import annotations

import numpy as np

from src.errors import DomainError


class EmpiricalCdf:
    """F_n(y) = #{samples <= y} / n, right-continuous."""

    def __init__(self, samples) -> None:
        samples = np.asarray(samples, dtype=float).ravel()
        if samples.size == 0:
            raise DomainError("EmpiricalCdf needs at least one sample")
        if not np.all(np.isfinite(samples)):
            raise DomainError("EmpiricalCdf samples must be finite")
        self.sorted_samples = np.sort(samples)
        self.n = samples.size

    def counts(self, y) -> np.ndarray:
        return np.searchsorted(self.sorted_samples, np.asarray(y, dtype=float), side="right")

    def __call__(self, y):
        return self.counts(y) / self.n
