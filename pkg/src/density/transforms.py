"""Monotone maps of a support onto [0, 1] and their inverses."""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Any, Mapping

import numpy as np

from src.errors import DomainError


class SupportTransform(ABC):
    @abstractmethod
    def forward(self, y):
        raise NotImplementedError

    @abstractmethod
    def inverse(self, z):
        raise NotImplementedError

    @abstractmethod
    def density_jacobian(self, y):
        """|dz/dy|, to carry a density on [0,1] back to the original support."""
        raise NotImplementedError


class AffineTransform(SupportTransform):
    def __init__(self, a: float, b: float) -> None:
        if not a < b:
            raise DomainError(f"Affine transform needs a < b, got a={a}, b={b}")
        self.a = float(a)
        self.b = float(b)

    def forward(self, y):
        y = np.asarray(y, dtype=float)
        if np.any((y < self.a) | (y > self.b)):
            raise DomainError(f"Affine transform expects values in [{self.a}, {self.b}]")
        return (y - self.a) / (self.b - self.a)

    def inverse(self, z):
        return self.a + np.asarray(z, dtype=float) * (self.b - self.a)

    def density_jacobian(self, y):
        return np.full(np.shape(y), 1.0 / (self.b - self.a))


class PositiveTransform(SupportTransform):
    """z = y / (1 + y) on [0, inf)."""

    def forward(self, y):
        y = np.asarray(y, dtype=float)
        if np.any(y < 0):
            raise DomainError("Positive transform expects y >= 0")
        return y / (1.0 + y)

    def inverse(self, z):
        z = np.asarray(z, dtype=float)
        if np.any((z < 0) | (z >= 1)):
            raise DomainError("Positive inverse expects z in [0, 1)")
        return z / (1.0 - z)

    def density_jacobian(self, y):
        return 1.0 / (1.0 + np.asarray(y, dtype=float)) ** 2


class RealLineTransform(SupportTransform):
    """z = 1/2 + arctan(y) / pi."""

    def forward(self, y):
        return 0.5 + np.arctan(np.asarray(y, dtype=float)) / np.pi

    def inverse(self, z):
        z = np.asarray(z, dtype=float)
        if np.any((z <= 0) | (z >= 1)):
            raise DomainError("Real-line inverse expects z in (0, 1)")
        return np.tan(np.pi * (z - 0.5))

    def density_jacobian(self, y):
        return 1.0 / (np.pi * (1.0 + np.asarray(y, dtype=float) ** 2))


TRANSFORM_REGISTRY = {
    "affine": AffineTransform,
    "positive": PositiveTransform,
    "real_line": RealLineTransform,
}


def build_transform(kind: str, **params: Any) -> SupportTransform:
    if kind not in TRANSFORM_REGISTRY:
        raise DomainError(f"Unknown support transform '{kind}', expected one of {sorted(TRANSFORM_REGISTRY)}")
    return TRANSFORM_REGISTRY[kind](**params)


def support_transform(kind: str, y, **params: Any):
    return build_transform(kind, **params).forward(y)


def inverse_support_transform(kind: str, z, **params: Any):
    return build_transform(kind, **params).inverse(z)


def transform_from_config(config: Mapping[str, Any]) -> SupportTransform:
    params = dict(config)
    return build_transform(params.pop("kind", "affine"), **params)
