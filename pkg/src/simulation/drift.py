from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Mapping

import numpy as np

from src.core.grid import TimeGrid
from src.errors import ConfigError, DomainError

StateFn = Callable[[np.ndarray], np.ndarray]
TimeFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class DriftSpec:
    """dX = (a(X) + phi b(t)) dt + sigma(t) dW^H.

    The callables must accept numpy arrays. `params` keeps whatever is needed
    to rebuild the spec through `build_drift`.
    """

    name: str
    a: StateFn
    b: TimeFn
    sigma: TimeFn
    params: Mapping[str, Any] = field(default_factory=dict)

    def at_nodes(self, grid: TimeGrid) -> tuple[np.ndarray, np.ndarray]:
        """(b, sigma) sampled at the left end of every cell."""
        t = grid.nodes[:-1]
        b = np.broadcast_to(np.asarray(self.b(t), dtype=float), t.shape)
        sigma = np.broadcast_to(np.asarray(self.sigma(t), dtype=float), t.shape)
        return b, sigma

    def validate(self, grid: TimeGrid) -> None:
        sigma = np.broadcast_to(np.asarray(self.sigma(grid.nodes), dtype=float), grid.nodes.shape)
        if not np.all(np.isfinite(sigma)) or np.any(sigma <= 0):
            raise DomainError(f"Drift '{self.name}': sigma must be positive on [0, T]")

    def lower_ratio(self, grid: TimeGrid) -> float:
        """min b/sigma over the grid nodes."""
        t = grid.nodes
        b = np.broadcast_to(np.asarray(self.b(t), dtype=float), t.shape)
        sigma = np.broadcast_to(np.asarray(self.sigma(t), dtype=float), t.shape)
        return float(np.min(b / sigma))

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, **dict(self.params)}


def vasicek_drift(beta: float = 1.0, sigma: float = 1.0) -> DriftSpec:
    """Fractional Vasicek: a(x) = -beta x, b = 1, constant sigma."""
    if beta <= 0:
        raise DomainError(f"Vasicek beta must be positive, got {beta}")
    if sigma <= 0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    return DriftSpec(
        name="vasicek",
        a=lambda x: -beta * x,
        b=lambda t: np.ones_like(t),
        sigma=lambda t: np.full_like(t, sigma),
        params={"beta": float(beta), "sigma": float(sigma)},
    )


def constant_drift(c: float = 0.0, b: float = 1.0, sigma: float = 1.0) -> DriftSpec:
    """a = c, constant effect multiplier b and diffusion sigma."""
    if sigma <= 0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    return DriftSpec(
        name="constant",
        a=lambda x: np.full_like(x, c),
        b=lambda t: np.full_like(t, b),
        sigma=lambda t: np.full_like(t, sigma),
        params={"c": float(c), "b": float(b), "sigma": float(sigma)},
    )


DRIFT_REGISTRY = {
    "vasicek": vasicek_drift,
    "constant": constant_drift,
}


def build_drift(config: Mapping[str, Any]) -> DriftSpec:
    """Construct a drift from `{name: ..., **params}`."""
    params = dict(config or {})
    name = params.pop("name", "vasicek")
    params.pop("x0", None)
    if name not in DRIFT_REGISTRY:
        raise ConfigError(f"Unknown drift '{name}', expected one of {sorted(DRIFT_REGISTRY)}")
    try:
        return DRIFT_REGISTRY[name](**params)
    except (TypeError, DomainError) as exc:
        raise ConfigError(f"Invalid parameters for drift '{name}': {exc}") from exc
