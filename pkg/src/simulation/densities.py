"""Random-effect densities on [0, 1]: exact samplers plus symbolic models."""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Any, Dict, List, Mapping, Optional, Sequence

import numpy as np
import sympy as sp

from src.errors import ConfigError, DomainError
from src.theory.asymptotics import DensityModel

SUITE: Dict[str, List[Dict[str, Any]]] = {
    "beta_1_2": [{"kind": "beta", "a": 1, "b": 2, "weight": 1.0}],
    "beta_3_5": [{"kind": "beta", "a": 3, "b": 5, "weight": 1.0}],
    "beta_mix": [
        {"kind": "beta", "a": 3, "b": 9, "weight": 0.5},
        {"kind": "beta", "a": 9, "b": 3, "weight": 0.5},
    ],
    # sd, not variance: 0.1 and 0.03
    "truncnorm_mix": [
        {"kind": "truncnorm", "mean": 0.5, "sd": 0.1, "weight": 0.6},
        {"kind": "truncnorm", "mean": 0.9, "sd": 0.03, "weight": 0.4},
    ],
}
COMPONENT_KINDS = ("beta", "truncnorm")


class EffectDensity(ABC):
    name: str
    model: Optional[DensityModel] = None

    @abstractmethod
    def sample(self, size: int, rng: np.random.Generator) -> np.ndarray:
        """Draw `size` i.i.d. effects in [0, 1]."""
        raise NotImplementedError("Subclass must implement sample")

    def pdf(self, x) -> np.ndarray:
        if self.model is None:
            raise DomainError(f"Density '{self.name}' has no pdf")
        return self.model.f(x)


class PointMassDensity(EffectDensity):
    """All effects equal to `value`. Has no density model."""

    def __init__(self, value: float = 0.5) -> None:
        if not 0.0 <= value <= 1.0:
            raise DomainError(f"Point mass must lie in [0, 1], got {value}")
        self.name = f"point_mass_{value:g}"
        self.value = float(value)

    def sample(self, size: int, rng: np.random.Generator) -> np.ndarray:
        return np.full(size, self.value)


class MixtureDensity(EffectDensity):
    """Finite mixture of Beta and [0,1]-truncated normal components.

    Each truncated normal is renormalized on [0, 1] on its own.
    """

    def __init__(self, name: str, components: Sequence[Mapping[str, Any]]) -> None:
        self.name = name
        self.components = [dict(c) for c in components]
        self._validate()
        weights = np.array([float(c["weight"]) for c in self.components])
        self.weights = weights / weights.sum()
        self.model = DensityModel.from_expression(name, self.expression(), sp.Symbol("x"))

    def _validate(self) -> None:
        errors = []
        if not self.components:
            errors.append("at least one component is required")
        for i, comp in enumerate(self.components):
            kind = comp.get("kind")
            if kind not in COMPONENT_KINDS:
                errors.append(f"component {i}: unknown kind '{kind}'")
                continue
            if not isinstance(comp.get("weight"), (int, float)) or comp["weight"] <= 0:
                errors.append(f"component {i}: weight must be a positive number")
            if kind == "beta":
                for key in ("a", "b"):
                    if not isinstance(comp.get(key), (int, float)) or comp[key] <= 0:
                        errors.append(f"component {i}: beta '{key}' must be positive")
            if kind == "truncnorm":
                if not isinstance(comp.get("mean"), (int, float)):
                    errors.append(f"component {i}: truncnorm 'mean' must be a number")
                if not isinstance(comp.get("sd"), (int, float)) or comp["sd"] <= 0:
                    errors.append(f"component {i}: truncnorm 'sd' must be positive")
        if errors:
            raise ConfigError(
                f"Density '{self.name}' validation failed:\n" + "\n".join(f"- {e}" for e in errors)
            )

    def expression(self) -> sp.Expr:
        x = sp.Symbol("x")
        total = sp.Integer(0)
        for weight, comp in zip(self.weights, self.components):
            total += sp.Float(weight) * _component_expression(comp, x)
        return total

    def sample(self, size: int, rng: np.random.Generator) -> np.ndarray:
        labels = rng.choice(len(self.components), size=size, p=self.weights)
        draws = np.empty(size)
        for index, comp in enumerate(self.components):
            mask = labels == index
            count = int(mask.sum())
            if count:
                draws[mask] = _sample_component(comp, count, rng)
        return draws


def _component_expression(comp: Mapping[str, Any], x: sp.Symbol) -> sp.Expr:
    if comp["kind"] == "beta":
        a = sp.nsimplify(comp["a"])
        b = sp.nsimplify(comp["b"])
        return x ** (a - 1) * (1 - x) ** (b - 1) * sp.gamma(a + b) / (sp.gamma(a) * sp.gamma(b))
    mean = sp.Float(comp["mean"])
    sd = sp.Float(comp["sd"])
    mass = (sp.erf((1 - mean) / (sd * sp.sqrt(2))) - sp.erf(-mean / (sd * sp.sqrt(2)))) / 2
    return sp.exp(-((x - mean) ** 2) / (2 * sd**2)) / (sd * sp.sqrt(2 * sp.pi) * mass)


def _sample_component(comp: Mapping[str, Any], count: int, rng: np.random.Generator) -> np.ndarray:
    if comp["kind"] == "beta":
        return rng.beta(comp["a"], comp["b"], size=count)
    accepted: List[np.ndarray] = []
    needed = count
    while needed > 0:
        proposal = rng.normal(comp["mean"], comp["sd"], size=needed)
        keep = proposal[(proposal >= 0.0) & (proposal <= 1.0)]
        accepted.append(keep)
        needed -= keep.size
    return np.concatenate(accepted)[:count]


def density_suite(name: str, components: Optional[Sequence[Mapping[str, Any]]] = None) -> MixtureDensity:
    """Suite density by name, or a user mixture when name == 'user'."""
    if name == "user":
        if not components:
            raise ConfigError("density 'user' requires density.components")
        return MixtureDensity("user", components)
    if name not in SUITE:
        raise ConfigError(f"Unknown density '{name}', expected one of {sorted(SUITE) + ['user']}")
    return MixtureDensity(name, SUITE[name])


def sample_effects(density: EffectDensity, n_subjects: int, rng: np.random.Generator) -> np.ndarray:
    if n_subjects < 1:
        raise DomainError(f"n_subjects must be >= 1, got {n_subjects}")
    return density.sample(n_subjects, rng)


def available_densities() -> List[str]:
    return sorted(SUITE) + ["user"]
