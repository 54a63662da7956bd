"""Maximum-likelihood estimation of each subject's random effect.

    phi_hat = (int J2 dZ - int J1 J2 dw) / int J2^2 dw
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from src.core.grid import SamplePath
from src.core.hurst import HurstModel, kernel_kH, weight_wH
from src.errors import DomainError, ReportError, UnidentifiableEffectError
from src.estimation.molchan import MolchanView, molchan_functionals
from src.simulation.fbm import FbmPath
from src.simulation.sde import TrajectoryBundle


@dataclass(frozen=True)
class EffectEstimate:
    subject: int
    phi_hat: float
    info: float

    def __post_init__(self) -> None:
        if not self.info > 0:
            raise DomainError(f"Observed information must be positive, got {self.info}")


def _mle(Z: np.ndarray, J1: np.ndarray, J2: np.ndarray, w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    dw = np.diff(w)
    info = np.sum(J2**2 * dw, axis=-1)
    numerator = np.sum(J2 * np.diff(Z, axis=-1), axis=-1) - np.sum(J1 * J2 * dw, axis=-1)
    info = np.atleast_1d(info)
    if np.any(info <= 0):
        subject = int(np.argmax(info <= 0))
        raise UnidentifiableEffectError(
            f"Effect is unidentifiable for subject {subject}: int J2^2 dw = {info[subject]:.3e}"
        )
    return np.atleast_1d(numerator) / info, info


def estimate_effect(view: MolchanView, subject: int = 0) -> EffectEstimate:
    phi_hat, info = _mle(view.Z, view.J1, view.J2, view.w)
    return EffectEstimate(subject=subject, phi_hat=float(phi_hat[0]), info=float(info[0]))


def estimate_arrays(bundle: TrajectoryBundle) -> tuple[np.ndarray, np.ndarray]:
    """(phi_hat, info) for every subject of the bundle."""
    Z, J1, J2, w = molchan_functionals(bundle.model, bundle.grid, bundle.values, bundle.drift)
    return _mle(Z, J1, J2, w)


def estimate_bundle(bundle: TrajectoryBundle) -> List[EffectEstimate]:
    phi_hat, info = estimate_arrays(bundle)
    return [EffectEstimate(subject=j, phi_hat=float(p), info=float(i)) for j, (p, i) in enumerate(zip(phi_hat, info))]


def vasicek_oracle(
    model: HurstModel,
    path: SamplePath,
    beta: float,
    fbm: FbmPath,
    sigma: float = 1.0,
    phi: Optional[float] = None,
) -> float:
    """phi + sigma M_T / w_T, with M_T a midpoint Riemann sum over the driving noise.

    When phi is not given it is read back from the Euler recursion.
    """
    grid = path.grid
    dW = fbm.increments
    if phi is None:
        phi = float(np.mean(np.diff(path.values) / grid.dt - sigma * dW / grid.dt + beta * path.values[:-1]))
    mids = 0.5 * (grid.nodes[:-1] + grid.nodes[1:])
    martingale = float(np.sum(kernel_kH(model, grid.T, mids) * dW))
    return phi + sigma * martingale / weight_wH(model, grid.T)


def save_estimates(
    estimates: Sequence[EffectEstimate],
    path: Union[str, Path],
    true_effects: Optional[np.ndarray] = None,
) -> None:
    frame = pd.DataFrame({
        "subject": [e.subject for e in estimates],
        "phi_true": np.nan if true_effects is None else np.asarray(true_effects, dtype=float),
        "phi_hat": [e.phi_hat for e in estimates],
        "info": [e.info for e in estimates],
    })
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False)
    except OSError as exc:
        raise ReportError(f"Could not write estimates: {exc}", str(path)) from exc


def load_estimates(path: Union[str, Path]) -> pd.DataFrame:
    try:
        frame = pd.read_csv(path, float_precision="round_trip")
    except OSError as exc:
        raise ReportError(f"Could not read estimates: {exc}", str(path)) from exc
    missing = {"subject", "phi_hat"} - set(frame.columns)
    if missing:
        raise ReportError(f"Estimates file lacks columns {sorted(missing)}", str(path))
    return frame
