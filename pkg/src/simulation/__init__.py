from .densities import (
    EffectDensity,
    MixtureDensity,
    PointMassDensity,
    available_densities,
    density_suite,
    sample_effects,
)
from .drift import DRIFT_REGISTRY, DriftSpec, build_drift, constant_drift, vasicek_drift
from .fbm import FbmPath, fbm_covariance, simulate_fbm
from .sde import (
    TrajectoryBundle,
    euler_paths,
    load_bundle,
    save_bundle,
    simulate_bundle,
    subject_effects,
)
