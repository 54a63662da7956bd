from .mle import (
    EffectEstimate,
    estimate_arrays,
    estimate_bundle,
    estimate_effect,
    load_estimates,
    save_estimates,
    vasicek_oracle,
)
from .molchan import MolchanView, molchan_functionals, molchan_transform
