from .asymptotics import (
    DensityModel,
    OptimalOrder,
    asymptotic_bias,
    asymptotic_mise,
    asymptotic_variance,
    mise_constants,
    optimal_m,
    psi,
    uniform_error_bound,
)
