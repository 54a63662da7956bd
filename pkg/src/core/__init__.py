from .grid import SamplePath, TimeGrid
from .hurst import (
    HurstModel,
    d_dw,
    gamma_fn,
    kernel_cell_weights,
    kernel_cumulative,
    kernel_integral,
    kernel_kH,
    kernel_weight_matrix,
    weight_wH,
)

__all__ = [
    "HurstModel",
    "SamplePath",
    "TimeGrid",
    "d_dw",
    "gamma_fn",
    "kernel_cell_weights",
    "kernel_cumulative",
    "kernel_integral",
    "kernel_kH",
    "kernel_weight_matrix",
    "weight_wH",
]
