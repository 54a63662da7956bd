from .bernstein import BernsteinDensity, bernstein_basis, bernstein_basis_matrix, fit_bernstein
from .ecdf import EmpiricalCdf
from .kernel import KernelDensity, fit_kde, silverman_bandwidth, silverman_rule
from .lscv import default_m_grid, lscv_score, lscv_select_m
from .policies import KDE_POLICIES, M_POLICIES, resolve_bandwidth, resolve_order
from .transforms import (
    AffineTransform,
    PositiveTransform,
    RealLineTransform,
    build_transform,
    inverse_support_transform,
    support_transform,
)
