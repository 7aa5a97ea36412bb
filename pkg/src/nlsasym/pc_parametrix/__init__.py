"""Parabolic-cylinder special function and the explicit model-problem solution."""

from .parametrix import (
    P1,
    PCSolution,
    RAY_ANGLES,
    beta,
    classify_sector,
    jump_matrix,
    jump_residual,
    nu_from_m,
    parametrix_P,
    pc_coefficients,
    spectral_norm_2x2,
)
from .weber import weber_U, weber_U_scaled

__all__ = [
    "P1",
    "PCSolution",
    "RAY_ANGLES",
    "beta",
    "classify_sector",
    "jump_matrix",
    "jump_residual",
    "nu_from_m",
    "parametrix_P",
    "pc_coefficients",
    "spectral_norm_2x2",
    "weber_U",
    "weber_U_scaled",
]
