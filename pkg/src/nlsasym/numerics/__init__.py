"""Shared quadrature, special-transcendental, and sector-integration kernels.

All operations here are pure; rules and specs are immutable after
construction and safe to use concurrently.
"""

from .gammafn import arg_gamma_imag, log_gamma, log_gamma_abs_imag
from .quadrature import (
    QuadratureRule,
    SectorSpec,
    adaptive_quad,
    default_sector_radius,
    gauss_legendre,
    geometric_edges,
    panel_rule,
    sector_quad,
)

__all__ = [
    "QuadratureRule",
    "SectorSpec",
    "adaptive_quad",
    "arg_gamma_imag",
    "default_sector_radius",
    "gauss_legendre",
    "geometric_edges",
    "log_gamma",
    "log_gamma_abs_imag",
    "panel_rule",
    "sector_quad",
]
