"""Quadrature kernels shared by every other module.

One-dimensional work is delegated to QUADPACK through scipy (complex
integrands are split into real and imaginary parts); declared logarithmic
endpoint singularities are removed first by the substitution
``s = a + exp(-tau)``.  Two-dimensional sector integrals use graded
tensor-product Gauss-Legendre panels in polar coordinates about the
sector vertex, refined until two successive levels agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import integrate as _integrate

from ..errors import InvalidInputError, QuadratureError

_LEGGAUSS_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _leggauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    if n not in _LEGGAUSS_CACHE:
        _LEGGAUSS_CACHE[n] = leggauss(n)
    return _LEGGAUSS_CACHE[n]


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes/weights for a fixed rule on the interval (a, b)."""

    nodes: np.ndarray
    weights: np.ndarray
    interval: tuple[float, float]

    def __post_init__(self):
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)

    def integrate(self, f: Callable[[np.ndarray], np.ndarray]) -> complex:
        vals = np.asarray(f(self.nodes))
        return complex(np.sum(self.weights * vals))


def gauss_legendre(n: int, a: float, b: float) -> QuadratureRule:
    """Gauss-Legendre rule with n nodes on [a, b], exact to degree 2n-1."""
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise InvalidInputError(
            f"node count must be a positive integer, got {n!r}",
            module="numerics", operation="gauss_legendre",
        )
    if not (a < b):
        raise InvalidInputError(
            f"degenerate interval [{a}, {b}]",
            module="numerics", operation="gauss_legendre",
        )
    x, w = _leggauss(int(n))
    half = 0.5 * (b - a)
    return QuadratureRule(nodes=a + half * (x + 1.0), weights=half * w, interval=(a, b))


def panel_rule(edges: Sequence[float], n: int) -> tuple[np.ndarray, np.ndarray]:
    """Concatenated n-point Gauss nodes/weights over consecutive panels."""
    x, w = _leggauss(n)
    edges = np.asarray(edges, dtype=float)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def geometric_edges(a: float, b: float, n_panels: int, ratio: float = 3.0) -> np.ndarray:
    """Panel edges on [a, b] shrinking geometrically toward a."""
    widths = ratio ** np.arange(n_panels)
    widths = widths / widths.sum() * (b - a)
    return a + np.concatenate(([0.0], np.cumsum(widths)))


def adaptive_quad(
    f: Callable[[float], complex],
    a: float,
    b: float,
    tol: float = 1e-10,
    log_singular_at: str | None = None,
    full_output: bool = False,
):
    """Adaptive integral of a complex-valued f over (a, b) to tolerance tol.

    ``log_singular_at`` may be "lower" or "upper" to declare an integrable
    logarithmic endpoint singularity, which is removed by substituting
    ``s = endpoint -+ exp(-tau)`` before handing off to QUADPACK.  Raises
    :class:`QuadratureError` if the error estimate exceeds tol.
    """
    if tol <= 0.0:
        raise InvalidInputError("tol must be positive", module="numerics",
                                operation="adaptive_quad")
    def _exp_sub(endpoint, sign):
        def g(tau):
            return f(endpoint + sign * math.exp(-tau)) * math.exp(-tau)
        return g

    def _tau_cap(endpoint):
        # Stop e^{-tau} a couple of bits above ulp(endpoint) so that
        # endpoint -+ e^{-tau} stays representable; the discarded mass is
        # ~ tau * e^{-tau} ~ 1e-14 at worst, below the tolerances in use.
        return -math.log(np.spacing(abs(endpoint)) + 5e-324) - 2.0

    g, lo, hi = f, a, b
    if log_singular_at == "lower":
        if not np.isfinite(a):
            raise InvalidInputError("log-singular endpoint must be finite",
                                    module="numerics", operation="adaptive_quad")
        g = _exp_sub(a, 1.0)
        lo, hi = (-math.log(b - a) if np.isfinite(b) else -np.inf), _tau_cap(a)
    elif log_singular_at == "upper":
        if not np.isfinite(b):
            raise InvalidInputError("log-singular endpoint must be finite",
                                    module="numerics", operation="adaptive_quad")
        g = _exp_sub(b, -1.0)
        lo, hi = (-math.log(b - a) if np.isfinite(a) else -np.inf), _tau_cap(b)
    elif log_singular_at is not None:
        raise InvalidInputError(
            f"log_singular_at must be 'lower', 'upper' or None, got {log_singular_at!r}",
            module="numerics", operation="adaptive_quad",
        )

    re, re_err = _integrate.quad(lambda s: g(s).real, lo, hi, epsabs=0.25 * tol,
                                 epsrel=1e-13, limit=400)
    im, im_err = _integrate.quad(lambda s: g(s).imag, lo, hi, epsabs=0.25 * tol,
                                 epsrel=1e-13, limit=400)
    err = re_err + im_err
    if not np.isfinite(err) or err > tol:
        raise QuadratureError(
            f"error estimate {err:.3e} exceeds tol {tol:.1e} on ({a}, {b})",
            module="numerics", operation="adaptive_quad",
        )
    value = complex(re, im)
    return (value, err) if full_output else value


@dataclass(frozen=True)
class SectorSpec:
    """Truncated sector about a real vertex.

    ``damping_sign`` declares the sign s such that the caller's integrand
    carries a factor exp(-8*t*s*(u - z0)*v) decaying in the sector; it must
    match the actual sign of (u - z0)*v there.
    """

    vertex: float
    phi1: float
    phi2: float
    radius: float
    damping_sign: int = 0

    def __post_init__(self):
        opening = self.phi2 - self.phi1
        if not (0.0 < opening <= 0.5 * math.pi + 1e-12):
            raise InvalidInputError(
                f"sector opening must lie in (0, pi/2], got {opening}",
                module="numerics", operation="SectorSpec",
            )
        if not (np.isfinite(self.radius) and self.radius > 0.0):
            raise InvalidInputError("radial cutoff must be finite and positive",
                                    module="numerics", operation="SectorSpec")

    def interior_product_sign(self) -> int:
        """Sign of (u - z0)*v = rho^2 sin(2 phi)/2 at the sector midline."""
        return int(np.sign(math.sin(self.phi1 + self.phi2)))


def default_sector_radius(t: float, tol: float) -> float:
    """Truncation radius making exp(-8 t R^2 / sqrt(2)) < tol."""
    return math.sqrt(math.sqrt(2.0) * math.log(1.0 / tol) / (8.0 * t))


def sector_quad(
    f: Callable[[np.ndarray], np.ndarray],
    sector: SectorSpec,
    tol: float = 1e-8,
    max_level: int = 7,
) -> complex:
    """Integral of f over the truncated sector, within tol.

    f must accept an ndarray of complex points and return values; an
    integrable vertex singularity up to |z - z0|^(-1/2) is allowed (the
    radial panels are graded toward the vertex).  The caller chooses the
    cutoff radius so that any exponential damping keeps the tail below tol.
    """
    if sector.damping_sign and sector.damping_sign != sector.interior_product_sign():
        raise InvalidInputError(
            "declared damping sign is inconsistent with the sector opening",
            module="numerics", operation="sector_quad",
        )

    z0, r_max = sector.vertex, sector.radius

    def level_value(level: int) -> complex:
        n_rad_panels = 4 + 2 * level
        n_phi_panels = 2 + level
        n_gauss = 8
        rho_edges = geometric_edges(0.0, r_max, n_rad_panels, ratio=2.5)
        rho, w_rho = panel_rule(rho_edges, n_gauss)
        phi_edges = np.linspace(sector.phi1, sector.phi2, n_phi_panels + 1)
        phi, w_phi = panel_rule(phi_edges, n_gauss)
        zz = z0 + rho[:, None] * np.exp(1j * phi[None, :])
        vals = np.asarray(f(zz))
        ww = (w_rho * rho)[:, None] * w_phi[None, :]
        return complex(np.sum(ww * vals))

    prev = level_value(0)
    for level in range(1, max_level + 1):
        cur = level_value(level)
        if abs(cur - prev) <= max(tol, 1e-15 * abs(cur)):
            return cur
        prev = cur
    raise QuadratureError(
        f"sector integral did not settle within tol={tol:.1e} after "
        f"{max_level} refinement levels",
        module="numerics", operation="sector_quad",
    )
