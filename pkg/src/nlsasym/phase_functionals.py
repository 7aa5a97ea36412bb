"""Scalar functions of the scattering data entering the leading-order formula.

For a stationary-phase point z0 these are: the phase exponent
nu = -ln(1 - |r(z0)|^2)/(2 pi); the Cauchy-integral factor

    delta(z; z0) = exp( (2 pi i)^-1 Int_{-inf}^{z0} ln(1-|r(s)|^2)/(s - z) ds ),

its regularized companion f = c * delta * (z - z0)^(-i nu) with the
unimodular constant c(z0); and the complex amplitude alpha(z0) with
|alpha|^2 = nu/2 and

    arg alpha = (1/pi) Int ln(z0 - s) d ln(1-|r(s)|^2)
                + pi/4 + arg Gamma(i nu) - arg r(z0).

The Stieltjes integral is evaluated through the value-subtracted split at
z0 - 1 (which tames the log endpoint without differentiating data); the
integration-by-parts form is kept only as a cross-check.

For bulk evaluation of delta at many complex points, a fixed Gauss panel
table over the cut is assembled once per z0; a two-term Taylor subtraction
at u* = clip(Re z, cut) with closed-form moments keeps the table accurate
even when z hugs the cut.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InvalidInputError
from .numerics import adaptive_quad, arg_gamma_imag, geometric_edges, panel_rule
from .zs_scattering import ScatteringData

_BOUNDARY_EPS = 1e-6
_ALPHA_ZERO_TOL = 1e-12


def theta(z, z0: float):
    """Phase polynomial 2 z^2 - 4 z0 z; theta(z0; z0) = -2 z0^2."""
    return 2.0 * np.asarray(z) ** 2 - 4.0 * z0 * np.asarray(z)


def nu(r_abs: float) -> float:
    """-ln(1 - |r|^2)/(2 pi) >= 0 for |r| in [0, 1)."""
    if not (0.0 <= r_abs < 1.0):
        raise InvalidInputError(f"need 0 <= |r| < 1, got {r_abs}",
                                module="phase_functionals", operation="nu")
    return -math.log1p(-r_abs * r_abs) / (2.0 * math.pi)


def _support_lower_edge(sd: ScatteringData, z0: float, floor: float = 1e-14) -> float:
    """Left end of the part of (-inf, z0] where ln(1-|r|^2) is non-negligible."""
    g = np.abs(sd.log_one_minus_r2(sd.z))
    live = np.nonzero(g > floor)[0]
    if live.size == 0:
        return z0
    return min(float(sd.z[live[0]]), z0)


class CutIntegralTable:
    """Reusable Gauss-panel discretization of the cut density for one z0.

    Evaluates I(z) = Int_{lo}^{z0} g(s)/(s - z) ds for batches of complex z
    off the cut, with g = ln(1 - |r|^2).  A two-term Taylor subtraction of g
    about u* = clip(Re z, lo, z0), with its moments integrated in closed
    form, keeps the panel sum accurate arbitrarily close to the cut.
    """

    def __init__(self, sd: ScatteringData, z0: float, n_gauss: int = 8):
        self.sd = sd
        self.z0 = float(z0)
        self.lo = _support_lower_edge(sd, z0)
        if self.z0 - self.lo < 1e-12:
            self.empty = True
            return
        self.empty = False
        span = self.z0 - self.lo
        edges = [self.lo]
        if span > 1.0:
            body = np.arange(self.lo, self.z0 - 1.0, 1.0)[1:]
            edges += list(body) + [self.z0 - 1.0]
            tail_start = self.z0 - 1.0
        else:
            tail_start = self.lo
        tail = self.z0 - geometric_edges(0.0, self.z0 - tail_start, 8, ratio=2.4)[::-1]
        edges += [e for e in tail if e > edges[-1] + 1e-15]
        nodes, weights = panel_rule(np.asarray(edges), n_gauss)
        self.s = nodes
        self.w = weights
        self.g = sd.log_one_minus_r2(nodes)

    def _g_and_slope(self, u):
        rr = self.sd.r_at(u)
        rp = self.sd.r_prime(u)
        a2 = rr.real ** 2 + rr.imag ** 2
        g = np.log1p(-a2)
        slope = -2.0 * (rr.real * rp.real + rr.imag * rp.imag) / (1.0 - a2)
        return g, slope

    def cauchy_integral(self, z) -> np.ndarray:
        """I(z) for an array of complex z strictly off the cut (-inf, z0]."""
        if self.empty:
            return np.zeros(np.shape(z), dtype=complex)
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        u = np.clip(z.real, self.lo, self.z0)
        g_u, dg_u = self._g_and_slope(u)
        # core = sum_i w_i (g_i - g_u - dg_u (s_i - u)) / (s_i - z), assembled
        # from three kernel sums over one reciprocal matrix, chunked in z
        out = np.empty(z.shape, dtype=complex)
        wg = self.w * self.g
        ws = self.w * self.s
        chunk = max(1, int(2e6 // self.s.size))
        for lo_ix in range(0, z.size, chunk):
            sl = slice(lo_ix, lo_ix + chunk)
            recip = 1.0 / (self.s[:, None] - z[None, sl])
            k0 = wg @ recip
            k1 = self.w @ recip
            k2 = ws @ recip
            out[sl] = k0 - g_u[sl] * k1 - dg_u[sl] * (k2 - u[sl] * k1)
        ratio = np.log(self.z0 - z) - np.log(self.lo - z)
        out += g_u * ratio + dg_u * ((self.z0 - self.lo) + (z - u) * ratio)
        return out

    def delta(self, z) -> np.ndarray:
        return np.exp(self.cauchy_integral(z) / (2j * math.pi))


@lru_cache(maxsize=32)
def _cached_table(sd_id: int, z0: float) -> CutIntegralTable:
    sd = _TABLE_REGISTRY[sd_id]
    return CutIntegralTable(sd, z0)


_TABLE_REGISTRY: dict[int, ScatteringData] = {}


def cut_table(sd: ScatteringData, z0: float) -> CutIntegralTable:
    _TABLE_REGISTRY[id(sd)] = sd
    return _cached_table(id(sd), float(z0))


def _check_off_cut(z: complex, z0: float, side):
    on_axis = z.imag == 0.0
    if on_axis and z.real <= z0 and side is None:
        raise InvalidInputError(
            f"z={z} lies on the cut (-inf, {z0}]; pass side=+1 or -1",
            module="phase_functionals", operation="delta")


def delta(z, z0: float, sd: ScatteringData, side: int | None = None) -> complex:
    """The Cauchy-exponential delta(z; z0).

    For real z < z0 a side (+1 upper, -1 lower) selects the boundary value,
    computed at z +- i*eps with one Richardson step in eps.
    """
    z = complex(z)
    _check_off_cut(z, z0, side)
    table = cut_table(sd, z0)
    if side is None or z.imag != 0.0 or z.real > z0:
        return complex(table.delta(np.array([z]))[0])
    if side not in (1, -1):
        raise InvalidInputError("side must be +1 or -1",
                                module="phase_functionals", operation="delta")
    e = _BOUNDARY_EPS
    v1, v2 = table.delta(np.array([z + 1j * side * e, z + 0.5j * side * e]))
    return complex(2.0 * v2 - v1)


def _split_integrals(z0: float, sd: ScatteringData, tol: float = 1e-10):
    """J1 + J2 of the value-subtracted split of the Stieltjes integral.

    J1 = Int_{-inf}^{z0-1} g(s)/(s-z0) ds,
    J2 = Int_{z0-1}^{z0} (g(s)-g(z0))/(s-z0) ds,  g = ln(1-|r|^2);
    both are real and Int ln(z0-s) dg(s) = -(J1+J2).
    """
    lo = _support_lower_edge(sd, z0)
    if z0 - lo < 1e-12:
        return 0.0
    g0 = float(sd.log_one_minus_r2(z0))
    j2 = adaptive_quad(
        lambda s: complex((sd.log_one_minus_r2(s) - g0) / (s - z0)),
        max(z0 - 1.0, lo), z0, tol=tol).real
    j1 = 0.0
    if z0 - 1.0 > lo:
        j1 = adaptive_quad(
            lambda s: complex(sd.log_one_minus_r2(s) / (s - z0)),
            lo, z0 - 1.0, tol=tol).real
    else:
        # split point left of the support: g = 0 on (z0-1, lo), where the
        # subtracted integrand reduces to -g0/(s - z0) with a closed form
        j1 = -g0 * math.log(z0 - lo)
    return j1 + j2


def c_constant(z0: float, sd: ScatteringData) -> complex:
    """Unimodular constant c(z0) from the split representation."""
    return cmath.exp(1j * _split_integrals(z0, sd) / (2.0 * math.pi))


def c_constant_by_parts(z0: float, sd: ScatteringData, tol: float = 1e-8) -> complex:
    """Cross-check form: exp((2 pi i)^-1 Int ln(z0-s) g'(s) ds) via spline g'."""
    lo = _support_lower_edge(sd, z0)
    if z0 - lo < 1e-12:
        return 1.0 + 0.0j

    def integrand(s):
        rr = sd.r_at(s)
        rp = sd.r_prime(s)
        a2 = rr.real ** 2 + rr.imag ** 2
        slope = -2.0 * (rr.real * rp.real + rr.imag * rp.imag) / (1.0 - a2)
        return complex(math.log(z0 - s) * slope)

    val = adaptive_quad(integrand, lo, z0, tol=tol, log_singular_at="upper")
    return cmath.exp(val.real / (2j * math.pi))


def f_function(z, z0: float, sd: ScatteringData, side: int | None = None) -> complex:
    """f(z; z0) = c(z0) delta(z; z0) (z - z0)^(-i nu(z0)), principal branch."""
    z = complex(z)
    if z == complex(z0):
        raise InvalidInputError("f is undefined at z = z0",
                                module="phase_functionals", operation="f_function")
    _check_off_cut(z, z0, side)
    nu0 = nu(float(sd.abs_r(z0)))
    c0 = c_constant(z0, sd)
    if side is not None and z.imag == 0.0 and z.real < z0:
        e = _BOUNDARY_EPS
        zs = [z + 1j * side * e, z + 0.5j * side * e]
        table = cut_table(sd, z0)
        vals = [complex(table.delta(np.array([w]))[0])
                * cmath.exp(-1j * nu0 * cmath.log(w - z0)) for w in zs]
        return c0 * (2.0 * vals[1] - vals[0])
    d = delta(z, z0, sd)
    return c0 * d * cmath.exp(-1j * nu0 * cmath.log(z - z0))


def omega(z0: float, sd: ScatteringData) -> float:
    """arg r(z0)."""
    return float(np.angle(sd.r_at(z0)))


def arg_alpha(z0: float, sd: ScatteringData) -> float:
    """Amplitude phase: Stieltjes term + pi/4 + arg Gamma(i nu) - arg r(z0).

    Undefined where r(z0) = 0 (alpha itself vanishes there).
    """
    m = float(sd.abs_r(z0))
    if m < _ALPHA_ZERO_TOL:
        raise InvalidInputError(
            f"arg alpha undefined: r({z0}) = 0 within tolerance",
            module="phase_functionals", operation="arg_alpha")
    nu0 = nu(m)
    stieltjes = -_split_integrals(z0, sd)  # = Int ln(z0-s) d ln(1-|r|^2)
    return stieltjes / math.pi + 0.25 * math.pi + arg_gamma_imag(nu0) - omega(z0, sd)


def alpha(z0: float, sd: ScatteringData) -> complex:
    """Complex amplitude with |alpha|^2 = nu/2; zero where r(z0) = 0."""
    m = float(sd.abs_r(z0))
    if m < _ALPHA_ZERO_TOL:
        return 0.0 + 0.0j
    return math.sqrt(0.5 * nu(m)) * cmath.exp(1j * arg_alpha(z0, sd))


@dataclass(frozen=True)
class PhaseData:
    """Per-z0 bundle of everything the leading-order formula consumes."""

    z0: float
    nu: float
    c: complex
    omega: float
    arg_alpha: float | None
    alpha: complex

    def __post_init__(self):
        if abs(abs(self.alpha) ** 2 - 0.5 * self.nu) > 1e-10:
            raise InvalidInputError("|alpha|^2 != nu/2",
                                    module="phase_functionals", operation="PhaseData")
        if abs(abs(self.c) - 1.0) > 1e-10:
            raise InvalidInputError("|c| != 1",
                                    module="phase_functionals", operation="PhaseData")

    def to_json_row(self) -> dict:
        return {
            "z0": self.z0, "nu": self.nu,
            "c": [self.c.real, self.c.imag],
            "omega": self.omega,
            "arg_alpha": self.arg_alpha,
            "alpha": [self.alpha.real, self.alpha.imag],
        }


def phase_data(z0: float, sd: ScatteringData) -> PhaseData:
    m = float(sd.abs_r(z0))
    if m < _ALPHA_ZERO_TOL:
        return PhaseData(z0=float(z0), nu=0.0, c=c_constant(z0, sd),
                         omega=0.0, arg_alpha=None, alpha=0.0 + 0.0j)
    return PhaseData(z0=float(z0), nu=nu(m), c=c_constant(z0, sd),
                     omega=omega(z0, sd), arg_alpha=arg_alpha(z0, sd),
                     alpha=alpha(z0, sd))
