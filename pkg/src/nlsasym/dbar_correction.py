"""Sector extensions, their dbar derivatives, the conjugated nilpotent field,
and the explicit first correction to the long-time leading term.

The reflection data is continued off the real axis into four sectors about
the stationary-phase point by interpolating between its boundary trace and
a constant on the diagonals, with the cos(2 arg) profile; the analytic
factors f(z; z0)^{+-2} ride along at complex argument so they are
annihilated by dbar.  The failure of analyticity,

    dbar E_j = cos(2 phi)/2 * (analytic factor) * d/du(trace)
               + (bracket difference) * (-i e^{i phi} sin(2 phi) / rho),

feeds a nilpotent matrix field W = P Delta P^{-1}.  Conjugating by the
explicit parametrix and cancelling every exponential algebraically leaves

    W = s_j * dbar(E_j) * [[-u1 u2, u1^2], [-u2^2, u1 u2]],

with u1, u2 plain parabolic-cylinder values of the recessive column, so the
integrands handed to the sector quadrature are overflow-free and carry all
damping inside U.  The first correction is then

    q1(x, t) = (2i/pi) * Phi(x, t) * Int Int W_12 dA,
    Phi = e^{-i omega} e^{4 i t z0^2} c(z0)^{-2} (2 sqrt(t))^{-2 i nu},

and the same prefactor times beta(m)/2 * t^{-1/2} reassembles the leading
term, which welds the scattering phases to the parametrix phases.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .numerics.oscquad import damped_sector_integral
from .pc_parametrix import PCSolution, beta as beta_fn, weber_U, weber_U_scaled
from .pc_parametrix.parametrix import _ROT, _SQRT2
from .phase_functionals import CutIntegralTable, c_constant, cut_table, nu as nu_fn
from .zs_scattering import ScatteringData

# per sector: real-edge direction, diagonal direction, oscillation sign of
# e^{s i zeta^2} in Delta, and the scalar sign in the W pattern
_SECTOR_GEOMETRY = {
    1: (1.0, cmath.exp(0.25j * math.pi), +1, +1.0),
    3: (-1.0, cmath.exp(0.75j * math.pi), -1, -1.0),
    4: (-1.0, cmath.exp(-0.75j * math.pi), +1, -1.0),
    6: (1.0, cmath.exp(-0.25j * math.pi), -1, +1.0),
}

_RHO_MIN = 1e-12


@dataclass(frozen=True)
class SectorPoint:
    """A point in one of the six sectors about z0, with its polar data."""

    u: float
    v: float
    sector: int
    rho: float
    phi: float

    @staticmethod
    def locate(z: complex, z0: float) -> "SectorPoint":
        z = complex(z)
        w = z - z0
        rho, phi = abs(w), cmath.phase(w)
        if rho < _RHO_MIN:
            raise InvalidInputError("point coincides with the vertex",
                                    module="dbar_correction", operation="SectorPoint")
        grid = (0.0, 0.25 * math.pi, 0.75 * math.pi, math.pi)
        if phi > 0:
            sector = 1 if phi < grid[1] else (2 if phi < grid[2] else 3)
        else:
            sector = 6 if phi > -grid[1] else (5 if phi > -grid[2] else 4)
        return SectorPoint(u=z.real, v=z.imag, sector=sector, rho=rho, phi=phi)


class CorrectionContext:
    """Everything needed to evaluate E_j, W, and q1 at one (x, t).

    Immutable after construction; holds the scattering splines, the cut
    integral table for f^{+-2}, the parametrix amplitudes at m = |r(z0)|,
    and the unimodular prefactor of the reconstruction formula.
    """

    def __init__(self, sd: ScatteringData, x: float, t: float):
        if t <= 0.0:
            raise InvalidInputError("t must be positive",
                                    module="dbar_correction",
                                    operation="CorrectionContext")
        self.sd = sd
        self.x = float(x)
        self.t = float(t)
        self.z0 = -x / (4.0 * t)
        self.m = float(sd.abs_r(self.z0))
        self.nu = nu_fn(self.m)
        self.omega = float(np.angle(sd.r_at(self.z0))) if self.m > 0 else 0.0
        self.c0 = c_constant(self.z0, sd)
        self.pc = PCSolution.for_modulus(self.m)
        self.table: CutIntegralTable = cut_table(sd, self.z0)
        self.scale = 2.0 * math.sqrt(t)
        live = np.nonzero(np.abs(sd.r) > 1e-9)[0]
        if live.size:
            z_lo, z_hi = sd.z[live[0]], sd.z[live[-1]]
        else:
            z_lo = z_hi = self.z0
        span = max(abs(z_lo - self.z0), abs(z_hi - self.z0))
        self.tau_max = span + 2.0
        # e^{-i omega} e^{-2 i t theta(z0; z0)} c^{-2} (2 sqrt t)^{-2 i nu}
        self.prefactor = (cmath.exp(-1j * self.omega)
                          * cmath.exp(4j * t * self.z0 ** 2)
                          * self.c0 ** -2
                          * cmath.exp(-2j * self.nu * math.log(self.scale)))

    # -- scalar ingredients -------------------------------------------------

    def f_squared(self, z) -> np.ndarray:
        """f(z; z0)^2 off the cut, via the panel table."""
        z = np.asarray(z, dtype=complex)
        delta2 = np.exp(self.table.cauchy_integral(z) / (1j * math.pi))
        power = np.exp(-2j * self.nu * np.log(z - self.z0))
        return self.c0 ** 2 * delta2 * power

    def _trace_pieces(self, u):
        r = self.sd.r_at(u)
        rp = self.sd.r_prime(u)
        a2 = r.real ** 2 + r.imag ** 2
        return r, rp, 1.0 - a2

    def dbar_extension(self, j: int, z) -> np.ndarray:
        """Closed-form dbar E_j at points of sector j (vectorized)."""
        if j not in _SECTOR_GEOMETRY:
            raise InvalidInputError(f"extension defined on sectors 1,3,4,6; got {j}",
                                    module="dbar_correction", operation="dbar_E")
        z = np.asarray(z, dtype=complex)
        w = z - self.z0
        rho = np.abs(w)
        if np.any(rho < _RHO_MIN):
            raise InvalidInputError("point too close to the vertex",
                                    module="dbar_correction", operation="dbar_E")
        phi = np.angle(w)
        c2 = np.cos(2.0 * phi)
        dbar_cos = -1j * np.exp(1j * phi) * np.sin(2.0 * phi) / rho
        r, rp, one_m = self._trace_pieces(z.real)
        eio = cmath.exp(1j * self.omega)
        m, one_m0 = self.m, 1.0 - self.m * self.m
        if j in (1, 4):
            fm2 = 1.0 / self.f_squared(z)
            if j == 1:
                grad = 0.5 * c2 * fm2 * rp / eio
                bracket = fm2 * r / eio - m
            else:
                d_ratio = (rp * one_m + r * 2.0 * (r.real * rp.real + r.imag * rp.imag)) \
                    / one_m ** 2
                grad = 0.5 * c2 * fm2 * d_ratio / eio
                bracket = fm2 * r / (eio * one_m) - m / one_m0
            return grad + bracket * dbar_cos
        f2 = self.f_squared(z)
        if j == 3:
            d_ratio = (np.conj(rp) * one_m
                       + np.conj(r) * 2.0 * (r.real * rp.real + r.imag * rp.imag)) \
                / one_m ** 2
            grad = 0.5 * c2 * f2 * d_ratio * eio
            bracket = f2 * np.conj(r) * eio / one_m - m / one_m0
        else:
            grad = 0.5 * c2 * f2 * np.conj(rp) * eio
            bracket = f2 * np.conj(r) * eio - m
        return -(grad + bracket * dbar_cos)

    def extension(self, j: int, z) -> np.ndarray:
        """The extension E_j itself (vectorized over sector-j points)."""
        if j not in _SECTOR_GEOMETRY:
            raise InvalidInputError(f"extension defined on sectors 1,3,4,6; got {j}",
                                    module="dbar_correction", operation="extension_E")
        z = np.asarray(z, dtype=complex)
        phi = np.angle(z - self.z0)
        c2 = np.cos(2.0 * phi)
        r, _, one_m = self._trace_pieces(z.real)
        eio = cmath.exp(1j * self.omega)
        m, one_m0 = self.m, 1.0 - self.m * self.m
        if j == 1:
            return c2 / self.f_squared(z) * r / eio + (1.0 - c2) * m
        if j == 4:
            return c2 / self.f_squared(z) * r / (eio * one_m) \
                + (1.0 - c2) * m / one_m0
        if j == 3:
            return -(c2 * self.f_squared(z) * np.conj(r) * eio / one_m
                     + (1.0 - c2) * m / one_m0)
        return -(c2 * self.f_squared(z) * np.conj(r) * eio + (1.0 - c2) * m)

    # -- matrix fields -------------------------------------------------------

    def _column(self, j: int, zeta):
        return self.pc.w_pair(j, zeta)

    def delta_matrix(self, z) -> np.ndarray:
        """The piecewise nilpotent Delta(u, v), zero on sectors 2 and 5."""
        p = SectorPoint.locate(complex(z), self.z0)
        out = np.zeros((2, 2), dtype=complex)
        if p.sector in (2, 5):
            return out
        zeta = self.scale * (complex(z) - self.z0)
        osc = cmath.exp(1j * zeta * zeta)
        dbar = complex(self.dbar_extension(p.sector, np.array([z]))[0])
        if p.sector == 1:
            out[1, 0] = -dbar * osc
        elif p.sector == 4:
            out[1, 0] = dbar * osc
        elif p.sector == 3:
            out[0, 1] = -dbar / osc
        else:
            out[0, 1] = dbar / osc
        return out

    def w_matrix(self, z) -> np.ndarray:
        """W = P Delta P^{-1}, assembled exponential-free."""
        p = SectorPoint.locate(complex(z), self.z0)
        if p.sector in (2, 5):
            return np.zeros((2, 2), dtype=complex)
        zeta = self.scale * (complex(z) - self.z0)
        u1, u2 = self._column(p.sector, zeta)
        sign = _SECTOR_GEOMETRY[p.sector][3]
        dbar = complex(self.dbar_extension(p.sector, np.array([z]))[0])
        u1, u2 = complex(u1), complex(u2)
        core = np.array([[-u1 * u2, u1 * u1], [-u2 * u2, u1 * u2]])
        return sign * dbar * core

    # -- sector integrals ----------------------------------------------------

    def _w12_deosc(self, j: int):
        """G with W_12 = G * e^{s i zeta^2}: dbar E_j times a squared
        scaled-U column entry; all exponentials already cancelled."""
        pc, a = self.pc, self.pc.a

        def G(z):
            zeta = self.scale * (z - self.z0)
            y = _ROT * zeta
            if j == 1:
                fac = pc.beta * pc.A0 * weber_U_scaled(a, y, fast=True)
            elif j == 6:
                fac = pc.bB0 * weber_U_scaled(-a, 1j * y, fast=True)
            elif j == 3:
                fac = pc.bB1 * weber_U_scaled(-a, -1j * y, fast=True)
            else:
                fac = pc.beta * pc.A1 * weber_U_scaled(a, -y, fast=True)
            sign = _SECTOR_GEOMETRY[j][3]
            return sign * self.dbar_extension(j, z) * fac * fac
        return G

    def _wnorm_deosc(self, j: int):
        """|W| = G * |e^{s i zeta^2}| with G below (spectral norm of the
        rank-one pattern: |dbar E| (|u1|^2 + |u2|^2), de-oscillated)."""
        pc, a = self.pc, self.pc.a

        def G(z):
            zeta = self.scale * (z - self.z0)
            y = _ROT * zeta
            if j == 1:
                u1 = pc.beta * pc.A0 * weber_U_scaled(a, y, fast=True)
                u2 = _SQRT2 * pc.A0 * weber_U_scaled(a - 1.0, y, fast=True)
            elif j == 6:
                u1 = pc.bB0 * weber_U_scaled(-a, 1j * y, fast=True)
                u2 = _SQRT2 * pc.cB0 * weber_U_scaled(1.0 - a, 1j * y, fast=True)
            elif j == 3:
                u1 = pc.bB1 * weber_U_scaled(-a, -1j * y, fast=True)
                u2 = _SQRT2 * pc.cB1 * weber_U_scaled(1.0 - a, -1j * y, fast=True)
            else:
                u1 = pc.beta * pc.A1 * weber_U_scaled(a, -y, fast=True)
                u2 = _SQRT2 * pc.A1 * weber_U_scaled(a - 1.0, -y, fast=True)
            return self.dbar_extension(j, z) \
                * (np.abs(u1) ** 2 + np.abs(u2) ** 2)
        return G

    def w12_integral(self, j: int) -> complex:
        e_r, e_d, osc, _ = _SECTOR_GEOMETRY[j]
        return damped_sector_integral(
            self._w12_deosc(j), z0=self.z0, t=self.t, e_r=e_r, e_d=e_d,
            osc_sign=osc, tau_max=self.tau_max)

    def w_l1(self, j: int) -> float:
        e_r, e_d, osc, _ = _SECTOR_GEOMETRY[j]
        return damped_sector_integral(
            self._wnorm_deosc(j), z0=self.z0, t=self.t, e_r=e_r, e_d=e_d,
            osc_sign=osc, tau_max=self.tau_max, abs_mode=True)


def extension_E(j: int, z, ctx: CorrectionContext) -> complex:
    """E_j at a single point of sector j."""
    p = SectorPoint.locate(complex(z), ctx.z0)
    if p.sector != j:
        raise InvalidInputError(f"point {z} lies in sector {p.sector}, not {j}",
                                module="dbar_correction", operation="extension_E")
    return complex(ctx.extension(j, np.array([complex(z)]))[0])


def dbar_E(j: int, z, ctx: CorrectionContext) -> complex:
    """dbar E_j at a single point of sector j."""
    p = SectorPoint.locate(complex(z), ctx.z0)
    if p.sector != j:
        raise InvalidInputError(f"point {z} lies in sector {p.sector}, not {j}",
                                module="dbar_correction", operation="dbar_E")
    return complex(ctx.dbar_extension(j, np.array([complex(z)]))[0])


def Delta_matrix(z, ctx: CorrectionContext) -> np.ndarray:
    return ctx.delta_matrix(z)


def W_matrix(z, ctx: CorrectionContext) -> np.ndarray:
    return ctx.w_matrix(z)


def q1_correction(x: float, t: float, sd: ScatteringData,
                  ctx: CorrectionContext | None = None) -> complex:
    """The explicit first correction (2i/pi) Phi Int Int W_12 dA."""
    ctx = ctx or CorrectionContext(sd, x, t)
    if ctx.m == 0.0:
        return 0.0 + 0.0j
    total = sum(ctx.w12_integral(j) for j in (1, 3, 4, 6))
    return (2j / math.pi) * ctx.prefactor * total


def w_l1_norm(x: float, t: float, sd: ScatteringData,
              ctx: CorrectionContext | None = None) -> float:
    """Int Int ||W||_2 dA over all four carrying sectors."""
    ctx = ctx or CorrectionContext(sd, x, t)
    if ctx.m == 0.0:
        return 0.0
    return float(sum(ctx.w_l1(j) for j in (1, 3, 4, 6)))


def assembled_leading(sd: ScatteringData, x: float, t: float) -> complex:
    """Leading term as the reconstruction formula writes it:
    Phi(x, t) * beta(m)/2 * t^{-1/2}; equals the alpha-form identically."""
    ctx = CorrectionContext(sd, x, t)
    return ctx.prefactor * beta_fn(ctx.m) * 0.5 / math.sqrt(t)


def corrected_q(x: float, t: float, sd: ScatteringData,
                ctx: CorrectionContext | None = None) -> complex:
    """Leading term plus the explicit first correction."""
    from .evolution import nls_leading

    ctx = ctx or CorrectionContext(sd, x, t)
    return nls_leading(sd, x, t) + q1_correction(x, t, sd, ctx=ctx)
