"""Explicit solution of the model Riemann-Hilbert problem at the critical point.

The model problem lives on five rays (arguments +-pi/4, +-3pi/4, pi) with
jumps built from a single modulus parameter m in [0, 1); its solution
P(zeta; m) is assembled sector by sector from parabolic-cylinder functions
with parameter a = 1/2 + i*nu, nu = -ln(1-m^2)/(2*pi).  Written in terms of
the scaled function Uhat = exp(+w^2/4) U(a, w), every matrix entry is
exponential-free: the oscillations exp(+-i zeta^2 / 2) cancel identically
between the column normalization and the recessive direction of each
parabolic-cylinder factor, so entries stay O(poly) for all zeta.

The five sector formulas, the four amplitude constants, and the phase of
the connection coefficient beta(m) are verified at runtime by
:func:`jump_residual`, which measures ||P_+ - P_- V_P|| across each ray.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..errors import InvalidInputError
from ..numerics import arg_gamma_imag
from .weber import weber_U, weber_U_scaled

_SQRT2 = math.sqrt(2.0)
_ROT = _SQRT2 * cmath.exp(-0.25j * math.pi)  # y = _ROT * zeta

RAY_ANGLES = {
    1: 0.25 * math.pi,
    2: 0.75 * math.pi,
    3: math.pi,
    4: -0.75 * math.pi,
    5: -0.25 * math.pi,
}

# (plus sector, minus sector) for each ray.  Rays run "left to right":
# outward in the right half-plane, toward the origin in the left one;
# the boundary value "+" is taken from the left of that direction.
RAY_SIDES = {1: (1, 0), 2: (1, 2), 3: (2, -2), 4: (-2, -1), 5: (0, -1)}


def nu_from_m(m: float) -> float:
    if not (0.0 <= m < 1.0):
        raise InvalidInputError(f"modulus must lie in [0, 1), got {m}",
                                module="pc_parametrix", operation="nu_from_m")
    return -math.log1p(-m * m) / (2.0 * math.pi)


def beta(m: float) -> complex:
    """Connection coefficient beta(m); |beta|^2 = -ln(1-m^2)/pi."""
    nu = nu_from_m(m)
    if nu == 0.0:
        return 0.0 + 0.0j
    modulus = math.sqrt(2.0 * nu)
    phase = 0.25 * math.pi - nu * math.log(2.0) + arg_gamma_imag(nu)
    return modulus * cmath.exp(1j * phase)


def pc_coefficients(m: float) -> dict[str, complex]:
    """The four sector amplitudes {B1_0, A2_0, B1_1, A2_m1}.

    Defined only for 0 < m < 1: two of them carry a 1/beta and blow up as
    m -> 0 (their products with beta stay finite and are what the matrix
    actually uses).
    """
    if not (0.0 < m < 1.0):
        raise InvalidInputError(f"modulus must lie in (0, 1), got {m}",
                                module="pc_parametrix", operation="pc_coefficients")
    nu = nu_from_m(m)
    b = beta(m)
    log_half = math.log(2.0) * nu / 2.0  # = -ln2 * ln(1-m^2)/(4 pi)
    twist = cmath.exp(-1j * log_half)
    return {
        "B1_0": math.exp(0.25 * math.pi * nu) * twist / b,
        "A2_0": math.exp(0.25 * math.pi * nu) / twist / _SQRT2
        * cmath.exp(-0.75j * math.pi),
        "B1_1": math.exp(-0.75 * math.pi * nu) * twist / b,
        "A2_m1": math.exp(-0.75 * math.pi * nu) / twist / _SQRT2
        * cmath.exp(0.25j * math.pi),
    }


@dataclass(frozen=True)
class PCSolution:
    """Context for evaluating P(zeta; m): Weber parameter, beta, amplitudes.

    Immutable; build through :func:`PCSolution.for_modulus` (cached).
    """

    m: float
    nu: float
    a: complex
    beta: complex
    bB0: complex   # beta * B1_0
    bB1: complex   # beta * B1_1
    cB0: complex   # (a - 1/2) * B1_0
    cB1: complex   # (a - 1/2) * B1_1
    A0: complex    # A2_0
    A1: complex    # A2_m1

    @staticmethod
    @lru_cache(maxsize=None)
    def for_modulus(m: float) -> "PCSolution":
        nu = nu_from_m(m)
        b = beta(m)
        log_half = math.log(2.0) * nu / 2.0
        twist = cmath.exp(-1j * log_half)
        scale0 = math.exp(0.25 * math.pi * nu)
        scale1 = math.exp(-0.75 * math.pi * nu)
        # (a - 1/2) B1 = i nu / beta * ... = i conj(beta)/2 * ..., finite at m=0
        half_conj = 0.5j * b.conjugate()
        return PCSolution(
            m=m, nu=nu, a=0.5 + 1j * nu, beta=b,
            bB0=scale0 * twist, bB1=scale1 * twist,
            cB0=half_conj * scale0 * twist, cB1=half_conj * scale1 * twist,
            A0=scale0 / twist / _SQRT2 * cmath.exp(-0.75j * math.pi),
            A1=scale1 / twist / _SQRT2 * cmath.exp(0.25j * math.pi),
        )

    # -- sector formulas (scaled entries; no explicit exponentials) --------

    def matrix(self, zeta, sector: int) -> np.ndarray:
        """P(zeta; m) for zeta in the given sector, shape zeta.shape + (2, 2)."""
        z = np.asarray(zeta, dtype=complex)
        y = _ROT * z
        a, fac = self.a, 1.0 / (1.0 - self.m * self.m)
        if sector == 0:
            p11 = self.bB0 * weber_U_scaled(-a, 1j * y)
            p12 = self.beta * self.A0 * weber_U_scaled(a, y)
            p21 = _SQRT2 * cmath.exp(0.25j * math.pi) * self.cB0 \
                * weber_U_scaled(1.0 - a, 1j * y)
            p22 = _SQRT2 * cmath.exp(0.75j * math.pi) * self.A0 \
                * weber_U_scaled(a - 1.0, y)
        elif sector == 1:
            p11 = self.bB1 * weber_U_scaled(-a, -1j * y)
            p12 = self.beta * self.A0 * weber_U_scaled(a, y)
            p21 = _SQRT2 * cmath.exp(-0.75j * math.pi) * self.cB1 \
                * weber_U_scaled(1.0 - a, -1j * y)
            p22 = _SQRT2 * cmath.exp(0.75j * math.pi) * self.A0 \
                * weber_U_scaled(a - 1.0, y)
        elif sector == -1:
            p11 = self.bB0 * weber_U_scaled(-a, 1j * y)
            p12 = self.beta * self.A1 * weber_U_scaled(a, -y)
            p21 = _SQRT2 * cmath.exp(0.25j * math.pi) * self.cB0 \
                * weber_U_scaled(1.0 - a, 1j * y)
            p22 = _SQRT2 * cmath.exp(-0.25j * math.pi) * self.A1 \
                * weber_U_scaled(a - 1.0, -y)
        elif sector == 2:
            p11 = self.bB1 * weber_U_scaled(-a, -1j * y)
            p12 = self.beta * fac * self.A1 * weber_U_scaled(a, -y)
            p21 = _SQRT2 * cmath.exp(-0.75j * math.pi) * self.cB1 \
                * weber_U_scaled(1.0 - a, -1j * y)
            p22 = _SQRT2 * cmath.exp(-0.25j * math.pi) * fac * self.A1 \
                * weber_U_scaled(a - 1.0, -y)
        elif sector == -2:
            p11 = fac * self.bB1 * weber_U_scaled(-a, -1j * y)
            p12 = self.beta * self.A1 * weber_U_scaled(a, -y)
            p21 = _SQRT2 * cmath.exp(-0.75j * math.pi) * fac * self.cB1 \
                * weber_U_scaled(1.0 - a, -1j * y)
            p22 = _SQRT2 * cmath.exp(-0.25j * math.pi) * self.A1 \
                * weber_U_scaled(a - 1.0, -y)
        else:
            raise InvalidInputError(f"unknown sector {sector}",
                                    module="pc_parametrix", operation="matrix")
        out = np.empty(z.shape + (2, 2), dtype=complex)
        out[..., 0, 0], out[..., 0, 1] = p11, p12
        out[..., 1, 0], out[..., 1, 1] = p21, p22
        return out

    def w_pair(self, omega: int, zeta) -> tuple[np.ndarray, np.ndarray]:
        """The recessive-column factors (u1, u2) entering W in sector omega.

        With s = {1: +1, 3: -1, 4: -1, 6: +1}, the conjugated nilpotent is
        W = s * dbar(E_omega) * [[-u1 u2, u1^2], [-u2^2, u1 u2]]; all
        exponentials cancel algebraically, so u1, u2 are plain U-values.
        """
        z = np.asarray(zeta, dtype=complex)
        y = _ROT * z
        a = self.a
        if omega == 1:      # parametrix sector 0, column 2
            u1 = self.beta * self.A0 * weber_U(a, y)
            u2 = _SQRT2 * cmath.exp(0.75j * math.pi) * self.A0 * weber_U(a - 1.0, y)
        elif omega == 6:    # sector 0, column 1
            u1 = self.bB0 * weber_U(-a, 1j * y)
            u2 = _SQRT2 * cmath.exp(0.25j * math.pi) * self.cB0 * weber_U(1.0 - a, 1j * y)
        elif omega == 3:    # sector 2, column 1
            u1 = self.bB1 * weber_U(-a, -1j * y)
            u2 = _SQRT2 * cmath.exp(-0.75j * math.pi) * self.cB1 * weber_U(1.0 - a, -1j * y)
        elif omega == 4:    # sector -2, column 2
            u1 = self.beta * self.A1 * weber_U(a, -y)
            u2 = _SQRT2 * cmath.exp(-0.25j * math.pi) * self.A1 * weber_U(a - 1.0, -y)
        else:
            raise InvalidInputError(f"W vanishes on sector {omega}",
                                    module="pc_parametrix", operation="w_pair")
        return u1, u2


def classify_sector(zeta: complex, tol: float = 1e-13) -> int:
    """Sector index of zeta; raises if zeta lies on a ray of the contour."""
    ang = cmath.phase(complex(zeta))
    for idx, ray in RAY_ANGLES.items():
        if abs(ang - ray) < tol or (idx == 3 and abs(ang + math.pi) < tol):
            raise InvalidInputError(
                f"zeta={zeta} lies on ray {idx}; pass an explicit sector",
                module="pc_parametrix", operation="parametrix_P",
            )
    if abs(ang) < 0.25 * math.pi:
        return 0
    if 0.25 * math.pi < ang < 0.75 * math.pi:
        return 1
    if ang > 0.75 * math.pi:
        return 2
    if -0.75 * math.pi < ang < -0.25 * math.pi:
        return -1
    return -2


def parametrix_P(zeta, m: float, sector: int | None = None) -> np.ndarray:
    """P(zeta; m) with unit determinant; sector-appropriate Weber formula.

    ``sector`` selects the boundary-value formula when zeta sits on one of
    the five contour rays (mandatory there, optional elsewhere).
    """
    sol = PCSolution.for_modulus(float(m))
    if sector is None:
        z = np.asarray(zeta, dtype=complex)
        if z.ndim == 0:
            return sol.matrix(zeta, classify_sector(complex(zeta)))
        out = np.empty(z.shape + (2, 2), dtype=complex)
        flat = z.reshape(-1)
        res = out.reshape(-1, 2, 2)
        sectors = np.array([classify_sector(w) for w in flat])
        for s in np.unique(sectors):
            msk = sectors == s
            res[msk] = sol.matrix(flat[msk], int(s))
        return out
    return sol.matrix(zeta, sector)


def jump_matrix(ray_index: int, zeta, m: float) -> np.ndarray:
    """Jump V_P on the given ray, evaluated at on-ray points zeta."""
    z = np.asarray(zeta, dtype=complex)
    one = np.ones_like(z)
    zero = np.zeros_like(z)
    fac = 1.0 / (1.0 - m * m)
    if ray_index == 1:
        rows = [[one, zero], [m * np.exp(1j * z * z), one]]
    elif ray_index == 2:
        rows = [[one, -m * fac * np.exp(-1j * z * z)], [zero, one]]
    elif ray_index == 3:
        rows = [[(1.0 - m * m) * one, zero], [zero, fac * one]]
    elif ray_index == 4:
        rows = [[one, zero], [m * fac * np.exp(1j * z * z), one]]
    elif ray_index == 5:
        rows = [[one, -m * np.exp(-1j * z * z)], [zero, one]]
    else:
        raise InvalidInputError(f"ray index must be 1..5, got {ray_index}",
                                module="pc_parametrix", operation="jump_matrix")
    out = np.empty(z.shape + (2, 2), dtype=complex)
    for i in range(2):
        for j in range(2):
            out[..., i, j] = rows[i][j]
    return out


def spectral_norm_2x2(mat: np.ndarray) -> np.ndarray:
    """Largest singular value of a (stack of) 2x2 matrices, closed form."""
    fro2 = np.sum(np.abs(mat) ** 2, axis=(-2, -1))
    det = mat[..., 0, 0] * mat[..., 1, 1] - mat[..., 0, 1] * mat[..., 1, 0]
    gap = np.sqrt(np.maximum(fro2 * fro2 - 4.0 * np.abs(det) ** 2, 0.0))
    return np.sqrt(0.5 * (fro2 + gap))


def jump_residual(ray_index: int, radius: float, m: float) -> float:
    """|| P_+ - P_- V_P ||_2 at |zeta| = radius on the given ray."""
    if radius <= 0.0:
        raise InvalidInputError("radius must be positive",
                                module="pc_parametrix", operation="jump_residual")
    if ray_index not in RAY_ANGLES:
        raise InvalidInputError(f"ray index must be 1..5, got {ray_index}",
                                module="pc_parametrix", operation="jump_residual")
    zeta = radius * cmath.exp(1j * RAY_ANGLES[ray_index])
    plus, minus = RAY_SIDES[ray_index]
    sol = PCSolution.for_modulus(float(m))
    p_plus = sol.matrix(zeta, plus)
    p_minus = sol.matrix(zeta, minus)
    v = jump_matrix(ray_index, zeta, m)
    return float(spectral_norm_2x2(p_plus - p_minus @ v))


def P1(m: float) -> np.ndarray:
    """Residue coefficient of the large-zeta normalization, off-diagonal part.

    Only the off-diagonal entries are determined here (P1_12 = beta/(2i) and
    its conjugate); the diagonal is not modeled and is returned as NaN.
    """
    b = beta(m)
    out = np.full((2, 2), complex(np.nan, np.nan))
    out[0, 1] = b / 2j
    out[1, 0] = np.conj(b / 2j)
    return out
