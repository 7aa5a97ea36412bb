"""The parabolic-cylinder function U(a, y) for complex parameter and argument.

Weber's equation u'' - (y^2/4 + a) u = 0 is solved by the recessive-at-
+infinity standard solution U(a, y).  Three representations are stitched
together:

* Maclaurin series through the even/odd solutions for |y| <= 8.5.  The two
  halves cancel like exp(|y|^2/2) near the anti-Stokes rays, which is past
  what double precision can absorb at this radius, so the series is summed
  in double-double arithmetic with the initial values U(a,0), U'(a,0)
  carried to ~40 digits.  When Re(y^2) < 0 both confluent series are
  Kummer-transformed first so their own terms stay same-signed.
* The divergent large-argument expansion for |y| > 8.5 within
  |arg y| <= 0.60*pi, truncated at its smallest term (error ~ exp(-|y|^2/2),
  far below double precision at this radius).  The 0.60*pi cap keeps the
  subdominant exponential that switches on past |arg y| = pi/2 under 1e-12.
* A connection identity expressing U(a, y) through U(a, -y) and
  U(-a, -+ i y) for the remaining directions; both components then fall in
  the validity cone of the expansion.

``weber_U_scaled`` returns exp(+y^2/4) * U(a, y) with the exponential
removed analytically; matrix assembly uses it so that no intermediate
quantity ever overflows, however large the rescaled spectral variable gets.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from ..errors import NlsasymError
from ..numerics import log_gamma
from ..numerics import ddarith as dd

_SERIES_RADIUS = 8.5
_ASYMPTOTIC_ARG = 0.60 * math.pi
_SERIES_MAX_TERMS = 500
_SQRT_2PI = math.sqrt(2.0 * math.pi)

_initial_value_cache: dict[complex, tuple] = {}


def _initial_values_dd(a: complex):
    """(U(a,0), U'(a,0)) as complex double-doubles, via 40-digit arithmetic.

    U(a,0)  =  sqrt(pi) 2^(-a/2-1/4) / Gamma(3/4 + a/2)
    U'(a,0) = -sqrt(pi) 2^(-a/2+1/4) / Gamma(1/4 + a/2)

    These multiply series halves of size exp(|y|^2/2) whose sum is O(1), so
    plain double precision here would poison the cancellation budget.
    """
    a = complex(a)
    cached = _initial_value_cache.get(a)
    if cached is not None:
        return cached
    import mpmath as mp

    with mp.workdps(45):
        am = mp.mpc(a)
        u0 = mp.sqrt(mp.pi) * mp.power(2, -am / 2 - mp.mpf(1) / 4) \
            * mp.rgamma(mp.mpf(3) / 4 + am / 2)
        u0p = -mp.sqrt(mp.pi) * mp.power(2, -am / 2 + mp.mpf(1) / 4) \
            * mp.rgamma(mp.mpf(1) / 4 + am / 2)
        vals = []
        for v in (u0, u0p):
            re_hi = float(v.real)
            re_lo = float(v.real - re_hi)
            im_hi = float(v.imag)
            im_lo = float(v.imag - im_hi)
            vals.append((re_hi, re_lo, im_hi, im_lo))
    _initial_value_cache[a] = (vals[0], vals[1])
    return vals[0], vals[1]


def _cdd_scalar_bcast(scalar_cdd, shape):
    return tuple(np.broadcast_to(np.asarray(c, dtype=float), shape).copy()
                 for c in scalar_cdd)


def _kummer_sum_dd(b: complex, c: float, x_cdd, shape) -> tuple:
    """sum_k (b)_k / ((c)_k k!) x^k in complex double-double, elementwise."""
    term = dd.cdd(np.ones(shape))
    total = dd.cdd(np.ones(shape))
    peak = np.ones(shape)
    zero = np.float64(0.0)
    for k in range(_SERIES_MAX_TERMS):
        # factor (b + k) as an exact complex dd (scalar, broadcast in the ops)
        br_hi, br_lo = dd.two_sum(np.float64(b.real), np.float64(k))
        bk = (br_hi, br_lo, np.float64(b.imag), zero)
        term = dd.cdd_mul(term, bk)
        term = dd.cdd_mul(term, x_cdd)
        ck_hi, ck_lo = dd.two_sum(np.float64(c), np.float64(k))
        div = dd.dd_mul((ck_hi, ck_lo), dd.dd(float(k + 1)))
        term = dd.cdd_div_real(term, div)
        total = dd.cdd_add(total, term)
        mag = dd.cdd_abs_hi(term)
        peak = np.maximum(peak, mag)
        if k % 4 == 3 and np.all(mag <= 1e-37 * peak):
            return total
    raise NlsasymError("Maclaurin series did not converge",
                       module="pc_parametrix", operation="weber_U")


def _kummer_sum_f64(b: complex, c: float, x: np.ndarray) -> np.ndarray:
    """Plain float64 Kummer sum, for arguments small enough that the
    series cancellation stays within double precision."""
    term = np.ones_like(x)
    total = np.ones_like(x)
    peak = np.ones(x.shape)
    for k in range(_SERIES_MAX_TERMS):
        term = term * ((b + k) / ((c + k) * (k + 1.0))) * x
        total = total + term
        mag = np.abs(term)
        np.maximum(peak, mag, out=peak)
        if k % 4 == 3 and np.all(mag <= 1e-20 * peak):
            return total
    raise NlsasymError("Maclaurin series did not converge",
                       module="pc_parametrix", operation="weber_U")


_FAST_RADIUS = 3.5  # below this the cancellation fits in plain float64


def _series_block(a: complex, y: np.ndarray, use_dd: bool) -> np.ndarray:
    """One homogeneous Maclaurin batch (shared magnitude class)."""
    u0, u0p = _initial_values_dd(a)
    out = np.empty(y.shape, dtype=complex)

    if use_dd:
        yr, yi = y.real.astype(float), y.imag.astype(float)
        prr = dd.two_prod(yr, yr)
        pii = dd.two_prod(yi, yi)
        pri = dd.two_prod(yr, yi)
        x_re = dd.dd_sub(prr, pii)
        x_im = dd.dd_add(pri, pri)
        x_re = (0.5 * x_re[0], 0.5 * x_re[1])
        x_im = (0.5 * x_im[0], 0.5 * x_im[1])
        plain = x_re[0] >= 0.0
    else:
        x_plain = 0.5 * y * y
        plain = x_plain.real >= 0.0

    for mask, transform in ((plain, False), (~plain, True)):
        if not np.any(mask):
            continue
        ys = y[mask]
        if transform:
            # Kummer: M(b, c, x) = e^x M(c - b, c, -x); used for Re x < 0 so
            # the transformed series has a non-negative-real argument.
            b1, b2 = 0.25 - a / 2.0, 0.75 - a / 2.0
        else:
            b1, b2 = 0.25 + a / 2.0, 0.75 + a / 2.0
        if use_dd:
            shape = (int(mask.sum()),)
            sgn = -1.0 if transform else 1.0
            xs = (sgn * x_re[0][mask], sgn * x_re[1][mask],
                  sgn * x_im[0][mask], sgn * x_im[1][mask])
            m1 = _kummer_sum_dd(b1, 0.5, xs, shape)
            m2 = _kummer_sum_dd(b2, 1.5, xs, shape)
            t1 = dd.cdd_mul(_cdd_scalar_bcast(u0, shape), m1)
            t2 = dd.cdd_mul(dd.cdd_mul(_cdd_scalar_bcast(u0p, shape), dd.cdd(ys)),
                            m2)
            bracket = dd.cdd_to_complex(dd.cdd_add(t1, t2))
        else:
            xv = x_plain[mask] * (-1.0 if transform else 1.0)
            u0c = (u0[0] + u0[1]) + 1j * (u0[2] + u0[3])
            u0pc = (u0p[0] + u0p[1]) + 1j * (u0p[2] + u0p[3])
            bracket = (u0c * _kummer_sum_f64(b1, 0.5, xv)
                       + u0pc * ys * _kummer_sum_f64(b2, 1.5, xv))
        if transform:
            # U = e^{+y^2/4} * bracket, so scaled value carries e^{y^2/2} (<= 1 here)
            out[mask] = bracket * np.exp(0.5 * ys * ys)
        else:
            out[mask] = bracket
    return out


def _series_scaled(a: complex, y: np.ndarray) -> np.ndarray:
    """exp(y^2/4) U(a,y) by the Maclaurin route, |y| <= series radius.

    The batch is split by magnitude: plain float64 below _FAST_RADIUS,
    double-double beyond (in two rings, so short series are not dragged
    through the longest one's term count).
    """
    out = np.empty(y.shape, dtype=complex)
    r = np.abs(y)
    rings = (r <= _FAST_RADIUS, (r > _FAST_RADIUS) & (r <= 6.5), r > 6.5)
    for ring, use_dd in zip(rings, (False, True, True)):
        if np.any(ring):
            out[ring] = _series_block(a, y[ring], use_dd)
    return out


def _asymptotic_scaled(a: complex, y: np.ndarray) -> np.ndarray:
    """exp(y^2/4) U(a,y) ~ y^(-a-1/2) * sum, truncated at the smallest term."""
    inv2y2 = 1.0 / (2.0 * y * y)
    term = np.ones_like(y)
    total = np.ones_like(y)
    active = np.ones(y.shape, dtype=bool)
    last = np.full(y.shape, np.inf)
    for k in range(60):
        factor = -(0.5 + a + 2 * k) * (1.5 + a + 2 * k) / (k + 1.0) * inv2y2
        term = term * factor
        mag = np.abs(term)
        growing = mag >= last
        active &= ~growing
        total = np.where(active, total + term, total)
        last = mag
        if np.all(~active | (mag <= 1e-18 * np.abs(total))):
            break
    return np.exp((-a - 0.5) * np.log(y)) * total


def _connection_pieces(a: complex, upper: bool):
    """Coefficients (A, B) with U(a,y) = A U(a,-y) + B U(-a, -+iy).

    ``upper`` selects the variant whose second component is U(-a, -iy)
    (stable for arg y near +pi); the conjugate-symmetric variant pairs with
    U(-a, +iy).
    """
    g = cmath.exp(-log_gamma(0.5 + a)) * _SQRT_2PI
    if upper:
        return cmath.exp(-1j * math.pi * (0.5 + a)), g * cmath.exp(1j * math.pi * (0.25 - a / 2.0))
    return cmath.exp(1j * math.pi * (0.5 + a)), g * cmath.exp(-1j * math.pi * (0.25 - a / 2.0))


def _eval_scaled(a: complex, y: np.ndarray) -> np.ndarray:
    out = np.empty(y.shape, dtype=complex)
    r = np.abs(y)
    ang = np.abs(np.angle(y))
    series = r <= _SERIES_RADIUS
    asym = ~series & (ang <= _ASYMPTOTIC_ARG)
    conn = ~series & ~asym
    if np.any(series):
        out[series] = _series_scaled(a, y[series])
    if np.any(asym):
        out[asym] = _asymptotic_scaled(a, y[asym])
    if np.any(conn):
        yc = y[conn]
        upper = np.angle(yc) > 0.0
        vals = np.empty(yc.shape, dtype=complex)
        for flag in (True, False):
            m = upper == flag
            if not np.any(m):
                continue
            A, B = _connection_pieces(a, flag)
            comp = -1j * yc[m] if flag else 1j * yc[m]
            # scaled pieces: e^{y^2/4} U(a,-y) = Uhat(a,-y),
            # e^{y^2/4} U(-a,-+iy) = e^{y^2/2} Uhat(-a,-+iy)
            vals[m] = (A * _eval_scaled(a, -yc[m])
                       + B * np.exp(0.5 * yc[m] * yc[m]) * _eval_scaled(-a, comp))
        out[conn] = vals
    return out


def _eval_scaled_fast(a: complex, y: np.ndarray) -> np.ndarray:
    """Quadrature-grade variant of _eval_scaled (~1e-8 relative): the
    asymptotic series takes over at |y| = 6.8 and the float64 Maclaurin
    ring is widened, which shortens the double-double loops considerably."""
    out = np.empty(y.shape, dtype=complex)
    r = np.abs(y)
    ang = np.abs(np.angle(y))
    series = r <= 6.3
    asym = ~series & (ang <= _ASYMPTOTIC_ARG)
    conn = ~series & ~asym
    fast = series & (r <= 4.8)
    if np.any(fast):
        out[fast] = _series_block(a, y[fast], use_dd=False)
    ring = series & ~fast
    if np.any(ring):
        out[ring] = _series_block(a, y[ring], use_dd=True)
    if np.any(asym):
        out[asym] = _asymptotic_scaled(a, y[asym])
    if np.any(conn):
        out[conn] = _eval_scaled(a, y[conn])  # rare: fall back to full path
    return out


def weber_U_scaled(a: complex, y, fast: bool = False) -> np.ndarray | complex:
    """exp(+y^2/4) * U(a, y), elementwise over y.

    ``fast=True`` trades the last ~5 digits for speed; meant for quadrature
    integrands, not for direct special-function queries.
    """
    a = complex(a)
    arr = np.asarray(y, dtype=complex)
    scalar = arr.ndim == 0
    evaluate = _eval_scaled_fast if fast else _eval_scaled
    vals = evaluate(a, arr.reshape(-1)).reshape(arr.shape)
    return complex(vals) if scalar else vals


def weber_U(a: complex, y) -> np.ndarray | complex:
    """The standard parabolic-cylinder function U(a, y), elementwise over y.

    Entire in y.  May overflow for |y| large with Re(y^2) strongly negative,
    where U itself exceeds double-precision range; the scaled variant is the
    right tool there.
    """
    a = complex(a)
    arr = np.asarray(y, dtype=complex)
    scalar = arr.ndim == 0
    flat = arr.reshape(-1)
    vals = np.exp(-0.25 * flat * flat) * _eval_scaled(a, flat)
    vals = vals.reshape(arr.shape)
    return complex(vals) if scalar else vals
