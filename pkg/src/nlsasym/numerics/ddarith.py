"""Double-double helpers for cancellation-heavy series summation.

A value is carried as an unevaluated sum ``hi + lo`` of two doubles with
``|lo| <= ulp(hi)/2``, giving roughly 31 significant digits.  Only the
operations needed to run a hypergeometric-type term recurrence are
implemented.  Everything works elementwise on numpy arrays, so a whole
batch of series can be advanced one term at a time.

Real values are ``(hi, lo)`` pairs; complex values are
``(re_hi, re_lo, im_hi, im_lo)`` quadruples.
"""

from __future__ import annotations

import numpy as np

_SPLITTER = 134217729.0  # 2**27 + 1, Veltkamp splitting constant


def two_sum(a, b):
    """Exact sum: returns (s, e) with s + e == a + b, s = fl(a + b)."""
    s = a + b
    bb = s - a
    e = (a - (s - bb)) + (b - bb)
    return s, e


def fast_two_sum(a, b):
    """Exact sum assuming |a| >= |b|."""
    s = a + b
    e = b - (s - a)
    return s, e


def two_prod(a, b):
    """Exact product: returns (p, e) with p + e == a * b, p = fl(a * b)."""
    p = a * b
    ca = _SPLITTER * a
    a_hi = ca - (ca - a)
    a_lo = a - a_hi
    cb = _SPLITTER * b
    b_hi = cb - (cb - b)
    b_lo = b - b_hi
    e = ((a_hi * b_hi - p) + a_hi * b_lo + a_lo * b_hi) + a_lo * b_lo
    return p, e


# -- real double-double ------------------------------------------------------

def dd(a, b=0.0):
    return np.asarray(a, dtype=float), np.asarray(b, dtype=float)


def dd_add(x, y):
    s, e = two_sum(x[0], y[0])
    e = e + x[1] + y[1]
    return fast_two_sum(s, e)


def dd_sub(x, y):
    return dd_add(x, (-y[0], -y[1]))


def dd_mul(x, y):
    p, e = two_prod(x[0], y[0])
    e = e + x[0] * y[1] + x[1] * y[0]
    return fast_two_sum(p, e)


def dd_div(x, y):
    # Two refinement steps; accurate to ~1 ulp of double-double.
    q1 = x[0] / y[0]
    r = dd_add(x, dd_neg(dd_mul(y, dd(q1))))
    q2 = r[0] / y[0]
    r = dd_add(r, dd_neg(dd_mul(y, dd(q2))))
    q3 = r[0] / y[0]
    s, e = two_sum(q1, q2)
    e = e + q3
    return fast_two_sum(s, e)


def dd_neg(x):
    return -x[0], -x[1]


def dd_to_float(x):
    return x[0] + x[1]


# -- complex double-double ---------------------------------------------------

def cdd(z):
    """Lift complex array/scalar to an exact complex double-double."""
    z = np.asarray(z, dtype=complex)
    zero = np.zeros_like(z.real)
    return (z.real.astype(float), zero.copy(), z.imag.astype(float), zero.copy())


def cdd_parts(re_dd, im_dd):
    return (re_dd[0], re_dd[1], im_dd[0], im_dd[1])


def cdd_add(x, y):
    re = dd_add((x[0], x[1]), (y[0], y[1]))
    im = dd_add((x[2], x[3]), (y[2], y[3]))
    return cdd_parts(re, im)


def cdd_mul(x, y):
    xr, xi = (x[0], x[1]), (x[2], x[3])
    yr, yi = (y[0], y[1]), (y[2], y[3])
    re = dd_sub(dd_mul(xr, yr), dd_mul(xi, yi))
    im = dd_add(dd_mul(xr, yi), dd_mul(xi, yr))
    return cdd_parts(re, im)


def cdd_div_real(x, w):
    """Divide complex dd by real dd."""
    re = dd_div((x[0], x[1]), w)
    im = dd_div((x[2], x[3]), w)
    return cdd_parts(re, im)


def cdd_to_complex(x):
    return (x[0] + x[1]) + 1j * (x[2] + x[3])


def cdd_abs_hi(x):
    """Cheap magnitude estimate from the hi parts (for loop control only)."""
    return np.hypot(x[0], x[2])
