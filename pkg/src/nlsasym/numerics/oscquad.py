"""Iterated quadrature for damped oscillatory integrals over eighth-plane sectors.

Every two-dimensional integral in this package has the same anatomy: over a
sector bounded by a real-axis ray and a diagonal ray at 45 degrees from it,

    S = Int Int  G(z) * exp(s * i * zeta^2) dA,   zeta = 2 sqrt(t) (z - z0),

with G slowly varying (it carries reflection data, conjugation factors, and
de-oscillated parabolic-cylinder values).  In sector coordinates
z = z0 + tau * e_r + sigma * e_d the exponent splits exactly into

    4 s i t tau^2     purely oscillatory along the undamped real edge,
    8 t mu tau sigma  with Re mu = -sqrt(2)/2: cross damping,
    -4 t sigma^2      Gaussian damping off the edge,

so the inner sigma integral is evaluated by graded Gauss panels under an
adaptive cutoff, and the outer tau integral by a Filon rule: on each panel
the smooth factor (including the small quadratic phase remainder
exp(i*beta*u^2), kept at beta <= 2 by panel sizing) is interpolated in a
polynomial basis and integrated against exp(i*alpha*u) using closed-form
moments.  Panel sizes are therefore set by the envelope rather than by the
oscillation, which is what keeps the large-t ladder affordable.
"""

from __future__ import annotations

import math

import numpy as np
from numpy.polynomial.legendre import leggauss

from ..errors import InvalidInputError

_N_FILON = 8  # interpolation nodes per tau panel

_gauss_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gauss(n):
    if n not in _gauss_cache:
        _gauss_cache[n] = leggauss(n)
    return _gauss_cache[n]


_FILON_U, _FILON_W = _gauss(_N_FILON)
_FILON_VINV = np.linalg.inv(np.vander(_FILON_U, _N_FILON, increasing=True))


def filon_moments(alpha, kmax: int) -> np.ndarray:
    """mu_k(alpha) = Int_{-1}^{1} u^k e^{i alpha u} du for k = 0..kmax.

    Power series for small |alpha|; boundary-term recurrence otherwise (it
    divides by i*alpha each step, benign once |alpha| >~ kmax/2).
    """
    alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
    out = np.zeros((kmax + 1, alpha.size), dtype=complex)
    small = np.abs(alpha) < max(4.0, 0.5 * kmax)
    if np.any(small):
        ia = 1j * alpha[small]
        for k in range(kmax + 1):
            acc = np.zeros_like(ia)
            pw = np.ones_like(ia)
            for m in range(80):
                acc = acc + pw * ((1 + (-1) ** (k + m)) / (k + m + 1.0))
                pw = pw * ia / (m + 1.0)
                if np.all(np.abs(pw) < 1e-18):
                    break
            out[k, small] = acc
    big = ~small
    if np.any(big):
        ia = 1j * alpha[big]
        ep, em = np.exp(ia), np.exp(-ia)
        mu = (ep - em) / ia
        out[0, big] = mu
        for k in range(1, kmax + 1):
            mu = ((ep - (-1) ** k * em) - k * mu) / ia
            out[k, big] = mu
    return out


def _unit_sigma_rule(n_gauss: int, w_max: float = 30.0):
    """Graded Gauss rule on [0, w_max] for unit-rate exponential decay.

    Panels shrink geometrically toward 0 to absorb the mild vertex
    singularity of the integrands fed through here.
    """
    edges = np.array([0.0, 0.02, 0.12, 0.7, 4.0, w_max])
    x, w = _gauss(n_gauss)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _tau_edges(t: float, tau_max: float, beta_max: float, h_cap: float):
    """Graded vertex panels, then envelope/phase-limited strip panels."""
    h_beta = math.sqrt(beta_max / (4.0 * t))
    delta0 = min(0.75 / math.sqrt(t), 0.25 * tau_max)
    edges = [0.0] + [delta0 / 4.0 ** k for k in range(6, 0, -1)] + [delta0]
    h = max(delta0, 1e-3)
    while edges[-1] < tau_max:
        h = min(1.35 * h, h_beta, h_cap)
        edges.append(min(edges[-1] + h, tau_max))
    return np.asarray(edges)


def damped_sector_integral(
    G,
    z0: float,
    t: float,
    e_r: float,
    e_d: complex,
    osc_sign: int,
    tau_max: float,
    sigma_gauss: int = 5,
    beta_max: float = 2.0,
    h_cap: float = 0.2,
    abs_mode: bool = False,
):
    """Integral of G(z) * exp(osc_sign * i * zeta^2) over the sector.

    ``G`` maps an ndarray of complex points to values; ``abs_mode``
    integrates |G| * |exp(...)| instead (the tau oscillation then has unit
    modulus and plain Gauss weights suffice).  The requested combination
    must be damped: Re(osc_sign * i * e_d^2) = -1.
    """
    if abs(osc_sign * 1j * e_d * e_d + 1.0) > 1e-12:
        raise InvalidInputError(
            "sector/diagonal/sign combination is not damped",
            module="numerics", operation="damped_sector_integral")
    mu = osc_sign * 1j * e_r * e_d
    c = 4.0 * t * osc_sign
    jac = math.sqrt(0.5)

    edges = _tau_edges(t, tau_max, beta_max, h_cap)
    mids = 0.5 * (edges[1:] + edges[:-1])
    halfs = 0.5 * np.diff(edges)

    tau = mids[:, None] + halfs[:, None] * _FILON_U[None, :]       # (P, 8)
    # per-node sigma scale covering both the Gaussian and the cross damping
    s_star = 1.0 / (5.6568 * t * tau + 2.0 * math.sqrt(t))

    s_nodes, s_weights = _unit_sigma_rule(sigma_gauss)
    sigma = s_star[..., None] * s_nodes                             # (P, 8, S)
    weights = s_star[..., None] * s_weights

    zz = z0 + tau[..., None] * e_r + sigma * e_d
    vals = np.asarray(G(zz.ravel())).reshape(zz.shape)
    expo = 8.0 * t * mu * tau[..., None] * sigma - 4.0 * t * sigma * sigma
    if abs_mode:
        h_vals = np.sum(weights * np.abs(vals) * np.exp(expo.real), axis=-1)
        return jac * float(np.sum((halfs[:, None] * _FILON_W[None, :]) * h_vals))

    h_vals = np.sum(weights * vals * np.exp(expo), axis=-1)         # (P, 8)
    alphas = 2.0 * c * mids * halfs
    betas = c * halfs * halfs
    phi = h_vals * np.exp(1j * betas[:, None] * _FILON_U[None, :] ** 2)
    coeff = phi @ _FILON_VINV.T
    mom = filon_moments(alphas, _N_FILON - 1)                       # (8, P)
    panel_vals = halfs * np.exp(1j * c * mids * mids) * np.sum(coeff * mom.T, axis=1)
    return jac * complex(np.sum(panel_vals))
