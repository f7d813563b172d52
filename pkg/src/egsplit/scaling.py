"""Scaling-based singular order estimates and cutoff scans of contraction integrals."""

from dataclasses import dataclass
import warnings

import numpy as np
from scipy import integrate, special

KMAX = 6.0
SIGMA_RANGE = 40.0


@dataclass(frozen=True)
class OrderEstimate:
    omega: float
    error: float
    lambdas: tuple
    values: tuple


def _default_probe(k):
    k0, r = k
    return np.exp(-(k0 * k0 + r * r)) * (1.0 + k0)


def _gauss(n, a, b):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (b - a) * x + 0.5 * (b + a), 0.5 * (b - a) * w


def scaled_pairing(d, lam, probe=_default_probe, threshold=0.0, nodes=64):
    """<d, phi(./lam)> for a rotation-invariant d supported in p^2 > threshold.

    Written as lam^4 times an integral over k = p/lam in the variables
    sigma = k.k and r = |k|, with sigma - threshold/lam^2 = U w^2 so that
    square-root thresholds become smooth.  Both cones are summed.
    """
    c = threshold / lam**2
    w_nodes, w_weights = _gauss(nodes, 0.0, 1.0)
    r_nodes, r_weights = _gauss(nodes, 0.0, KMAX)
    total = 0j
    for w, ww in zip(w_nodes, w_weights):
        sigma = c + SIGMA_RANGE * w * w
        jac = 2 * SIGMA_RANGE * w
        for r, wr in zip(r_nodes, r_weights):
            e = np.sqrt(sigma + r * r)
            # dk0 = dsigma / (2 |k0|)
            weight = ww * wr * jac * r * r / (2 * e)
            for k0 in (e, -e):
                phi = probe((k0, r))
                if phi != 0.0:
                    total += weight * d(np.array([lam * k0, lam * r, 0.0, 0.0])) * phi
    return 4 * np.pi * lam**4 * total


def singular_order_estimate(d, lambdas=None, probe=_default_probe):
    """Least-squares slope of log|<d, S_{1/lam} phi>| against log lam, minus 4."""
    thr = d.threshold or 0.0
    scale = np.sqrt(thr) if thr > 0 else 1.0
    if lambdas is None:
        lambdas = scale * np.array([16.0, 32.0, 64.0, 128.0, 256.0])
    lambdas = np.asarray(lambdas, dtype=float)
    values = np.array([abs(scaled_pairing(d, lam, probe, thr)) for lam in lambdas])
    if np.any(values == 0):
        raise ValueError("probe pairs to zero; choose a probe without the symmetry of d")
    x, y = np.log(lambdas), np.log(values)
    coef, cov = np.polyfit(x, y, 1, cov=True) if len(x) > 2 else (np.polyfit(x, y, 1), np.zeros((2, 2)))
    slope = coef[0]
    residual = y - np.polyval(coef, x)
    error = float(np.sqrt(cov[0, 0])) if len(x) > 2 else 0.0
    # drift of the local slope measures how far from the asymptotic regime we are
    local = np.diff(y) / np.diff(x)
    error = max(error, float(np.max(np.abs(local - slope))), float(np.max(np.abs(residual))))
    return OrderEstimate(float(slope - 4.0), error, tuple(lambdas), tuple(values))


# -- cutoff scans ----------------------------------------------------------------------

def kernel_product(p, sing_index=-0.5):
    """u(p) v(p) for massless plane-wave kernels, ~ |p|^(2s)."""
    return (2 * np.pi) ** -3 * (2.0 * p) ** (2 * sing_index)


def pv_gaussian(a, width=2.0):
    """PV int exp(-width (x - a)^2) / x dx."""
    return 2 * np.sqrt(np.pi) * special.dawsn(np.sqrt(width) * a)


def _q1_integrand(p, sing_index):
    K = kernel_product(p, sing_index)
    return 4 * np.pi * p * p * K * (1j * np.exp(-2 * p * p) * pv_gaussian(p) + np.pi * np.exp(-4 * p * p))


def _q2_integrand(a, b, sing_indices):
    E = a + b
    K = kernel_product(a, sing_indices[0]) * kernel_product(b, sing_indices[1])
    angular = (np.exp(-2 * (a - b) ** 2) - np.exp(-2 * E * E)) / 4.0
    return 8 * np.pi**2 * a * b * K * angular * (1j * pv_gaussian(E) + np.pi * np.exp(-2 * E * E))


def _indices(q, sing_index):
    if np.ndim(sing_index) == 0:
        return (float(sing_index),) * q
    out = tuple(float(s) for s in sing_index)
    if len(out) != q:
        raise ValueError("need one singularity index per contracted pair")
    return out


def contraction_cutoff_scan(q, cutoff, sing_index=0.0):
    """theta-multiplied q-contraction of Gaussian test functions, momenta cut at |p| < cutoff.

    ``sing_index`` is one value for all pairs or one per pair; 0 is a fermion
    pair, -1/2 a scalar or photon pair.  Both test functions are
    exp(-|p|^2 - p0^2).  The p0 integral is the
    regularised (principal-value) integral of i/p0, done in closed form with
    the Dawson function; angles are integrated analytically.
    """
    if cutoff <= 0:
        raise ValueError("cutoff must be positive")
    idx = _indices(q, sing_index) if q in (1, 2) else None
    opts = dict(epsabs=1e-14, epsrel=1e-10, limit=400)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        if q == 1:
            re = integrate.quad(lambda p: _q1_integrand(p, idx[0]).real, 0, cutoff, **opts)[0]
            im = integrate.quad(lambda p: _q1_integrand(p, idx[0]).imag, 0, cutoff, **opts)[0]
            return re + 1j * im
        if q == 2:
            return _q2_scan(cutoff, idx, opts)
    raise ValueError("only q = 1 and q = 2 are supported")


def _q2_scan(cutoff, sing_indices, opts):
    # w = a + b, u = a - b; the integrand is concentrated near u = 0
    def inner(w, part):
        half = min(w, 2 * cutoff - w)
        band = min(half, 6.0)
        f = lambda u: getattr(_q2_integrand((w + u) / 2, (w - u) / 2, sing_indices), part) / 2
        return 2 * integrate.quad(f, 0.0, band, **opts)[0]

    edges = [0.0] + [x for x in (1.0, 4.0, 16.0, 64.0, 256.0) if x < 2 * cutoff] + [2 * cutoff]
    total = 0j
    for a, b in zip(edges[:-1], edges[1:]):
        total += integrate.quad(lambda w: inner(w, "real"), a, b, **opts)[0]
        total += 1j * integrate.quad(lambda w: inner(w, "imag"), a, b, **opts)[0]
    return total


def growth_exponent(q, cutoffs, sing_index=0.0):
    """Fit |F(L)| ~ L^k over the largest cutoffs."""
    vals = np.array([abs(contraction_cutoff_scan(q, L, sing_index)) for L in cutoffs])
    return float(np.polyfit(np.log(cutoffs), np.log(vals), 1)[0]), vals
