"""Second-order spinor QED: the S2 term table and the split one-loop kernels."""

from dataclasses import dataclass
from functools import lru_cache
import warnings

import numpy as np
import sympy
from scipy import integrate

from .dirac import METRIC, as_vector, identity4, lorentz_square, slash
from .dirac import gamma0
from .propagators import SingularMomentumError, ft_C2, ft_C3_bracket, ft_K2, transverse_projector
from .splitter import DEFAULT_QUADRATURE, ScalarDistribution, cone_distribution, ret_causal
from .testfunctions import multi_indices
from .wick import enumerate_contractions, qed_vertex

S = sympy.Symbol("s", positive=True)
K2_CONSTANT = 1.0 / (32 * np.pi**3)

# ret d - (backward-cone part of d) reproduces the closed forms with these factors
PI_NORMALIZATION = -2j * np.pi / 3
SIGMA_NORMALIZATION = 1j


class BranchWarning(UserWarning):
    pass


def _p2(p):
    p = as_vector(p)
    s = lorentz_square(p)
    if s == 0.0:
        raise SingularMomentumError("p.p = 0 is singular for the one-loop kernels")
    return p, s


# -- scalar distributions ------------------------------------------------------------

def vp_spectral(s, m):
    """(s + 2m^2) sqrt(1 - 4m^2/s) above threshold."""
    s = np.asarray(s, dtype=float)
    inside = s > 4 * m * m
    safe = np.where(inside, s, 8 * m * m)
    return np.where(inside, (safe + 2 * m * m) * np.sqrt(1 - 4 * m * m / safe), 0.0)


@lru_cache(maxsize=None)
def vacuum_polarization_f(m=1.0):
    """f(p) = g(p) - g(-p): causal, odd, omega = 2."""
    expr = (S + 2 * m * m) * sympy.sqrt(1 - 4 * m * m / S)
    return cone_distribution("f", expr, S, 4 * m * m, 1, -1, 2, mass_params=(m,))


@lru_cache(maxsize=None)
def vacuum_polarization_g(m=1.0):
    """The single forward-cone piece g; not causal on its own."""
    expr = (S + 2 * m * m) * sympy.sqrt(1 - 4 * m * m / S)
    return cone_distribution("g", expr, S, 4 * m * m, 1, 0, 2, causal=False, mass_params=(m,))


@lru_cache(maxsize=None)
def self_energy_parts(m=1.0):
    """Causal Sigma distribution -sign(p0) Khat(p) as (scalar part, pslash coefficient).

    The pslash coefficient carries one power of p, so it is split with omega - 1 = 0.
    """
    c = K2_CONSTANT
    scalar = cone_distribution("sigma_1", 4 * m * c * (1 - m * m / S), S, m * m, -1, 1, 1, mass_params=(m,))
    vector = cone_distribution("sigma_pslash", c * (1 - m**4 / S**2), S, m * m, 1, -1, 0, mass_params=(m,))
    return scalar, vector


def c2_scalar(m=1.0):
    """g_mu_nu C2^{mu nu}(p): the Lorentz-scalar content of the fermion loop, omega = 2."""
    return ScalarDistribution("C2_scalar", lambda p: float(np.sum(METRIC * ft_C2(p, m))), 2, False,
                              (m,), support_threshold=4 * m * m)


def k2_scalar(m=1.0):
    """(1/4) Tr[gamma^0 K2(p)], linear in p at large momentum, omega = 1."""
    return ScalarDistribution("K2_scalar", lambda p: np.trace(gamma0 @ ft_K2(p, m)).real / 4, 1, False,
                              (m,), support_threshold=m * m)


def k2_hat(p, m):
    """K2 without its theta(-p0): c (1 - m^2/p^2) [4m - pslash (1 + m^2/p^2)]."""
    p, s = _p2(p)
    if s <= m * m:
        return np.zeros((4, 4), dtype=complex)
    return K2_CONSTANT * (1 - m * m / s) * (4 * m * identity4 - slash(p) * (1 + m * m / s))


def time_ordered(d, p, cfg=DEFAULT_QUADRATURE):
    """ret d - R', where R' is the part of d on the backward cone."""
    p = as_vector(p)
    value = ret_causal(d, p, cfg)
    if p[0] < 0:
        value = value - d(p)
    return value


# -- closed forms ----------------------------------------------------------------------

def _pv_dispersion(s, m, cfg=DEFAULT_QUADRATURE):
    """PV int_{4m^2}^inf G(u) / (u^2 (s - u)) du."""
    thr = 4 * m * m
    g = lambda u: vp_spectral(u, m) / u**2
    opts = dict(epsabs=cfg.epsabs, epsrel=cfg.epsrel, limit=cfg.limit)
    if s <= thr:
        return integrate.quad(lambda u: g(u) / (s - u), thr, np.inf, **opts)
    mid = 2 * s
    a, ea = integrate.quad(g, thr, mid, weight="cauchy", wvar=s, **opts)
    b, eb = integrate.quad(lambda u: g(u) / (u - s), mid, np.inf, **opts)
    return -(a + b), ea + eb


def pi_scalar(p, m=1.0, cfg=DEFAULT_QUADRATURE, return_error=False):
    """Pi(p) = (1/3) p^4 int G(u) / (u^2 (p^2 - u + i0)) du, by PV plus delta residue."""
    _, s = _p2(p)
    if m <= 0:
        raise ValueError("m must be positive")
    pv, err = _pv_dispersion(s, m, cfg)
    value = s * s / 3 * pv - 1j * np.pi / 3 * vp_spectral(s, m)
    err = s * s / 3 * err
    if abs(s - 4 * m * m) < cfg.threshold_delta * 4 * m * m:
        err = max(err, 1e-3 * abs(value))
    return (complex(value), err) if return_error else complex(value)


def pi_tilde(p, m=1.0, e2=1.0, cfg=DEFAULT_QUADRATURE):
    """(2pi)^-4 (p_mu p_nu / p^2 - g_mu_nu) Pi(p), lower indices."""
    p, _ = _p2(p)
    return e2 * (2 * np.pi) ** -4 * transverse_projector(p, lower_indices=True) * pi_scalar(p, m, cfg)


def sigma_tilde(p, m=1.0, e2=1.0):
    p, s = _p2(p)
    ps = slash(p)
    one = identity4
    out = m * m / s * ps / 4 - m / 4 * one + (ps - m * one) / 8
    if s != m * m:
        log = np.log(abs(1 - s / (m * m))) - 1j * np.pi * (s > m * m)
        out = out + (1 - m * m / s) * log * (m * one - ps / 4 * (1 + m * m / s))
    return e2 * (2 * np.pi) ** -4 * out


def upsilon_second(p, m=1.0):
    """The i(2pi)^-6 term; principal branches throughout."""
    _, s = _p2(p)
    if 0 < s < 4 * m * m:
        warnings.warn("Upsilon'' is branch-ambiguous for 0 < p^2 < 4m^2; principal branch used",
                      BranchWarning, stacklevel=2)
    z = complex(s)
    x = z / (4 * m * m)
    log1 = np.log(np.sqrt(-x) + np.sqrt(1 - x))
    root = np.sqrt(1 - 4 * m * m / z)
    log2 = np.log((root - 1) / (root + 1))
    poly = 5 * z * z / (48 * m**4) + 2 * z / (3 * m * m) + 1
    tail = (z * z / (24 * m**4) + z / (12 * m * m) + 1) * root * log2
    return 1j * (2 * np.pi) ** -6 * m**4 * (poly + (3 - 4 * m * m / z) * log1**2 + tail)


def upsilon_first(p, m=1.0):
    p, s = _p2(p)
    if s <= 4 * m * m or p[0] >= 0:
        return 0.0
    return (2 * np.pi) ** -5 * ft_C3_bracket(s, m)


def upsilon_tilde(p, m=1.0, e2=1.0):
    return e2 * (upsilon_second(p, m) - upsilon_first(p, m))


# -- dispersion routes -----------------------------------------------------------------

def pi_scalar_from_splitting(p, m=1.0, cfg=DEFAULT_QUADRATURE):
    return PI_NORMALIZATION * time_ordered(vacuum_polarization_f(m), p, cfg)


def vacuum_polarization_from_splitting(p, m=1.0, e2=1.0, cfg=DEFAULT_QUADRATURE):
    """Split d = T f with omega = 2, subtract R', same tensor layout as pi_tilde."""
    p, _ = _p2(p)
    return e2 * (2 * np.pi) ** -4 * transverse_projector(p, lower_indices=True) * pi_scalar_from_splitting(p, m, cfg)


def sigma_from_splitting(p, m=1.0, e2=1.0, cfg=DEFAULT_QUADRATURE):
    p, _ = _p2(p)
    scalar, vector = self_energy_parts(m)
    value = time_ordered(scalar, p, cfg) * identity4 + slash(p) * time_ordered(vector, p, cfg)
    return e2 * SIGMA_NORMALIZATION * value


# -- freedom polynomials -----------------------------------------------------------------

@dataclass(frozen=True)
class FreedomFit:
    """sum_{|a| <= degree} C_a p^a, matrix- or scalar-valued, fitted once and frozen."""

    degree: int
    monomials: tuple
    coefficients: np.ndarray
    shape: tuple
    n_points: int

    def __call__(self, p):
        p = as_vector(p)
        row = np.array([np.prod(p ** np.array(a)) for a in self.monomials])
        return (row @ self.coefficients).reshape(self.shape)

    def to_dict(self):
        return {
            "degree": self.degree,
            "monomials": [list(a) for a in self.monomials],
            "coefficients": [[[z.real, z.imag] for z in row] for row in np.atleast_2d(self.coefficients)],
            "n_points": self.n_points,
        }


def fit_freedom(points, target, model, degree):
    """Least-squares fit of target - model by a polynomial of the given degree."""
    if len(points) < 50:
        raise ValueError("freedom fits need at least 50 grid points")
    monomials = tuple(multi_indices(degree))
    rows, values = [], []
    shape = None
    for p in points:
        p = as_vector(p)
        diff = np.asarray(target(p) - model(p), dtype=complex)
        shape = diff.shape
        rows.append([np.prod(p ** np.array(a)) for a in monomials])
        values.append(diff.ravel())
    coef, *_ = np.linalg.lstsq(np.array(rows, dtype=complex), np.array(values), rcond=None)
    return FreedomFit(degree, monomials, coef, shape, len(points))


def random_momenta(rng, n, p2_range, spatial_scale=1.0, both_cones=True):
    """n momenta with p^2 uniform in p2_range (timelike or spacelike)."""
    lo, hi = p2_range
    out = []
    for _ in range(n):
        s = rng.uniform(lo, hi)
        vec = rng.normal(size=3) * spatial_scale
        if s < 0 and vec @ vec < -s:
            vec *= np.sqrt(-s) / np.linalg.norm(vec) * 1.5
        e = np.sqrt(s + vec @ vec)
        sign = rng.choice([-1.0, 1.0]) if both_cones else 1.0
        out.append(np.array([sign * e, *vec]))
    return out


def fit_pi_freedom(m=1.0, seed=2024, n=60):
    pts = random_momenta(np.random.default_rng(seed), n, (5 * m * m, 100 * m * m))
    return fit_freedom(pts, lambda p: pi_scalar(p, m), lambda p: pi_scalar_from_splitting(p, m), 2)


def fit_sigma_freedom(m=1.0, seed=2025, n=60):
    rng = np.random.default_rng(seed)
    pts = (random_momenta(rng, n // 2, (0.1 * m * m, 0.9 * m * m))
           + random_momenta(rng, n - n // 2, (1.5 * m * m, 50 * m * m)))
    return fit_freedom(pts, lambda p: sigma_tilde(p, m), lambda p: sigma_from_splitting(p, m), 1)


# -- the S2 table ------------------------------------------------------------------------

@dataclass(frozen=True)
class S2Term:
    monomial: tuple
    coefficient_id: str
    prefactor: complex
    pattern_id: str
    argument: str


def _feynman_d0(p, m=1.0, e2=1.0):
    from .propagators import feynman_D0
    return feynman_D0(p)


def _feynman_s(p, m=1.0, e2=1.0):
    from .propagators import feynman_S
    return feynman_S(p, m)


EVALUATORS = {
    "unit": lambda p, m=1.0, e2=1.0: 1.0,
    "D0F": _feynman_d0,
    "SF": _feynman_s,
    "Sigma": sigma_tilde,
    "Pi": pi_tilde,
    "Upsilon": upsilon_tilde,
}

_TERMS = (
    ((), ("psibar(x1)", "psi(x1)", "A(x1)", "psibar(x2)", "psi(x2)", "A(x2)"), "unit", -1, ""),
    (((1, 1),), ("psibar(x1)", "psi(x1)", "psibar(x2)", "psi(x2)"), "D0F", -1j, "x1-x2"),
    (((2, 0),), ("psibar(x1)", "psi(x2)", "A(x1)", "A(x2)"), "SF", -1j, "x1-x2"),
    (((0, 2),), ("psibar(x2)", "psi(x1)", "A(x2)", "A(x1)"), "SF", -1j, "x2-x1"),
    (((0, 2), (1, 1)), ("psibar(x2)", "psi(x1)"), "Sigma", -1j, "x2-x1"),
    (((1, 1), (2, 0)), ("psibar(x1)", "psi(x2)"), "Sigma", 1j, "x1-x2"),
    (((0, 2), (2, 0)), ("A(x1)", "A(x2)"), "Pi", -1j, "x1-x2"),
    (((0, 2), (1, 1), (2, 0)), (), "Upsilon", 1, "x1-x2"),
)


@lru_cache(maxsize=None)
def s2_table():
    """The eight term groups of S2, each joined to its contraction pattern."""
    patterns = {p.pairs: p for p in enumerate_contractions(qed_vertex(1), qed_vertex(2))}
    out = []
    for pairs, monomial, cid, pref, arg in _TERMS:
        pattern = patterns[pairs]
        out.append(S2Term(monomial, cid, complex(pref), pattern.scalar_factor_id, arg))
    return tuple(out)


def residual_monomial(pattern, v1, v2):
    """Field names with vertex labels left uncontracted by ``pattern``."""
    verts = {1: v1, 2: v2}
    return tuple(f"{verts[k].factors[i].name}(x{verts[k].spacetime_label})" for k, i in pattern.residual)


def transversality(tensor, p):
    """p^mu T_mu_nu."""
    return as_vector(p) @ tensor


def raise_indices(tensor):
    return METRIC @ tensor @ METRIC
