"""Retarded/advanced splitting of translation-invariant scalar distributions.

Distributions are handled through their momentum-space evaluators.  The
``i0`` prescriptions are resolved exactly with the Sokhotski-Plemelj
decomposition: principal values go through QUADPACK's Cauchy-weight rule
and the delta residues are added in closed form.
"""

from dataclasses import dataclass, field
from math import factorial
import json
import warnings

import numpy as np
import sympy
from scipy import integrate

from .dirac import as_vector, lorentz_square, minkowski_dot
from .testfunctions import multi_indices

REST_FRAME = np.array([1.0, 0.0, 0.0, 0.0])


class SplittingError(ValueError):
    pass


class ThresholdWarning(UserWarning):
    pass


@dataclass
class QuadratureConfig:
    epsabs: float = 1e-14
    epsrel: float = 1e-11
    limit: int = 400
    threshold_delta: float = 1e-3


DEFAULT_QUADRATURE = QuadratureConfig()


# -- distributions ---------------------------------------------------------------

@dataclass(frozen=True)
class ConeForm:
    """d(p) = w(sign p0) * D(p^2) on p^2 > threshold, zero elsewhere.

    ``plus`` and ``minus`` weight the forward and backward cones.  ``derivative``
    returns the k-th derivative of D and is needed for Taylor subtractions away
    from the origin.
    """

    spectral: object
    threshold: float
    plus: float
    minus: float
    derivative: object = None

    def weight(self, p0):
        return self.plus if p0 > 0 else self.minus

    def __call__(self, p):
        s = minkowski_dot(p, p)
        if s <= self.threshold:
            return 0.0
        w = self.weight(p[0])
        return w * self.spectral(s) if w else 0.0

    def invariant_kernel(self, omega):
        """(coefficient, power) of the analytically continued dispersion integral.

        Causal cone forms keep exactly one of the two possible s-powers; None is
        returned otherwise.
        """
        c = self.minus * (-1) ** (omega + 1)
        even, odd = self.plus + c, self.plus - c
        if odd == 0 and omega % 2 == 0:
            return even / 2, (omega + 2) // 2
        if even == 0 and omega % 2 == 1:
            return odd / 2, (omega + 1) // 2
        return None


@dataclass(frozen=True)
class ScalarDistribution:
    name: str
    eval_p: object
    omega: int
    causal: bool
    mass_params: tuple = ()
    cone: ConeForm = None
    parity: int = None
    support_threshold: float = None

    def __call__(self, p):
        return self.eval_p(as_vector(p))

    @property
    def threshold(self):
        if self.support_threshold is not None:
            return self.support_threshold
        if self.cone is not None:
            return self.cone.threshold
        return None

    def with_omega(self, omega):
        return ScalarDistribution(self.name, self.eval_p, omega, self.causal, self.mass_params,
                                  self.cone, self.parity, self.support_threshold)


def cone_distribution(name, expr, s, threshold, plus, minus, omega, causal=None, mass_params=()):
    """Build a ScalarDistribution from a sympy expression in s = p^2."""
    spectral = sympy.lambdify(s, expr, "numpy")
    derivs = {}

    def derivative(value, k):
        if k not in derivs:
            derivs[k] = sympy.lambdify(s, sympy.diff(expr, s, k), "numpy")
        return derivs[k](value)

    cone = ConeForm(spectral, float(threshold), float(plus), float(minus), derivative)
    if causal is None:
        causal = plus == -minus or plus == minus
    parity = None
    if plus == minus:
        parity = 1
    elif plus == -minus:
        parity = -1
    return ScalarDistribution(name, cone, omega, causal, tuple(mass_params), cone, parity)


# -- theta functions -------------------------------------------------------------

def check_versor(v):
    v = as_vector(v)
    if not (abs(lorentz_square(v) - 1.0) < 1e-12 and v[0] > 0):
        raise SplittingError(f"{v} is not a future-pointing unit time-like versor")
    return v


def boosted_versor(rapidity, axis=1):
    v = np.zeros(4)
    v[0] = np.cosh(rapidity)
    v[axis] = np.sinh(rapidity)
    return v


def theta_lambda(x, v, lam):
    """Smoothed step 1/2 + arctan(lam x.v)/pi."""
    v = check_versor(v)
    if not lam > 0:
        raise SplittingError("lambda must be positive")
    return 0.5 + np.arctan(lam * minkowski_dot(as_vector(x), v)) / np.pi


@dataclass(frozen=True)
class ThetaTransform:
    """Fourier transform of theta(v.x): 2 pi * pole(k0) * delta(kvec - k0 vvec/v0).

    With eps = 0 the pole is split as i PV(1/k0) + pi delta(k0); ``pole`` is then
    the principal-value coefficient (None at k0 = 0).
    """

    pole: complex
    eps: float
    delta_layer: str
    plemelj: dict = field(default_factory=dict)

    @property
    def value(self):
        return None if self.pole is None else 2 * np.pi * self.pole


def ft_theta(k, eps, v=REST_FRAME):
    k = as_vector(k)
    v = check_versor(v)
    layer = f"delta(kvec - k0*({v[1] / v[0]:.17g}, {v[2] / v[0]:.17g}, {v[3] / v[0]:.17g}))"
    if eps > 0:
        return ThetaTransform(1j / (k[0] + 1j * eps * v[0]), eps, layer)
    if eps < 0:
        raise SplittingError("eps must be non-negative")
    pole = None if k[0] == 0 else 1j / k[0]
    return ThetaTransform(pole, 0.0, layer, {"principal_value": "i*PV(1/k0)", "residue": "pi*delta(k0)"})


def theta_times_transform(phi_hat, k, delta=1.0, limit=400):
    """Transform of theta(t) phi(t) from the transform of phi, one dimension.

    Uses (1/2pi)[reg int i/q phi_hat(k - q) dq + pi phi_hat(k)], the regularised
    integral being split at +-delta.
    """

    def parts(f):
        def re(q):
            return f(q).real

        def im(q):
            return f(q).imag
        return re, im

    outer = parts(lambda q: 1j / q * phi_hat(k - q))
    inner = parts(lambda q: 1j / q * (phi_hat(k - q) - phi_hat(k)) if q != 0 else 0.0)
    total = 0j
    for re, im, a, b in ((*outer, -np.inf, -delta), (*inner, -delta, delta), (*outer, delta, np.inf)):
        total += integrate.quad(re, a, b, limit=limit, epsabs=1e-13, epsrel=1e-11)[0]
        total += 1j * integrate.quad(im, a, b, limit=limit, epsabs=1e-13, epsrel=1e-11)[0]
    return (total + np.pi * phi_hat(k)) / (2 * np.pi)


# -- principal-value quadrature ---------------------------------------------------

def _quad_complex(f, a, b, cfg, weight=None, wvar=None, points=None):
    kwargs = dict(limit=cfg.limit, epsabs=cfg.epsabs, epsrel=cfg.epsrel)
    if weight is not None:
        kwargs.update(weight=weight, wvar=wvar)
    elif points is not None and np.isfinite(a) and np.isfinite(b):
        kwargs.update(points=points)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        re, err_re = integrate.quad(lambda t: np.real(f(t)), a, b, **kwargs)
        im, err_im = integrate.quad(lambda t: np.imag(f(t)), a, b, **kwargs)
    return re + 1j * im, abs(err_re) + abs(err_im)


def principal_value(f, breakpoints, pole, cfg=DEFAULT_QUADRATURE, half_width=None):
    """PV int_{-inf}^{inf} f(t) / (t - pole) dt for f piecewise smooth between breakpoints.

    f must decay so that f(t)/t is integrable at infinity.
    """
    pts = sorted(set(float(b) for b in breakpoints if np.isfinite(b)))
    gaps = [abs(b - pole) for b in pts if b != pole]
    h = half_width if half_width is not None else (min(gaps) / 2 if gaps else 1.0)
    h = min(h, 1.0)
    lo, hi = pole - h, pole + h
    edges = sorted(set([b for b in pts if b < lo or b > hi] + [lo, hi]))
    total, err = _quad_complex(f, lo, hi, cfg, weight="cauchy", wvar=pole)
    pieces = [(-np.inf, edges[0])] + list(zip(edges[:-1], edges[1:])) + [(edges[-1], np.inf)]
    for a, b in pieces:
        if a == lo and b == hi:
            continue
        value, e = _quad_complex(lambda t: f(t) / (t - pole), a, b, cfg)
        total += value
        err += e
    return total, err


# -- central splitting of causal distributions ----------------------------------

def _check_timelike_or_spacelike(p):
    p = as_vector(p)
    s = lorentz_square(p)
    if s == 0.0:
        raise SplittingError("p.p = 0: the dispersion integral is singular on the light cone")
    return p, s


def _threshold_guard(d, s, cfg):
    thr = d.threshold
    if thr is None:
        return False
    if thr > 0 and abs(s - thr) < cfg.threshold_delta * thr:
        warnings.warn(f"{d.name}: p^2 = {s} within the threshold neighbourhood of {thr}",
                      ThresholdWarning, stacklevel=3)
        return True
    return False


def ret_causal(d, p, cfg=DEFAULT_QUADRATURE, return_error=False):
    """Central retarded part of a causal distribution at momentum p.

    Timelike p: the invariant dispersion integral in t with the pole of order
    omega + 1 at t = 0 and the simple pole at t = 1.  Spacelike p: analytic
    continuation in s = p^2 from the cone form of d.
    """
    if not d.causal:
        raise SplittingError(f"{d.name} is not causal; use ret_noncausal")
    p, s = _check_timelike_or_spacelike(p)
    thr = d.threshold
    if thr is None or not thr > 0:
        raise SplittingError("normalisation at p = 0 needs a massive support gap")
    near = _threshold_guard(d, s, cfg)
    if s < 0:
        value, err = _ret_invariant(d, s, p[0], cfg)
    else:
        value, err = _ret_dispersion(d, p, s, cfg)
    if near:
        err = max(err, 1e-3 * abs(value))
    return (value, err) if return_error else value


def _ret_dispersion(d, p, s, cfg):
    omega = d.omega
    sigma = 1.0 if p[0] > 0 else -1.0
    t_th = np.sqrt(d.threshold / s)

    def h(t):
        if abs(t) < t_th:
            return 0.0
        return d.eval_p(t * p)

    def numerator(t):
        if abs(t) < t_th:
            return 0.0
        # 1 / (1 - t) = -1 / (t - 1)
        return -h(t) / t ** (omega + 1)

    pv, err = principal_value(numerator, [-t_th, t_th], 1.0, cfg)
    residue = h(1.0) if t_th < 1.0 else 0.0
    return sigma * 1j / (2 * np.pi) * pv + residue / 2, err / (2 * np.pi)


def _ret_invariant(d, s, p0, cfg):
    """Analytic continuation: i/2pi * c * s^n int D(u) u^-n / (s - u) du, plus the residue."""
    if d.cone is None:
        raise SplittingError(f"{d.name}: analytic continuation needs the cone form")
    kernel = d.cone.invariant_kernel(d.omega)
    if kernel is None:
        raise SplittingError(f"{d.name}: cone weights do not admit an invariant continuation")
    coeff, n = kernel
    thr = d.cone.threshold
    D = d.cone.spectral
    cfg_local = cfg
    if s < 0:
        value, err = _quad_complex(lambda u: D(u) / u**n / (s - u), thr, np.inf, cfg_local)
        return 1j / (2 * np.pi) * coeff * s**n * value, err
    # Timelike continuation, used as an internal cross-check of the t-integral.
    f = lambda u: -D(u) / u**n if u > thr else 0.0
    pv, err = principal_value(f, [thr], s, cfg_local, half_width=min(1.0, abs(s - thr) / 2) if s > thr else None)
    residue = d.cone.weight(p0) * D(s) if s > thr else 0.0
    return 1j / (2 * np.pi) * coeff * s**n * pv + residue / 2, err


def ret_invariant_form(d, p, cfg=DEFAULT_QUADRATURE):
    """The s-integral representation of ret_causal, valid for any p.p != 0."""
    p, s = _check_timelike_or_spacelike(p)
    return _ret_invariant(d, s, p[0], cfg)[0]


# -- frame-dependent splitting -------------------------------------------------------

def _taylor_along(cone, q, direction, order):
    """Sum_{k<=order} (1/k!) d^k/dlam^k  d(q + lam * direction) at lam = 0."""
    s0 = minkowski_dot(q, q)
    if s0 <= cone.threshold:
        return 0.0
    w = cone.weight(q[0])
    if w == 0:
        return 0.0
    if order == 0:
        return w * cone.spectral(s0)
    if cone.derivative is None:
        raise SplittingError("Taylor subtraction off the origin needs spectral derivatives")
    # s(lam) - s0 = b lam + c lam^2; expand D(s0 + .) and keep lam^k, k <= order
    b = 2 * minkowski_dot(q, direction)
    c = minkowski_dot(direction, direction)
    total = 0.0
    power = [1.0] + [0.0] * order
    for j in range(order + 1):
        total += cone.derivative(s0, j) / factorial(j) * sum(power)
        nxt = [0.0] * (order + 1)
        for k, a in enumerate(power):
            if a:
                if k + 1 <= order:
                    nxt[k + 1] += a * b
                if k + 2 <= order:
                    nxt[k + 2] += a * c
        power = nxt
    return w * total


def _ray_crossings(a, v, thr):
    """Real t with (a - t v)^2 = thr."""
    av = minkowski_dot(a, v)
    disc = av * av - minkowski_dot(a, a) + thr
    if disc < 0:
        return []
    r = np.sqrt(disc)
    return [av - r, av + r]


def ret_noncausal(kappa, v, p, normalization_point=None, cfg=DEFAULT_QUADRATURE):
    """Retarded part for the step theta(v.x), normalised at ``normalization_point``.

    (i/2pi) int dt/(t + i0) [k(p - t v) - sum_{|a|<=omega} (p-p')^a/a! D^a k(p' - t v)].
    For omega < 0 no subtraction is made and this is plain multiplication by theta.
    """
    v = check_versor(v)
    p = as_vector(p)
    p_ref = np.zeros(4) if normalization_point is None else as_vector(normalization_point)
    omega = kappa.omega
    cone = kappa.cone
    if cone is None:
        raise SplittingError(f"{kappa.name}: frame-dependent splitting needs the cone form")
    thr = cone.threshold
    direction = p - p_ref

    def H(t):
        value = cone(p - t * v)
        if omega >= 0:
            value = value - _taylor_along(cone, p_ref - t * v, direction, omega)
        return value

    breaks = _ray_crossings(p, v, thr)
    if omega >= 0:
        breaks += _ray_crossings(p_ref, v, thr)
    pv, _ = principal_value(H, breaks, 0.0, cfg)
    return 1j / (2 * np.pi) * pv + H(0.0) / 2


def theta_multiply(d, p, v=REST_FRAME, cfg=DEFAULT_QUADRATURE):
    """Transform of theta(v.x) d(x): the unsubtracted convolution with the theta transform."""
    return ret_noncausal(d.with_omega(-1), v, p, cfg=cfg)


# -- split results -----------------------------------------------------------------

@dataclass
class SplitResult:
    scalar_id: str
    omega: int
    ret_eval: object
    av_eval: object
    normalization_point: np.ndarray = field(default_factory=lambda: np.zeros(4))
    freedom: dict = field(default_factory=dict)
    frame_versor: np.ndarray = None

    def to_dict(self, grid=()):
        rows = []
        for p in grid:
            r, a = complex(self.ret_eval(p)), complex(self.av_eval(p))
            rows.append({"p": [float(x) for x in p], "ret": [r.real, r.imag], "av": [a.real, a.imag]})
        return {
            "scalar_id": self.scalar_id,
            "omega": self.omega,
            "normalization_point": [float(x) for x in self.normalization_point],
            "freedom": [{"alpha": list(a), "C": [complex(c).real, complex(c).imag]}
                        for a, c in sorted(self.freedom.items())],
            "frame_versor": None if self.frame_versor is None else [float(x) for x in self.frame_versor],
            "grid": rows,
        }

    def to_json(self, grid=(), **kwargs):
        return json.dumps(self.to_dict(grid), **kwargs)


def advanced_from_ret(d, ret):
    """av = ret - d pointwise."""
    return lambda p: ret(p) - d(p)


def reflected(d):
    """x -> -x, i.e. the cone weights exchanged."""
    c = d.cone
    if c is None:
        raise SplittingError(f"{d.name}: reflection needs the cone form")
    cone = ConeForm(c.spectral, c.threshold, c.minus, c.plus, c.derivative)
    parity = d.parity
    return ScalarDistribution(d.name + "_reflected", cone, d.omega, d.causal, d.mass_params, cone, parity)


def av_causal(d, p, cfg=DEFAULT_QUADRATURE):
    """Advanced part computed on its own: av_d(x) = -(ret d_R)(-x) with d_R(x) = d(-x)."""
    return -ret_causal(reflected(d), -as_vector(p), cfg)


def split(d, versor=None, normalization_point=None, cfg=DEFAULT_QUADRATURE):
    """Central splitting of d; causal inputs use the invariant formula unless a versor is given."""
    p_ref = np.zeros(4) if normalization_point is None else as_vector(normalization_point)
    if versor is None and d.causal and not np.any(p_ref):
        ret = lambda p: ret_causal(d, p, cfg)
    else:
        v = REST_FRAME if versor is None else check_versor(versor)
        ret = lambda p: ret_noncausal(d, v, p, p_ref, cfg)
    return SplitResult(d.name, d.omega, ret, advanced_from_ret(d, ret), p_ref,
                       {}, None if versor is None else as_vector(versor))


def polynomial_value(freedom, p):
    p = as_vector(p)
    total = 0j
    for alpha, c in freedom.items():
        total += c * np.prod(np.power(p, alpha))
    return total


def add_freedom(result, coefficients):
    """Add sum_alpha C_alpha p^alpha (|alpha| <= omega) to both ret and av."""
    coefficients = {tuple(a): c for a, c in coefficients.items()}
    for alpha in coefficients:
        if len(alpha) != 4 or sum(alpha) > result.omega or min(alpha) < 0:
            raise SplittingError(f"freedom multi-index {alpha} exceeds singular order {result.omega}")
    merged = dict(result.freedom)
    for alpha, c in coefficients.items():
        merged[alpha] = merged.get(alpha, 0) + c
    ret0, av0 = result.ret_eval, result.av_eval
    ret = lambda p: ret0(p) + polynomial_value(coefficients, p)
    av = lambda p: av0(p) + polynomial_value(coefficients, p)
    return SplitResult(result.scalar_id, result.omega, ret, av, result.normalization_point,
                       merged, result.frame_versor)


def freedom_indices(omega):
    return multi_indices(omega)
