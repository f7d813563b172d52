"""Scalar pairing functions and the closed-form spinor-QED contractions.

Position-space pairings return only their smooth (Bessel) part.  The
light-cone layer ``eps(x0) delta(x.x) / 4pi`` is described by
:data:`LIGHT_CONE_LAYER` and never evaluated pointwise.
"""

from dataclasses import dataclass

import numpy as np
from scipy import special

from .dirac import METRIC, as_vector, gamma_contract, identity4, lorentz_square, slash


class OnLightConeError(ValueError):
    """Raised when a pairing is evaluated on x.x = 0."""


class SingularMomentumError(ValueError):
    """Raised for p.p = 0 where the closed forms carry 1/p^2."""


@dataclass(frozen=True)
class SingularLayer:
    coefficient: float
    kind: str


LIGHT_CONE_LAYER = SingularLayer(coefficient=1.0 / (4.0 * np.pi), kind="eps(x0)*delta(x.x)")


def _cone_variables(x, m):
    x = as_vector(x)
    if not m > 0:
        raise ValueError("pairing functions need m > 0")
    xx = lorentz_square(x)
    scale = x[0] ** 2 + x[1:] @ x[1:]
    if xx == 0.0 or abs(xx) <= 1e-14 * scale:
        raise OnLightConeError(f"x = {x} lies on the light cone")
    return x, xx


def pair_Dplus(x, m):
    """Smooth part of the positive-frequency pairing D^(+)(x).

    Normalised as -i times the plane-wave integral
    int d^3p exp(-i p.x) / (2 p0 (2 pi)^3); inside the cone this fixes the
    sign of the eps(x0) J1 term.
    """
    x, xx = _cone_variables(x, m)
    if xx > 0:
        tau = np.sqrt(xx)
        eps = np.sign(x[0])
        z = m * tau
        return -1j * m / (8 * np.pi * tau) * (special.y1(z) + 1j * eps * special.j1(z))
    r = np.sqrt(-xx)
    return -1j * m / (4 * np.pi**2 * r) * special.k1(m * r)


def pair_Dminus(x, m):
    """Smooth part of D^(-)(x), the complex conjugate of D^(+)(x)."""
    x, xx = _cone_variables(x, m)
    if xx > 0:
        tau = np.sqrt(xx)
        eps = np.sign(x[0])
        z = m * tau
        return 1j * m / (8 * np.pi * tau) * (special.y1(z) - 1j * eps * special.j1(z))
    r = np.sqrt(-xx)
    return 1j * m / (4 * np.pi**2 * r) * special.k1(m * r)


def commutator_D(x, m):
    """D^(+) + D^(-); the Neumann and Macdonald terms cancel identically."""
    return pair_Dplus(x, m) + pair_Dminus(x, m)


def commutator_D_closed(x, m):
    """Closed form (m / 4 pi tau) eps(x0) J1(m tau) inside the cone, 0 outside."""
    x, xx = _cone_variables(x, m)
    if xx < 0:
        return 0.0
    tau = np.sqrt(xx)
    return m / (4 * np.pi * tau) * np.sign(x[0]) * special.j1(m * tau)


def _momentum_support(p, threshold_sq):
    p = as_vector(p)
    p2 = lorentz_square(p)
    if p2 == 0.0:
        raise SingularMomentumError("p.p = 0 is singular for the closed forms")
    inside = p2 > threshold_sq and p[0] < 0
    return p, p2, inside


def transverse_projector(p, lower_indices=False):
    """p^mu p^nu / p^2 - g^{mu nu} (or with both indices lowered)."""
    p = as_vector(p)
    p2 = lorentz_square(p)
    if p2 == 0.0:
        raise SingularMomentumError("transverse projector needs p.p != 0")
    vec = METRIC @ p if lower_indices else p
    return np.outer(vec, vec) / p2 - METRIC


def ft_C2(p, m):
    """Two-fermion-loop contraction C2^{mu nu}(p), a 4x4 real tensor."""
    p, p2, inside = _momentum_support(p, 4 * m * m)
    if not inside:
        return np.zeros((4, 4))
    scalar = (p2 + 2 * m * m) * np.sqrt(1 - 4 * m * m / p2)
    return -(2 * np.pi) ** -3 / 3.0 * transverse_projector(p) * scalar


def ft_K2(p, m):
    """Fermion-photon contraction K2(p) as a Dirac matrix."""
    p, p2, inside = _momentum_support(p, m * m)
    if not inside:
        return np.zeros((4, 4), dtype=complex)
    middle = m * identity4 + slash(p) / 2 * (1 + m * m / p2)
    return (1 - m * m / p2) / (2**5 * np.pi**3) * gamma_contract(middle)


def ft_K2_reduced(p, m):
    """ft_K2 with gamma^mu (.) gamma_mu worked out: 4m - pslash (1 + m^2/p^2)."""
    p, p2, inside = _momentum_support(p, m * m)
    if not inside:
        return np.zeros((4, 4), dtype=complex)
    middle = 4 * m * identity4 - slash(p) * (1 + m * m / p2)
    return (1 - m * m / p2) / (2**5 * np.pi**3) * middle


def ft_C3_bracket(p2, m):
    """Real bracket of C3 on its support, as a function of p^2 > 4 m^2."""
    root = np.sqrt(1 - 4 * m * m / p2)
    x = np.sqrt(p2 / (4 * m * m))
    log = np.log(x + np.sqrt(x * x - 1))
    return (p2 * p2 / 24 + m * m * p2 / 12 + m**4) * root + m**4 / p2 * (4 * m * m - 3 * p2) * log


def ft_C3(p, m):
    """Three-contraction vacuum distribution C3(p)."""
    p, p2, inside = _momentum_support(p, 4 * m * m)
    if not inside:
        return 0j
    return 1j * (2 * np.pi) ** -5 * ft_C3_bracket(p2, m)


# -- momentum space: frequency parts and the Feynman combination ------------------------
# Transforms follow f(x) = int d^4p exp(-i p.x) f~(p).  The on-shell pieces are
# delta(p^2 - m^2) times a weight depending on sign(p0).

@dataclass(frozen=True)
class OnShellDistribution:
    """(2pi)^-4 PV principal / (p^2 - m^2) + weight(sign p0) delta(p^2 - m^2)."""

    mass: float
    principal: float
    weight_plus: complex
    weight_minus: complex

    def weight(self, p0):
        return self.weight_plus if p0 > 0 else self.weight_minus

    def __sub__(self, other):
        if other.mass != self.mass:
            raise ValueError("mass mismatch")
        return OnShellDistribution(self.mass, self.principal - other.principal,
                                   self.weight_plus - other.weight_plus,
                                   self.weight_minus - other.weight_minus)

    def off_shell(self, p):
        p = as_vector(p)
        d = lorentz_square(p) - self.mass**2
        if d == 0.0:
            raise SingularMomentumError("on the mass shell only the distributional pairing is defined")
        return (2 * np.pi) ** -4 * self.principal / d

    def pair_radial(self, phi, cutoff=12.0):
        """<., phi> for phi(p0, r) depending on p0 and |p| only."""
        from scipy import integrate

        m = self.mass
        opts = dict(epsabs=1e-13, epsrel=1e-10, limit=400)

        def pv_p0(r):
            E = np.hypot(r, m)
            if E == 0.0:
                return 0.0
            total = 0.0
            for pole, sign in ((E, 1.0), (-E, -1.0)):
                a = integrate.quad(lambda t: phi(t, r), -cutoff, cutoff, weight="cauchy", wvar=pole, **opts)[0]
                total += sign * a
            return total / (2 * E)

        def shell(r):
            E = np.hypot(r, m)
            return (self.weight_plus * phi(E, r) + self.weight_minus * phi(-E, r)) / (2 * E)

        pv = integrate.quad(lambda r: r * r * pv_p0(r), 0, cutoff, **opts)[0]
        on_re = integrate.quad(lambda r: (r * r * shell(r)).real, 0, cutoff, **opts)[0]
        on_im = integrate.quad(lambda r: (r * r * shell(r)).imag, 0, cutoff, **opts)[0]
        return 4 * np.pi * ((2 * np.pi) ** -4 * self.principal * pv + on_re + 1j * on_im)


def dplus_tilde(m):
    """-i (2pi)^-3 theta(p0) delta(p^2 - m^2)."""
    return OnShellDistribution(m, 0.0, -1j * (2 * np.pi) ** -3, 0.0)


def dminus_tilde(m):
    return OnShellDistribution(m, 0.0, 0.0, 1j * (2 * np.pi) ** -3)


def dret_tilde(m):
    """theta(x0) (D+ + D-): (2pi)^-4 / (p^2 - m^2 + i0 p0) split by Plemelj."""
    w = -1j * np.pi * (2 * np.pi) ** -4
    return OnShellDistribution(m, 1.0, w, -w)


def feynman_tilde(m=0.0):
    """D^ret minus the backward-cone frequency part: (2pi)^-4 / (p^2 - m^2 + i0)."""
    return dret_tilde(m) - dminus_tilde(m)


def feynman_D0(p):
    """Off-shell value of the massless Feynman propagator."""
    return feynman_tilde(0.0).off_shell(p)


def feynman_S(p, m):
    """Off-shell S^F(p) = (pslash + m) D^F_m(p)."""
    return (slash(as_vector(p)) + m * identity4) * feynman_tilde(m).off_shell(p)


def feynman_props(p, m):
    """(D^F_0(p), S^F(p)) off shell."""
    return feynman_D0(p), feynman_S(p, m)
