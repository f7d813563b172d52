"""Hermite-Gaussian test functions on R^4 and the Taylor-subtraction projector.

The basis functions are products of h_k(x) = H_k(x) exp(-x^2/2) with
physicists' Hermite polynomials H_k.  The family is closed under
differentiation (h_k' = k h_{k-1} - h_{k+1}/2) and under the Fourier
transform, so derivatives at the origin are exact.
"""

from dataclasses import dataclass, field
from itertools import product
from math import factorial

import numpy as np
from numpy.polynomial import hermite

DIM = 4


def multi_indices(order, dim=DIM):
    """All multi-indices with |alpha| <= order, sorted by total degree."""
    out = [a for a in product(range(order + 1), repeat=dim) if sum(a) <= order]
    out.sort(key=lambda a: (sum(a), tuple(-k for k in a)))
    return out


def multi_factorial(alpha):
    out = 1
    for a in alpha:
        out *= factorial(a)
    return out


def hermite_at_zero(k):
    if k % 2:
        return 0.0
    return (-1) ** (k // 2) * factorial(k) / factorial(k // 2)


def hermite_function(k, x):
    coef = np.zeros(k + 1)
    coef[k] = 1.0
    return hermite.hermval(x, coef) * np.exp(-0.5 * np.square(x))


def _derive_1d(k):
    """h_k' as a list of (coefficient, index)."""
    out = [(-0.5, k + 1)]
    if k > 0:
        out.append((float(k), k - 1))
    return out


@dataclass(frozen=True)
class TestFunction:
    """Finite combination  sum_n c_n prod_i h_{n_i}(x_i)."""

    terms: tuple

    @classmethod
    def from_dict(cls, coeffs):
        return cls(tuple((complex(c), tuple(n)) for n, c in coeffs.items() if c != 0))

    @classmethod
    def gaussian(cls, scale=1.0):
        return cls(((complex(scale), (0, 0, 0, 0)),))

    @classmethod
    def random(cls, rng, max_degree=3, n_terms=6):
        pool = multi_indices(max_degree)
        picks = rng.choice(len(pool), size=min(n_terms, len(pool)), replace=False)
        coeffs = {pool[k]: rng.normal() + 1j * rng.normal() for k in picks}
        return cls.from_dict(coeffs)

    def as_dict(self):
        out = {}
        for c, n in self.terms:
            out[n] = out.get(n, 0) + c
        return out

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        total = np.zeros(x.shape[:-1], dtype=complex)
        for c, n in self.terms:
            val = c
            for i, k in enumerate(n):
                val = val * hermite_function(k, x[..., i])
            total = total + val
        return total

    def derivative(self, alpha):
        coeffs = self.as_dict()
        for axis, order in enumerate(alpha):
            for _ in range(order):
                new = {}
                for n, c in coeffs.items():
                    for w, k in _derive_1d(n[axis]):
                        m = n[:axis] + (k,) + n[axis + 1:]
                        new[m] = new.get(m, 0) + c * w
                coeffs = new
        return TestFunction.from_dict(coeffs)

    def derivative_at_zero(self, alpha):
        total = 0j
        for c, n in self.derivative(alpha).terms:
            val = c
            for k in n:
                val *= hermite_at_zero(k)
            total += val
        return total

    def fourier(self, p):
        """Exact transform  int d^4x exp(-i p.x_euclid) phi(x)."""
        p = np.asarray(p, dtype=float)
        total = np.zeros(p.shape[:-1], dtype=complex)
        for c, n in self.terms:
            val = c * (2 * np.pi) ** (DIM / 2) * (-1j) ** sum(n)
            for i, k in enumerate(n):
                val = val * hermite_function(k, p[..., i])
            total = total + val
        return total


def _smooth_step(t):
    """C-infinity step: 0 for t <= 0, 1 for t >= 1."""
    t = np.asarray(t, dtype=float)
    a = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
    b = np.where(t < 1, np.exp(-1.0 / np.where(t < 1, 1.0 - t, 1.0)), 0.0)
    return a / (a + b)


@dataclass(frozen=True)
class Window:
    """Product bump, identically 1 for |x_i| <= radius/2 and 0 beyond radius."""

    radius: float = 1.0

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        r = self.radius
        u = 2.0 * (r - np.abs(x)) / r
        return np.prod(_smooth_step(u), axis=-1)


@dataclass(frozen=True)
class SubtractedTestFunction:
    """base - sum_alpha c_alpha x^alpha/alpha! w(x), with exact bookkeeping at 0."""

    base: TestFunction
    coefficients: dict = field(default_factory=dict)
    window: Window = Window()

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        total = self.base(x)
        if self.coefficients:
            w = self.window(x)
            for alpha, c in self.coefficients.items():
                mono = np.prod(np.power(x, alpha), axis=-1) / multi_factorial(alpha)
                total = total - c * mono * w
        return total

    def derivative_at_zero(self, alpha):
        alpha = tuple(alpha)
        return self.base.derivative_at_zero(alpha) - self.coefficients.get(alpha, 0)


def omega_subtract(phi, omega, window=Window()):
    """Remove the Taylor polynomial of order omega at 0, windowed by ``window``.

    The result has D^beta(.)(0) = 0 for |beta| <= omega, and applying the map
    again returns an equal object.  For omega < 0 phi is returned unchanged.
    """
    if omega < 0:
        return phi
    if isinstance(phi, TestFunction):
        phi = SubtractedTestFunction(phi, {}, window)
    elif phi.window != window and phi.coefficients:
        raise ValueError("cannot mix windows of different radius")
    coeffs = dict(phi.coefficients)
    for alpha in multi_indices(omega):
        d = phi.derivative_at_zero(alpha)
        if d != 0:
            coeffs[alpha] = coeffs.get(alpha, 0) + d
    return SubtractedTestFunction(phi.base, coeffs, window)


@dataclass(frozen=True)
class TwoPointSubtracted:
    """Omega chi for chi(x, y) = phi(x - y) psi(y)."""

    relative: TestFunction
    spectator: TestFunction
    omega: int
    window: Window = Window()

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        chi = self.relative(x - y) * self.spectator(y)
        if self.omega < 0:
            return chi
        w = self.window(x - y)
        for beta in multi_indices(self.omega):
            # D_x^beta chi at x = y factorises for product kernels
            d = self.relative.derivative_at_zero(beta) * self.spectator(y)
            mono = np.prod(np.power(x - y, beta), axis=-1) / multi_factorial(beta)
            chi = chi - mono * w * d
        return chi


def omega_two_variable(relative, spectator, omega, window=Window()):
    return TwoPointSubtracted(relative, spectator, omega, window)
