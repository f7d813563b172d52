"""Minkowski kinematics and Dirac algebra in the chiral representation.

Metric signature is (+, -, -, -).  Four-vectors are plain length-4 arrays
``(p0, p1, p2, p3)``.
"""

import numpy as np

METRIC = np.diag([1.0, -1.0, -1.0, -1.0])

identity2 = np.eye(2, dtype=complex)
sigma = np.array([
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex)

_zero2 = np.zeros((2, 2), dtype=complex)

gamma0 = np.block([[_zero2, identity2], [identity2, _zero2]])
gamma = np.array(
    [gamma0] + [np.block([[_zero2, -s], [s, _zero2]]) for s in sigma]
)
identity4 = np.eye(4, dtype=complex)

gamma.setflags(write=False)
gamma0.setflags(write=False)
identity4.setflags(write=False)

CHI = (np.array([1.0, 0.0], dtype=complex), np.array([0.0, 1.0], dtype=complex))


def as_vector(p):
    p = np.asarray(p, dtype=float)
    if p.shape != (4,):
        raise ValueError(f"expected a four-vector, got shape {p.shape}")
    return p


def minkowski_dot(p, q):
    return p[0] * q[0] - p[1] * q[1] - p[2] * q[2] - p[3] * q[3]


def lorentz_square(p):
    p = as_vector(p)
    return minkowski_dot(p, p)


def lower(p):
    """Lower the index of a contravariant four-vector."""
    return METRIC @ as_vector(p)


def slash(p):
    """Feynman slash  p_mu gamma^mu."""
    return np.tensordot(lower(p), gamma, axes=1)


def dirac_bar(spinor):
    return spinor.conj() @ gamma0


def anticommutator(a, b):
    return a @ b + b @ a


def gamma_contract(middle):
    """gamma^mu M gamma_mu summed over mu."""
    out = np.zeros((4, 4), dtype=complex)
    for mu in range(4):
        out += METRIC[mu, mu] * gamma[mu] @ middle @ gamma[mu]
    return out


def energy(pvec, m):
    pvec = np.asarray(pvec, dtype=float)
    return float(np.sqrt(m * m + pvec @ pvec))


def _spinor_halves(s, pvec, m):
    if s not in (1, 2):
        raise ValueError(f"spin label must be 1 or 2, got {s}")
    if not m > 0:
        raise ValueError("massless Dirac spinors are not supported")
    pvec = np.asarray(pvec, dtype=float)
    E = energy(pvec, m)
    p_sigma = np.tensordot(pvec, sigma, axes=1)
    chi = CHI[s - 1]
    norm = np.sqrt((E + m) / (2.0 * E)) / np.sqrt(2.0)
    shift = p_sigma @ chi / (E + m)
    return norm, chi + shift, chi - shift


def dirac_u(s, pvec, m):
    """Positive-energy plane-wave spinor u_s(p), normalised to u-bar u = m/E."""
    norm, upper, low = _spinor_halves(s, pvec, m)
    return norm * np.concatenate([upper, low])


def dirac_v(s, pvec, m):
    """Negative-energy partner v_s(p); lower half carries the opposite sign."""
    norm, upper, low = _spinor_halves(s, pvec, m)
    return norm * np.concatenate([upper, -low])
