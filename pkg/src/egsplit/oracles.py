"""Independent reference computations used to validate the main modules."""

from itertools import combinations, permutations
import warnings

import numpy as np
from scipy import integrate


# -- plane-wave integral for D^(+) -----------------------------------------------------------

def damped_plane_wave(t, r, m, eps):
    """(1 / 4 pi^2 r) int p/E sin(pr) exp(-(eps + i t) E) dp, the angular-reduced integral.

    Equals int d^3p exp(-i E t + i p.x) exp(-eps E) / (2E (2pi)^3).
    """
    cutoff = 40.0 / eps
    energy = lambda p: np.sqrt(p * p + m * m)
    if r > 0:
        g = lambda p: np.sin(p * r) * p / energy(p) * np.exp(-eps * energy(p))
        pref = 1.0 / (4 * np.pi**2 * r)
    else:
        g = lambda p: p * p / energy(p) * np.exp(-eps * energy(p))
        pref = 1.0 / (4 * np.pi**2)
    opts = dict(limit=10000, epsabs=1e-13, epsrel=1e-12)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        re = integrate.quad(lambda p: g(p) * np.cos(t * energy(p)), 0, cutoff, **opts)[0]
        im = -integrate.quad(lambda p: g(p) * np.sin(t * energy(p)), 0, cutoff, **opts)[0]
    return pref * (re + 1j * im)


def dplus_momentum_oracle(x, m, n_eps=8, degree=6):
    """-i * int d^3p exp(-ip.x) / (2E (2pi)^3) by extrapolating the damped integral to eps = 0.

    The damping scale is tied to the distance from the light cone, where the
    integral is least convergent.
    """
    x = np.asarray(x, dtype=float)
    t, r = x[0], float(np.linalg.norm(x[1:]))
    gap = abs(abs(t) - r)
    if gap == 0.0:
        raise ValueError("x on the light cone")
    eps = gap * np.linspace(0.04, 0.3, n_eps)
    vals = np.array([damped_plane_wave(t, r, m, e) for e in eps])
    coef = np.polyfit(eps, vals, degree)
    return -1j * coef[-1]


# -- absorptive part of the vacuum polarisation ------------------------------------------

def pi_absorptive_oracle(s, m, spectral, n_eps=6, degree=3):
    """Im of (1/3) s^2 int G(u) / (u^2 (s - u + i eps)) du, extrapolated to eps = 0.

    At finite eps the imaginary part is a Lorentzian average of G(u)/u^2 around
    u = s, so no principal value or residue is taken.
    """
    thr = 4 * m * m
    if not s > thr:
        raise ValueError("the absorptive part lives above 4 m^2")
    g = lambda u: spectral(u, m) / u**2
    opts = dict(limit=400, epsabs=1e-14, epsrel=1e-12)
    eps = s * np.linspace(2e-3, 1.2e-2, n_eps)
    vals = []
    for e in eps:
        f = lambda u: g(u) * e / ((s - u) ** 2 + e * e)
        lo, hi = max(thr, s - 50 * e), s + 50 * e
        v = integrate.quad(f, thr, lo, **opts)[0] if lo > thr else 0.0
        v += integrate.quad(f, lo, hi, points=[s], **opts)[0]
        v += integrate.quad(f, hi, np.inf, **opts)[0]
        vals.append(-s * s / 3 * v)
    return float(np.polyval(np.polyfit(eps, vals, degree), 0.0))


# -- canonical anticommutation relations --------------------------------------------------

def jordan_wigner(n_modes):
    """Annihilation matrices c_k on the 2^n Fock space, satisfying the CAR exactly."""
    a = np.array([[0.0, 1.0], [0.0, 0.0]])
    z = np.diag([1.0, -1.0])
    eye = np.eye(2)
    ops = []
    for k in range(n_modes):
        mats = [z] * k + [a] + [eye] * (n_modes - k - 1)
        out = np.array([[1.0]])
        for mat in mats:
            out = np.kron(out, mat)
        ops.append(out)
    return ops


def car_sign(n_fermions, pairs):
    """Sign picked up when contracted pairs of an ordered fermion string are moved to the front.

    Each slot gets its own creation operator on a Jordan-Wigner Fock space.
    The reordered string (pairs first, first member first, rest in order) is
    applied to the vacuum and projected on the original one; the CAR alone
    decide the sign.
    """
    used = [k for pair in pairs for k in pair]
    if len(set(used)) != len(used) or any(not 0 <= k < n_fermions for k in used):
        raise ValueError("slots must be distinct and in range")
    rest = [k for k in range(n_fermions) if k not in used]
    create = [c.T for c in jordan_wigner(n_fermions)]
    vac = np.zeros(2**n_fermions)
    vac[0] = 1.0

    def apply(order):
        state = vac.copy()
        for k in reversed(order):
            state = create[k] @ state
        return state

    overlap = apply(used + rest) @ apply(list(range(n_fermions)))
    return int(np.rint(overlap))


# -- brute-force pattern enumeration -------------------------------------------------------

def brute_force_matchings(names1, partners1, names2):
    """Every set of disjoint (i, j) with partners1[i] == names2[j], by checking all subsets."""
    edges = [(i, j) for i in range(len(names1)) for j in range(len(names2)) if partners1[i] == names2[j]]
    out = set()
    for q in range(min(len(names1), len(names2)) + 1):
        for perm in permutations(range(len(names2)), q):
            for rows in combinations(range(len(names1)), q):
                chosen = tuple(sorted(zip(rows, perm)))
                if all(e in edges for e in chosen):
                    out.add(chosen)
    return out


def count_nonempty_proper_subsets(n):
    """Subsets X of {x1..x_{n-1}} with X nonempty, counted by enumeration."""
    items = range(n - 1)
    return sum(1 for k in range(1, n) for _ in combinations(items, k))
