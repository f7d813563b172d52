import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, special

from egsplit.dirac import (
    METRIC,
    anticommutator,
    dirac_bar,
    dirac_u,
    dirac_v,
    energy,
    gamma,
    gamma_contract,
    identity4,
    slash,
)
from egsplit.oracles import dplus_momentum_oracle
from egsplit.propagators import (
    LIGHT_CONE_LAYER,
    OnLightConeError,
    SingularMomentumError,
    commutator_D,
    commutator_D_closed,
    dminus_tilde,
    dplus_tilde,
    dret_tilde,
    feynman_D0,
    feynman_S,
    feynman_tilde,
    ft_C2,
    ft_C3,
    ft_C3_bracket,
    ft_K2,
    ft_K2_reduced,
    pair_Dminus,
    pair_Dplus,
)

M = 1.0


def test_gamma_anticommutators():
    for mu in range(4):
        for nu in range(4):
            assert np.array_equal(anticommutator(gamma[mu], gamma[nu]), 2 * METRIC[mu, nu] * identity4)


def test_gamma_contraction_identities():
    assert np.allclose(gamma_contract(identity4), 4 * identity4)
    p = np.array([1.3, 0.2, -0.7, 0.4])
    assert np.allclose(gamma_contract(slash(p)), -2 * slash(p))


def test_rest_frame_spinor():
    for s in (1, 2):
        u = dirac_u(s, np.zeros(3), M)
        chi = np.eye(2)[s - 1]
        assert np.allclose(u, np.concatenate([chi, chi]) / np.sqrt(2))


vectors = st.lists(st.floats(-3, 3), min_size=3, max_size=3).map(np.array)


@settings(max_examples=40, deadline=None)
@given(vectors, st.floats(0.3, 3.0))
def test_completeness_relations(pvec, m):
    E = energy(pvec, m)
    p = np.array([E, *pvec])
    uu = sum(np.outer(dirac_u(s, pvec, m), dirac_bar(dirac_u(s, pvec, m))) for s in (1, 2))
    vv = sum(np.outer(dirac_v(s, pvec, m), dirac_bar(dirac_v(s, pvec, m))) for s in (1, 2))
    assert np.allclose(uu, (slash(p) + m * identity4) / (2 * E), atol=1e-12)
    assert np.allclose(vv, (slash(p) - m * identity4) / (2 * E), atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(vectors)
def test_ubar_u_diagonal(pvec):
    gram = np.array([[dirac_bar(dirac_u(s, pvec, M)) @ dirac_u(t, pvec, M) for t in (1, 2)] for s in (1, 2)])
    assert np.allclose(gram, M / energy(pvec, M) * np.eye(2), atol=1e-12)


def test_massless_spinor_rejected():
    with pytest.raises(ValueError):
        dirac_u(1, np.zeros(3), 0.0)
    with pytest.raises(ValueError):
        dirac_v(3, np.zeros(3), 1.0)


def test_spacelike_value_is_macdonald_term():
    x = np.array([0.3, 1.1, 0.4, -0.2])
    r = np.sqrt(-(x[0] ** 2 - x[1:] @ x[1:]))
    assert pair_Dplus(x, M) == pytest.approx(-1j * M / (4 * np.pi**2 * r) * special.k1(M * r), rel=1e-14)


def test_on_cone_raises():
    with pytest.raises(OnLightConeError):
        pair_Dplus(np.array([1.0, 1.0, 0.0, 0.0]), M)
    assert LIGHT_CONE_LAYER.coefficient == pytest.approx(1 / (4 * np.pi))


@settings(max_examples=60, deadline=None)
@given(st.floats(0.1, 5.0), st.floats(-0.95, 0.95), vectors.filter(lambda v: np.linalg.norm(v) > 1e-3))
def test_commutator_vanishes_outside_cone(r, frac, direction):
    x = np.array([frac * r, *(r * direction / np.linalg.norm(direction))])
    assert abs(commutator_D(x, M)) <= 1e-12 * abs(pair_Dplus(x, M))
    assert commutator_D_closed(x, M) == 0.0


@settings(max_examples=60, deadline=None)
@given(st.floats(0.1, 6.0), st.floats(0.0, 0.95), vectors.filter(lambda v: np.linalg.norm(v) > 1e-3))
def test_commutator_inside_cone_matches_closed_form_and_is_odd(t, frac, direction):
    x = np.array([t, *(frac * t * direction / np.linalg.norm(direction))])
    assert commutator_D(x, M) == pytest.approx(commutator_D_closed(x, M), rel=1e-12, abs=1e-15)
    assert commutator_D(-x, M) == pytest.approx(-commutator_D(x, M), rel=1e-12, abs=1e-15)


@pytest.mark.parametrize("x", [(2.0, 0.0, 0.0, 0.0), (0.4, 1.5, 0.0, 0.0), (-1.7, 0.2, 0.5, 0.1)])
def test_dplus_against_plane_wave_integral(x):
    x = np.array(x)
    assert abs(dplus_momentum_oracle(x, M) - pair_Dplus(x, M)) < 1e-4 * abs(pair_Dplus(x, M))


def test_dminus_is_conjugate():
    for x in ([2.0, 0.1, 0.0, 0.0], [0.2, 1.0, 0.0, 0.0]):
        assert pair_Dminus(np.array(x), M) == pytest.approx(np.conj(pair_Dplus(np.array(x), M)))


def test_c2_support_and_transversality():
    assert np.all(ft_C2(np.array([3.0, 0.1, 0.0, 0.0]), M) == 0)
    assert np.all(ft_C2(np.array([-1.5, 0.1, 0.0, 0.0]), M) == 0)
    p = np.array([-3.0, 0.5, 0.2, -0.1])
    c = ft_C2(p, M)
    assert np.max(np.abs((METRIC @ p) @ c)) < 1e-15 * np.max(np.abs(c))


def test_c2_vanishes_at_threshold_like_sqrt():
    vals = []
    for eps in (1e-4, 1e-6):
        p = np.array([-np.sqrt(4 * M * M * (1 + eps)), 0.0, 0.0, 0.0])
        vals.append(np.max(np.abs(ft_C2(p, M))))
    assert vals[1] / vals[0] == pytest.approx(0.1, rel=1e-3)


def test_k2_gamma_algebra_matches_reduced_form():
    for p in ([-2.0, 0.3, 0.1, 0.0], [-5.0, 1.0, -2.0, 0.5]):
        p = np.array(p)
        assert np.allclose(ft_K2(p, M), ft_K2_reduced(p, M), atol=1e-16)
    assert np.all(ft_K2(np.array([2.0, 0.0, 0.0, 0.0]), M) == 0)


def test_c3_support_and_positivity():
    assert ft_C3(np.array([3.0, 0.0, 0.0, 0.0]), M) == 0
    assert ft_C3(np.array([-1.9, 0.0, 0.0, 0.0]), M) == 0
    for s in (10.0, 100.0, 1e4):
        assert ft_C3_bracket(s, M) > 0


def test_singular_momentum():
    with pytest.raises(SingularMomentumError):
        ft_C2(np.array([1.0, 1.0, 0.0, 0.0]), M)


# -- Feynman propagators -------------------------------------------------------------------

def test_ret_minus_av_is_the_commutator():
    # the advanced part has the i0 flipped, so its delta weights are those of ret negated
    ret, plus, minus = dret_tilde(M), dplus_tilde(M), dminus_tilde(M)
    assert ret.weight_plus - (-ret.weight_plus) == pytest.approx(plus.weight_plus + minus.weight_plus)
    assert ret.weight_minus - (-ret.weight_minus) == pytest.approx(plus.weight_minus + minus.weight_minus)


def test_feynman_weights_are_those_of_plus_i0():
    F = feynman_tilde(M)
    assert F.weight_plus == pytest.approx(-1j * np.pi * (2 * np.pi) ** -4)
    assert F.weight_minus == pytest.approx(-1j * np.pi * (2 * np.pi) ** -4)


def _radial_eps_oracle(phi, m, eps, cutoff=12.0):
    """int d^4p phi / (p^2 - m^2 + i eps), done directly."""
    opts = dict(epsabs=1e-12, epsrel=1e-9)
    f = lambda p0, r: 4 * np.pi * r * r * phi(p0, r) / (p0 * p0 - r * r - m * m + 1j * eps)
    re = integrate.dblquad(lambda p0, r: f(p0, r).real, 0, cutoff, -cutoff, cutoff, **opts)[0]
    im = integrate.dblquad(lambda p0, r: f(p0, r).imag, 0, cutoff, -cutoff, cutoff, **opts)[0]
    return (2 * np.pi) ** -4 * (re + 1j * im)


def test_feynman_pairing_matches_regularised_pole():
    phi = lambda p0, r: np.exp(-p0 * p0 - r * r) * (1 + 0.3 * p0)
    split = feynman_tilde(M).pair_radial(phi)
    eps = np.array([0.08, 0.04, 0.02])
    vals = np.array([_radial_eps_oracle(phi, M, e) for e in eps])
    limit = np.polyval(np.polyfit(eps, vals, 2), 0.0)
    assert abs(split - limit) < 1e-3 * abs(limit)


def test_feynman_off_shell_values():
    p = np.array([0.3, 1.2, 0.0, 0.0])
    s = p[0] ** 2 - p[1:] @ p[1:]
    assert feynman_D0(p) == pytest.approx((2 * np.pi) ** -4 / s)
    assert np.allclose(feynman_S(p, M), (slash(p) + M * identity4) * (2 * np.pi) ** -4 / (s - M * M))
    assert feynman_D0(-p) == feynman_D0(p)
    with pytest.raises(SingularMomentumError):
        feynman_D0(np.array([1.0, 1.0, 0.0, 0.0]))
