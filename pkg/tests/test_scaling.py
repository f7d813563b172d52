import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from egsplit.qed import k2_scalar, vacuum_polarization_f
from egsplit.scaling import (
    contraction_cutoff_scan,
    growth_exponent,
    pv_gaussian,
    scaled_pairing,
    singular_order_estimate,
)


@settings(max_examples=25, deadline=None)
@given(st.floats(-4, 4), st.floats(0.5, 3))
def test_dawson_form_matches_cauchy_quadrature(a, width):
    f = lambda x: np.exp(-width * (x - a) ** 2)
    lo, hi = a - 12 / np.sqrt(width), a + 12 / np.sqrt(width)
    lo, hi = min(lo, -1.0), max(hi, 1.0)
    direct = integrate.quad(f, lo, hi, weight="cauchy", wvar=0.0, epsabs=1e-13, limit=400)[0]
    assert pv_gaussian(a, width) == pytest.approx(direct, abs=1e-9)


def test_single_contraction_converges():
    values = [contraction_cutoff_scan(1, L) for L in (4.0, 8.0, 16.0)]
    assert abs(values[2] - values[1]) < 1e-12 * abs(values[2])
    assert abs(values[2]) > 0


def test_fermion_loop_grows_like_a_power():
    small, large = contraction_cutoff_scan(2, 8.0), contraction_cutoff_scan(2, 64.0)
    assert abs(large) / abs(small) > 10


def test_scalar_pairs_grow_slowly():
    k, _ = growth_exponent(2, [16.0, 32.0, 64.0], sing_index=(-0.5, -0.5))
    assert 0 < k < 0.5


def test_scan_arguments_checked():
    with pytest.raises(ValueError):
        contraction_cutoff_scan(3, 4.0)
    with pytest.raises(ValueError):
        contraction_cutoff_scan(1, 0.0)
    with pytest.raises(ValueError):
        contraction_cutoff_scan(2, 4.0, sing_index=(0.0,))


@pytest.mark.parametrize("power", [0, 1, 2])
def test_homogeneous_distribution_scales_exactly(power):
    d = lambda p: (p[0] ** 2 - p[1] ** 2) ** power
    ratio = scaled_pairing(d, 8.0) / scaled_pairing(d, 4.0)
    assert abs(ratio) == pytest.approx(2.0 ** (4 + 2 * power), rel=1e-10)


def test_vacuum_polarisation_order():
    est = singular_order_estimate(vacuum_polarization_f(1.0))
    assert est.omega == pytest.approx(2.0, abs=0.05)
    assert len(est.values) == len(est.lambdas) == 5


def test_self_energy_trace_order():
    est = singular_order_estimate(k2_scalar(1.0))
    assert est.omega == pytest.approx(1.0, abs=0.05)


def test_symmetric_probe_on_odd_distribution_is_rejected():
    even_probe = lambda k: np.exp(-(k[0] ** 2 + k[1] ** 2))
    with pytest.raises(ValueError):
        singular_order_estimate(vacuum_polarization_f(1.0), probe=even_probe)
