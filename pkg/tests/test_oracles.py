import numpy as np
import pytest

from egsplit.oracles import (
    brute_force_matchings,
    car_sign,
    count_nonempty_proper_subsets,
    jordan_wigner,
    pi_absorptive_oracle,
)
from egsplit.qed import vp_spectral


def test_jordan_wigner_anticommutation():
    ops = jordan_wigner(3)
    for a in ops:
        for b in ops:
            assert np.allclose(a @ b + b @ a, 0)
            assert np.allclose(a @ b.conj().T + b.conj().T @ a, np.eye(8) * np.allclose(a, b))


def test_car_sign_of_a_single_swap():
    # pulling slot 2 next to slot 0 passes one fermion
    assert car_sign(3, [(0, 2)]) == -1
    assert car_sign(2, [(0, 1)]) == 1


def test_brute_force_matchings_of_a_pair():
    assert brute_force_matchings(["a"], ["b"], ["b"]) == {(), ((0, 0),)}


def test_subset_count():
    assert count_nonempty_proper_subsets(4) == 7


@pytest.mark.parametrize("s", [4.5, 30.0])
def test_absorptive_oracle_agrees_with_residue(s):
    expected = -np.pi / 3 * (s + 2) * np.sqrt(1 - 4 / s)
    assert pi_absorptive_oracle(s, 1.0, vp_spectral) == pytest.approx(expected, rel=1e-6)


def test_absorptive_oracle_needs_the_cut():
    with pytest.raises(ValueError):
        pi_absorptive_oracle(3.0, 1.0, vp_spectral)
