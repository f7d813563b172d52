"""The twelve acceptance criteria, each printed as one PASS/FAIL line."""

import pytest

from egsplit.validate import CHECKS

# criterion -> (check name, primary tolerance as stated in the criterion)
STATED = {
    "1": ("singularity_degrees", 0.0),
    "2": ("s2_structure", 8.0),
    "3": ("partition_counts", 0.0),
    "4": ("causal_support", 1e-10),
    "5": ("momentum_oracle", 1e-4),
    "6": ("splitting_identity", 1e-6),
    "7": ("pi_cross_validation", 1e-3),
    "8": ("sigma_cross_validation", 1e-3),
    "9": ("cutoff_scan", 1e-6),
    "10": ("scaling_estimator", 0.5),
    "11": ("omega_projector", 1e-12),
    "12": ("frame_independence", 1e-4),
}


def test_every_criterion_has_a_check():
    assert [key for key, _ in CHECKS] == list(STATED)


@pytest.mark.parametrize("key, check", CHECKS, ids=[f"criterion_{k}" for k, _ in CHECKS])
def test_criterion(key, check, capsys):
    result = check()
    with capsys.disabled():
        print(f"\n  criterion {key:>2} {result.line()}")
    name, tolerance = STATED[key]
    assert result.name == name
    assert result.tolerance == tolerance
    assert result.passed, result.line()
