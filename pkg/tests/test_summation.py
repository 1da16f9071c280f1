from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from casimir_cnt.constants import C, HBAR, KB
from casimir_cnt.numerics import ConvergenceError, MatsubaraSpec, matsubara_sum


def test_geometric_closed_form():
    spec = MatsubaraSpec(300.0, tail_tolerance=1e-14)
    # k_B T [1/2 + sum_{n>=1} 2^-n] = 1.5 k_B T
    assert matsubara_sum(lambda n: 0.5**n, spec) == pytest.approx(1.5 * KB * 300.0, rel=1e-13)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, 0.95), st.floats(1.0, 500.0))
def test_geometric_property(r, t):
    spec = MatsubaraSpec(t, tail_tolerance=1e-12)
    exact = KB * t * (0.5 + r / (1 - r))
    assert matsubara_sum(lambda n: r**n, spec) == pytest.approx(exact, rel=1e-10)


def test_vectorized_matches_scalar_and_reports_terms():
    spec = MatsubaraSpec(10.0)
    scalar = matsubara_sum(lambda n: math.exp(-0.05 * n), spec, full_output=True)
    vector = matsubara_sum(lambda ns: np.exp(-0.05 * ns), spec, vectorized=True, full_output=True)
    assert vector.value == scalar.value
    assert vector.n_terms == scalar.n_terms


def test_vector_components_all_converge():
    spec = MatsubaraSpec(10.0, tail_tolerance=1e-12)
    res = matsubara_sum(lambda ns: np.stack([0.5**ns, 0.9**ns], axis=1), spec, vectorized=True)
    np.testing.assert_allclose(res / (KB * 10.0), [1.5, 0.5 + 9.0], rtol=1e-10)


def test_min_index_is_respected():
    res = matsubara_sum(lambda n: 0.1**n, MatsubaraSpec(1.0), min_index=50, full_output=True)
    assert res.n_terms >= 51


def test_non_decaying_terms_raise():
    with pytest.raises(ConvergenceError):
        matsubara_sum(lambda n: 1.0 + n, MatsubaraSpec(1.0))


def test_budget_exhaustion_raises():
    with pytest.raises(ConvergenceError):
        matsubara_sum(lambda n: 0.999999**n, MatsubaraSpec(1.0, max_terms=100, tail_tolerance=1e-12))


def test_frequencies():
    spec = MatsubaraSpec(300.0)
    assert spec.xi(1) == pytest.approx(2 * math.pi * KB * 300.0 / HBAR, rel=1e-15)
    assert spec.kappa(2) == pytest.approx(2 * spec.xi(1) / C, rel=1e-15)


@pytest.mark.parametrize("kwargs", [{"temperature": -1.0}, {"temperature": 1.0, "max_terms": 0},
                                    {"temperature": 1.0, "prime_rule": False}])
def test_spec_validation(kwargs):
    with pytest.raises(ValueError):
        MatsubaraSpec(**kwargs)
