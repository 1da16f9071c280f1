from __future__ import annotations

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from casimir_cnt.constants import C, HBAR, KB, casimir_ideal_energy
from casimir_cnt.film import ConductivityTensor
from casimir_cnt.lifshitz import (
    CasimirPoint,
    CasimirResult,
    ConstantSheet,
    FresnelError,
    LifshitzSolver,
    ReflectionMatrix,
    energy_integrand,
    fresnel_matrix,
    fresnel_n0_limit,
    reflection_derivative,
    rotated_tensor_derivative,
    thermal_n0_energy,
)
from casimir_cnt.numerics import MatsubaraSpec, central_derivative

ZETA3 = float(mpmath.zeta(3))


def rotated(a, b, psi):
    (sxx, syy, sxy), (dxx, dyy, dxy) = rotated_tensor_derivative(a, b, 0.0, psi)
    return ConductivityTensor(sxx, syy, sxy, sxy), ConductivityTensor(dxx, dyy, dxy, dxy)


# ---------------------------------------------------------------- reflection

@settings(max_examples=100, deadline=None)
@given(st.floats(1e-4, 1e3), st.floats(1e3, 1e9), st.floats(0.0, 1e9))
def test_isotropic_sheet_reduces_to_te_tm(s, kappa, k):
    q = math.hypot(kappa, k)
    r = fresnel_matrix(ConductivityTensor(s, s), kappa, k)
    r_te = -s * kappa / (q + s * kappa)
    r_tm = s * q / (kappa + s * q)
    assert r.xx == pytest.approx(r_te, rel=1e-12)
    assert r.yy == pytest.approx(r_tm, rel=1e-12)
    assert r.xy == 0 and r.yx == 0


@settings(max_examples=100, deadline=None)
@given(st.floats(0.0, 50.0), st.floats(0.0, 50.0), st.floats(0.0, math.pi), st.floats(1e3, 1e9), st.floats(0.0, 1e9))
def test_passive_sheets_do_not_amplify(a, b, psi, kappa, k):
    t, _ = rotated(a, b, psi)
    r = fresnel_matrix(t, kappa, k).as_matrix()
    assert np.linalg.norm(r, 2) <= 1.0 + 1e-12
    # identical aligned sheets attract: ln det(1 - e R R) <= 0
    rm = fresnel_matrix(t, kappa, k)
    assert energy_integrand(1e-7, kappa, k, rm, rm) <= 1e-15


def test_aligned_diagonal_tensor_gives_diagonal_matrix():
    r = fresnel_matrix(ConductivityTensor(0.3, 2.0), 1e6, 3e6)
    lam = math.sqrt(10.0)
    delta = 1 + 0.3 * lam + 2.0 / lam + 0.6
    assert r.xx == pytest.approx(-(2.0 / lam + 0.6) / delta, rel=1e-14)
    assert r.yy == pytest.approx((0.3 * lam + 0.6) / delta, rel=1e-14)
    assert r.xy == 0 and r.yx == 0


def test_fresnel_errors():
    with pytest.raises(ValueError):
        fresnel_matrix(ConductivityTensor(1.0, 1.0), 0.0, 1.0)
    with pytest.raises(FresnelError):
        fresnel_matrix(ConductivityTensor(-1.0, 0.0), 1.0, 0.0)


@pytest.mark.parametrize("phi", [0.0, math.pi / 3, 2.0])
def test_n0_limit_matrix(phi):
    np.testing.assert_array_equal(fresnel_n0_limit(phi).as_matrix(), [[0.0, 0.0], [0.0, 1.0]])


@pytest.mark.parametrize("a, b, psi", [(0.2, 3.0, 0.7), (1.5, 0.1, 2.2), (0.0, 40.0, 0.05)])
def test_reflection_derivative_matches_finite_difference(a, b, psi):
    kappa, k = 2e6, 5e6
    t, dt = rotated(a, b, psi)
    analytic = reflection_derivative(t, dt, kappa, k)

    for i in range(2):
        for j in range(2):
            fd, _ = central_derivative(lambda p: fresnel_matrix(rotated(a, b, p)[0], kappa, k).as_matrix()[i, j],
                                       psi, 1e-3)
            assert analytic[i, j] == pytest.approx(fd, rel=1e-6, abs=1e-9)


def test_reflection_derivative_special_cases():
    t, dt = rotated(1.0, 1.0, 0.4)
    np.testing.assert_allclose(reflection_derivative(t, dt, 1e6, 2e6), 0.0, atol=1e-15)
    t, dt = rotated(0.5, 2.0, 0.0)
    d = reflection_derivative(t, dt, 1e6, 2e6)
    assert d[0, 0] == 0 and d[1, 1] == 0
    assert d[0, 1] != 0 and d[1, 0] != 0


def test_energy_integrand_trivial_cases():
    zero = ReflectionMatrix(0.0, 0.0, 0.0, 0.0)
    assert energy_integrand(1e-7, 1e6, 1e6, zero, zero) == 0.0
    n0 = ReflectionMatrix(0.0, 0.0, 0.0, 1.0)
    d, k = 5e-8, 3e7
    assert energy_integrand(d, 0.0, k, n0, n0) == pytest.approx(math.log1p(-math.exp(-2 * d * k)), rel=1e-14)
    assert energy_integrand(1e-3, 1e6, 1e6, n0, n0) == 0.0
    with pytest.raises(FresnelError):
        one = ReflectionMatrix(1.0, 0.0, 0.0, 1.0)
        energy_integrand(0.0, 0.0, 0.0, one, one)


# ---------------------------------------------------------------- points

def test_point_validation():
    with pytest.raises(ValueError):
        CasimirPoint(0.0)
    with pytest.raises(ValueError):
        CasimirPoint(10.0, temperature=-1.0)
    with pytest.raises(ValueError):
        CasimirPoint(10.0, mode="other")
    with pytest.raises(ValueError):
        CasimirPoint(10.0, temperature=0.0, mode="matsubara")


def test_result_normalisation():
    p = CasimirPoint(100.0, 0.0, 300.0, "thermal")
    r = CasimirResult(p, energy=2.0, torque=1.0)
    assert r.energy_normalized == pytest.approx(2.0 / casimir_ideal_energy(1e-7))
    assert r.torque_normalized == pytest.approx(1.0 / casimir_ideal_energy(1e-7))


# ---------------------------------------------------------------- thermal

def test_thermal_term_closed_form():
    d = 100e-9
    oracle = -ZETA3 * KB * 300.0 / (16 * math.pi * d * d)
    assert oracle == pytest.approx(-9.906e-9, rel=1e-3)
    assert thermal_n0_energy(d, 300.0) == pytest.approx(oracle, rel=1e-10)


def test_thermal_mode(film):
    solver = LifshitzSolver(film)
    for phi in (0.0, 0.3, math.pi / 2):
        res = solver.evaluate(CasimirPoint(100.0, phi, 300.0, "thermal"))
        assert res.energy == pytest.approx(-9.906e-9, rel=1e-3)
        assert res.torque == 0.0


def test_numeric_n0_branch_close_to_stated_limit(film):
    solver = LifshitzSolver(film, n0_branch="numeric")
    report = solver.n0_limit(50e-9, math.pi / 8)
    assert report["closed_form"] == pytest.approx(-ZETA3 / (8 * math.pi * 50e-9**2), rel=1e-14)
    assert abs(report["relative_discrepancy"]) < 1e-2
    # the sequence approaches the limit monotonically
    assert np.all(np.diff(np.abs(report["values"])) > 0)
    e = solver.evaluate(CasimirPoint(50.0, math.pi / 8, 300.0, "thermal")).energy
    assert e == pytest.approx(0.5 * KB * 300.0 * report["extrapolated"], rel=1e-12)


# ---------------------------------------------------------------- quantum / matsubara

def test_perfect_conductor_limit():
    solver = LifshitzSolver(ConstantSheet(1e6, 1e6))
    res = solver.evaluate(CasimirPoint(1000.0, 0.0, 0.0, "quantum"))
    assert 0.99 <= res.energy_normalized <= 1.01
    assert res.energy_normalized == pytest.approx(1.0, abs=1e-4)
    assert res.torque == 0.0


def test_films_prefer_alignment(film):
    solver = LifshitzSolver(film)
    results = [solver.evaluate(CasimirPoint(80.0, p, 0.0, "quantum")) for p in (0.0, 0.4, 0.8, 1.2)]
    energies = [r.energy for r in results]
    assert energies == sorted(energies)
    assert all(r.torque < 0 for r in results[1:])


@pytest.fixture(scope="module")
def solver(film):
    return LifshitzSolver(film)


def test_torque_vanishes_at_stationary_angles(solver):
    for phi in (0.0, math.pi / 2):
        res = solver.evaluate(CasimirPoint(50.0, phi, 0.0, "quantum"))
        assert abs(res.torque) < 1e-12 * abs(res.energy)


def test_torque_is_minus_energy_derivative(solver):
    phi = 0.4
    res = solver.evaluate(CasimirPoint(50.0, phi, 0.0, "quantum"))
    d, _ = central_derivative(lambda p: solver.energy(CasimirPoint(50.0, p, 0.0, "quantum")), phi, 1e-2)
    assert res.torque == pytest.approx(-d, rel=1e-5)


def test_angle_symmetries(solver):
    phi = 0.9
    base = solver.evaluate(CasimirPoint(100.0, phi, 0.0, "quantum"))
    mirror = solver.evaluate(CasimirPoint(100.0, -phi, 0.0, "quantum"))
    shifted = solver.evaluate(CasimirPoint(100.0, phi + math.pi, 0.0, "quantum"))
    assert mirror.energy == pytest.approx(base.energy, rel=1e-10)
    assert shifted.energy == pytest.approx(base.energy, rel=1e-10)
    assert mirror.torque == pytest.approx(-base.torque, rel=1e-10)
    assert shifted.torque == pytest.approx(base.torque, rel=1e-10)


def test_energy_negative_and_decreasing_in_magnitude(solver):
    energies = [solver.energy(CasimirPoint(d, 0.3, 0.0, "quantum")) for d in (20.0, 60.0, 200.0, 700.0)]
    assert all(e < 0 for e in energies)
    assert all(abs(a) > abs(b) for a, b in zip(energies, energies[1:]))


def test_fixed_frame_option_is_consistent(film):
    solver = LifshitzSolver(film, frame="fixed")
    phi = 0.5
    res = solver.evaluate(CasimirPoint(80.0, phi, 0.0, "quantum"))
    d, _ = central_derivative(lambda p: solver.energy(CasimirPoint(80.0, p, 0.0, "quantum")), phi, 1e-2)
    assert res.torque == pytest.approx(-d, rel=1e-4)
    assert solver.energy(CasimirPoint(80.0, -phi, 0.0, "quantum")) == pytest.approx(res.energy, rel=1e-10)
    with pytest.raises(ValueError):
        LifshitzSolver(film, frame="other")


def test_k_integral_matches_direct_polar_quadrature():
    # perfect-conductor kernel has a closed form: (1/2 pi) int k dk 2 ln(1 - e^{-2Dq})
    from casimir_cnt.numerics import QuadratureSpec, integrate_interval

    solver = LifshitzSolver(ConstantSheet(1e9, 1e9), quadrature=QuadratureSpec(1e-10))
    d, kappa = 1e-7, 4e6
    got = solver.k_integral(d, 0.0, [kappa], want_torque=False)[0]
    ref = 2 * integrate_interval(lambda q: q * np.log1p(-np.exp(-2 * d * q)), kappa, kappa + 60 / d,
                                 QuadratureSpec(1e-12), vectorized=True) / (2 * math.pi)
    assert got == pytest.approx(ref, rel=1e-6)


def test_high_temperature_torque_is_dominated_by_first_matsubara_term(solver):
    d, phi, t = 3000.0, 0.4, 300.0
    res = solver.evaluate(CasimirPoint(d, phi, t, "matsubara"))
    k1 = MatsubaraSpec(t).kappa(1)
    first = KB * t * solver.k_integral(d * 1e-9, phi, [k1], t)[0, 1]
    assert first / res.torque == pytest.approx(1.0, abs=0.01)


@pytest.mark.slow
def test_low_temperature_sum_approaches_quantum_integral():
    solver = LifshitzSolver(ConstantSheet(0.5, 3.0))
    mats = solver.evaluate(CasimirPoint(100.0, 0.4, 1.0, "matsubara"))
    quantum = solver.evaluate(CasimirPoint(100.0, 0.4, 0.0, "quantum"))
    assert mats.energy == pytest.approx(quantum.energy, rel=1e-2)
    assert mats.n_terms >= 20 / (MatsubaraSpec(1.0).kappa(1) * 100e-9)
