from __future__ import annotations

import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from casimir_cnt.constants import ALPHA, C, EV, HBAR, KB
from casimir_cnt.swcnt import (
    Chirality,
    ConductivityTable,
    ElectronicParams,
    InterbandModel,
    InterbandResponse,
    Oscillator,
    SpectralPoint,
    read_conductivity_table,
    sigma_inter_imag_axis,
    sigma_inter_real_axis,
    sigma_intra,
    sigma_intra_dk,
    tb_subbands,
    tb_transitions,
    thermal_intra_factor,
    thermal_intra_factor_dk,
    translation_period,
    tube_radius,
    write_conductivity_table,
)

EP = ElectronicParams()
CH = Chirality(12, 0)


def radius_oracle(n, m, bond=0.142):
    a = bond * math.sqrt(3.0)
    return a * math.sqrt(n * n + n * m + m * m) / (2 * math.pi)


@pytest.mark.parametrize("n, m, expected", [(12, 0, 0.4697), (1, 0, 0.03914)])
def test_tube_radius(n, m, expected):
    r = tube_radius(Chirality(n, m))
    assert r == pytest.approx(radius_oracle(n, m), rel=1e-14)
    assert r == pytest.approx(expected, abs=1e-4)


@pytest.mark.parametrize("n, m", [(0, 0), (3, 4), (2, -1)])
def test_invalid_chirality(n, m):
    with pytest.raises(ValueError):
        Chirality(n, m)


def test_metallicity_rule():
    assert Chirality(12, 0).metallic
    assert not Chirality(13, 0).metallic
    assert Chirality(10, 10).metallic


def test_spectral_point_validation():
    with pytest.raises(ValueError):
        SpectralPoint(k_y=-1.0, frequency=1.0)
    with pytest.raises(ValueError):
        SpectralPoint(k_y=1.0, frequency=1.0, axis="complex")


# ---------------------------------------------------------------- intraband

def intra_oracle(xi, k):
    # Gaussian 2 alpha c v_F / (pi^2 R) * (xi + 1/tau) / ((xi + 1/tau)^2 + (v_F k)^2), reduced by 2 pi / c
    pref = 2 * ALPHA * C * EP.v_fermi / (math.pi**2 * CH.radius)
    g = xi + 1 / EP.tau
    return 2 * math.pi / C * pref * g / (g * g + (EP.v_fermi * k) ** 2)


def test_intra_dc_value():
    pref = 2 * math.pi / C * 2 * ALPHA * C * EP.v_fermi / (math.pi**2 * CH.radius)
    assert sigma_intra(0.0, 0.0, CH, EP) == pytest.approx(pref * EP.tau, rel=1e-14)


def test_intra_reference_point():
    k, xi = 1 / CH.radius, 1 / EP.tau
    assert sigma_intra(xi, k, CH, EP) == pytest.approx(intra_oracle(xi, k), rel=1e-14)


def test_intra_large_xi():
    xi = 1e22
    assert sigma_intra(xi, 0.0, CH, EP) * xi == pytest.approx(intra_oracle(xi, 0.0) * xi, rel=1e-12)


def test_intra_grid_monotone():
    xi = np.geomspace(1e11, 1e17, 10)[:, None]
    k = np.geomspace(1e5, 1e10, 10)[None, :]
    s = sigma_intra(xi, k, CH, EP)
    assert np.all(s > 0)
    assert np.all(np.diff(s, axis=1) < 0)
    # g / (g^2 + (v k)^2) with g = xi + 1/tau decreases in xi only once g exceeds v_F k
    damped = (xi[:-1] + 1 / EP.tau) >= EP.v_fermi * k
    assert np.all(np.diff(s, axis=0)[damped] < 0)
    assert np.any(np.diff(s, axis=0)[~damped] > 0)


def test_intra_derivative():
    k = np.array([1e7, 1e8, 1e9])
    h = 1e-4 * k
    fd = (sigma_intra(1e14, k + h, CH, EP) - sigma_intra(1e14, k - h, CH, EP)) / (2 * h)
    np.testing.assert_allclose(sigma_intra_dk(1e14, k, CH, EP), fd, rtol=1e-6)


# ---------------------------------------------------------------- thermal factor

def fermi_mean_oracle(eps, t, mu):
    # mean occupation over [0, eps] by direct quadrature of the Fermi function
    kt = KB * t / EV
    f = lambda e: 0.5 * (1.0 - math.tanh((e - mu) / (2 * kt)))
    val, _ = quad(f, 0.0, eps, epsabs=0, epsrel=1e-12, points=[mu] if 0 < mu < eps else None, limit=200)
    return val / eps


def k_of(eps):
    return eps * EV / (HBAR * EP.v_fermi)


def test_zero_temperature_recovery():
    assert thermal_intra_factor(k_of(0.25), 1.0, 0.5) == pytest.approx(1.0, abs=1e-12)
    ks = k_of(np.linspace(0.01, 0.45, 20))
    np.testing.assert_allclose(thermal_intra_factor(ks, 1.0, 0.5), 1.0, atol=1e-3)


@pytest.mark.parametrize("eps, t, mu", [(0.02, 3000.0, 0.01), (0.3, 300.0, 0.5), (0.7, 300.0, 0.5),
                                        (1e-3, 10.0, 0.5), (0.05, 1e4, 0.0)])
def test_fermi_form_against_quadrature(eps, t, mu):
    assert thermal_intra_factor(k_of(eps), t, mu) == pytest.approx(fermi_mean_oracle(eps, t, mu), rel=1e-9)


def test_degenerate_limit():
    assert thermal_intra_factor(k_of(0.1), 300.0, 50.0) == pytest.approx(1.0, rel=1e-12)


def test_printed_convention_agrees_below_mu_and_is_singular_at_mu():
    k = k_of(0.2)
    assert thermal_intra_factor(k, 20.0, 0.5, convention="printed") == pytest.approx(
        thermal_intra_factor(k, 20.0, 0.5), rel=1e-6)
    with np.errstate(divide="ignore"):
        assert np.isinf(thermal_intra_factor(k_of(0.5), 300.0, 0.5, convention="printed"))


def test_thermal_factor_errors():
    with pytest.raises(ValueError):
        thermal_intra_factor(1e8, 0.0, 0.5)
    with pytest.raises(ValueError):
        thermal_intra_factor(1e8, 10.0, 0.5, convention="other")


@settings(max_examples=100, deadline=None)
@given(st.floats(1e-4, 3.0), st.floats(1.0, 3000.0), st.floats(-0.5, 1.0))
def test_thermal_factor_bounds(eps, t, mu):
    f = thermal_intra_factor(k_of(eps), t, mu)
    assert 0.0 <= f <= 1.0 + 1e-12


def test_thermal_factor_derivative():
    k = k_of(np.array([0.05, 0.3, 0.6, 1.2]))
    h = 1e-5 * k
    fd = (thermal_intra_factor(k + h, 300.0, 0.5) - thermal_intra_factor(k - h, 300.0, 0.5)) / (2 * h)
    # deep in the degenerate region dF/dk is ~1e-16 and both routes lose digits to cancellation
    np.testing.assert_allclose(thermal_intra_factor_dk(k, 300.0, 0.5), fd, rtol=1e-6, atol=1e-18)
    # small-k slope
    k0 = k_of(1e-6)
    fd0 = (thermal_intra_factor(2 * k0, 300.0, 0.5) - thermal_intra_factor(k0, 300.0, 0.5)) / k0
    assert thermal_intra_factor_dk(0.0, 300.0, 0.5) == pytest.approx(fd0, rel=1e-3)


# ---------------------------------------------------------------- tight binding

def subband_oracle(n, q, k, gamma0=2.7, bond=0.142e-9):
    cq = math.cos(q * math.pi / n)
    return gamma0 * math.sqrt(max(1 + 4 * cq * math.cos(1.5 * k * bond) + 4 * cq * cq, 0.0))


def test_subbands_match_zone_folding_formula():
    period = translation_period(CH)
    for k in np.linspace(-math.pi / period, math.pi / period, 7):
        e = tb_subbands(CH, k)
        for q in range(1, 25):
            assert e[q - 1] == pytest.approx(subband_oracle(12, q, k), abs=1e-12)


def test_metallic_and_gapped_subbands():
    assert tb_subbands(CH, 0.0)[7] == pytest.approx(0.0, abs=1e-12)  # q = 8 = 2n/3
    assert tb_subbands(CH, 0.0)[11] == pytest.approx(2.7, rel=1e-14)  # q = n
    period = translation_period(Chirality(13, 0))
    ks = np.linspace(-math.pi / period, math.pi / period, 401)
    assert tb_subbands(Chirality(13, 0), ks).min() > 0.3


def test_tight_binding_rejects_chiral_tubes_and_out_of_zone():
    with pytest.raises(ValueError):
        tb_subbands(Chirality(6, 5), 0.0)
    with pytest.raises(ValueError):
        tb_subbands(CH, 2 * math.pi / translation_period(CH))


def test_transition_velocity_against_band_slope():
    # |hbar v_cv| for the metallic subband equals the band slope hbar dE/dk there
    e, w = tb_transitions(CH, nk=400)
    assert np.all(e >= 0) and np.all(w >= 0)
    period = translation_period(CH)
    k = 1e7
    slope = (tb_subbands(CH, k + 1.0)[7] - tb_subbands(CH, k - 1.0)[7]) / 2.0  # eV m
    hv = math.sqrt(3) / 2 * 2.7 * 0.142e-9 * 1.5 * 2 / math.sqrt(3)  # gamma0 * 3b/2
    assert abs(slope) == pytest.approx(hv, rel=1e-6)


# ---------------------------------------------------------------- interband

@pytest.fixture(scope="module")
def tb_response():
    return InterbandResponse(CH, EP, InterbandModel())


def test_kubo_transform_matches_closed_form(tb_response):
    xi = np.array([1e13, 1e14, 1e15, 5e15, 2e16])
    np.testing.assert_allclose(tb_response.imag_axis(xi), tb_response.imag_axis_closed_form(xi), rtol=1e-4)


def test_kubo_real_axis_is_passive_and_peaked(tb_response):
    x = np.linspace(0.2, 6.0, 300)
    s = tb_response.real_axis(x * EV / HBAR)
    assert np.all(s.real >= 0)
    assert 1.5 < x[np.argmax(s.real[x < 3.0])] < 3.0


def test_imag_axis_positive_and_scaled_decreasing(tb_response):
    xi = np.geomspace(1e12, 1e17, 30)
    s = tb_response.imag_axis(xi)
    assert np.all(s > 0)
    assert np.all(np.diff(s / xi) <= 0)


def test_oscillator_model_closed_form_and_small_xi():
    osc = (Oscillator(1.5, 0.3, 0.1), Oscillator(2.6, 0.5, 0.2))
    resp = InterbandResponse(CH, EP, InterbandModel("lorentz_oscillators", osc))
    xi = np.geomspace(1e12, 3e16, 12)
    kk = resp.imag_axis(xi)
    np.testing.assert_allclose(kk, resp.imag_axis_closed_form(xi), rtol=5e-4)
    assert np.all(np.diff(kk / xi) <= 0)
    y = 1e12 * HBAR / EV
    small = sum(o.strength * o.width_ev / o.center_ev**2 for o in osc) * y
    assert resp.imag_axis(1e12) == pytest.approx(small, rel=1e-3)


def test_zero_strength_model_warns_and_vanishes():
    with pytest.warns(UserWarning):
        resp = InterbandResponse(CH, EP, InterbandModel("lorentz_oscillators", ()))
    pt_r = SpectralPoint(0.0, 1e15, "real")
    pt_i = SpectralPoint(0.0, 1e15, "imag")
    assert sigma_inter_real_axis(pt_r, resp) == 0
    assert sigma_inter_imag_axis(pt_i, resp) == 0
    with pytest.raises(ValueError):
        sigma_inter_real_axis(pt_i, resp)


def test_table_roundtrip_and_transform(tmp_path):
    osc = Oscillator(2.0, 0.4, 0.15)
    x = np.linspace(0.0, 10.0, 4001)
    s = osc.strength * (-1j * x * osc.width_ev) / (osc.center_ev**2 - x * x - 1j * x * osc.width_ev)
    path = tmp_path / "sigma.csv"
    write_conductivity_table(path, x, s.real, s.imag)
    table = read_conductivity_table(path)
    np.testing.assert_array_equal(table.omega_ev, x)
    resp = InterbandResponse(CH, EP, InterbandModel("tabulated", table=table))
    ref = InterbandResponse(CH, EP, InterbandModel("lorentz_oscillators", (osc,)))
    xi = np.array([1e14, 1e15, 3e15])
    np.testing.assert_allclose(resp.imag_axis(xi), ref.imag_axis_closed_form(xi), rtol=2e-3)


def test_table_errors(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("w,re,im\n1,2,3\n")
    with pytest.raises(ValueError):
        read_conductivity_table(bad)
    with pytest.raises(ValueError):
        ConductivityTable((1.0, 0.5), (0.0, 0.0), (0.0, 0.0))
    with pytest.raises(ValueError):
        ConductivityTable((0.0, 1.0), (-1.0, 0.0), (0.0, 0.0))
    with pytest.raises(ValueError):
        InterbandModel("tabulated")
