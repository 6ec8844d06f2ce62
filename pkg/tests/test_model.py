import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from magnomech import model
from magnomech.constants import TWO_PI
from magnomech.errors import DegenerateParametersError, DomainError, NotApplicableError
from magnomech.model import DirectCoupling, PhysicalDrive, SystemParams
from magnomech.presets import fig2_params

GAMMA = TWO_PI * 28e9
WB = TWO_PI * 10e6

# mpmath at 30 digits with the same CODATA constants
N_10MHZ_10MK = 20.3406183518009968
N_10GHZ_10MK = 1.43599250121694979e-21


def test_rabi_frequency():
    assert model.rabi_frequency(0.0, 3.5e16, GAMMA) == 0.0
    assert model.rabi_frequency(3.9e-5, 3.5e16, GAMMA) == pytest.approx(7.1e14, rel=0.05)
    assert model.rabi_frequency(1e-5, 4e16, GAMMA) == pytest.approx(
        2 * model.rabi_frequency(1e-5, 1e16, GAMMA), rel=1e-14
    )
    with pytest.raises(DomainError):
        model.rabi_frequency(-1.0, 1e16, GAMMA)


def test_spin_count():
    assert model.spin_count(250e-6, 4.22e27) == pytest.approx(3.5e16, rel=0.03)
    assert model.spin_count(0.0) == 0.0
    assert model.spin_count(2e-4) == pytest.approx(8 * model.spin_count(1e-4), rel=1e-14)


def test_magnon_amplitude_zero_drive(fig2):
    assert model.magnon_amplitude_exact(fig2, 0.0) == 0
    assert model.magnon_amplitude_approx(replace(fig2, delta_a=0.0), 7e14) == 0


def test_magnon_amplitude_fig2(fig2):
    exact = model.magnon_amplitude_exact(fig2, 7.1e14)
    assert abs(exact) == pytest.approx(1.1e7, rel=0.10)
    approx = model.magnon_amplitude_approx(fig2, 7.1e14)
    assert approx.real == 0.0
    # direct scalar evaluation: Omega * omega_b / (g_ma**2 + 0.9 omega_b**2)
    g = TWO_PI * 3.2e6
    expected = 7.1e14 * WB / (g * g + 0.9 * WB * WB)
    assert abs(approx) == pytest.approx(expected, rel=1e-12)
    assert abs(approx) == pytest.approx(1.13e7, rel=0.01)


def test_magnon_amplitude_small_kappa_limit(fig2):
    p = replace(fig2, kappa_a=1e-6, kappa_m=1e-6)
    exact = model.magnon_amplitude_exact(p, 7.1e14)
    approx = model.magnon_amplitude_approx(p, 7.1e14)
    assert model.relative_difference(exact, approx) < 1e-6


def test_magnon_amplitude_degenerate(fig2):
    g = fig2.g_ma
    p = replace(fig2, delta_a=g, delta_m_eff=g)
    with pytest.raises(DegenerateParametersError):
        model.magnon_amplitude_approx(p, 1e14)


def test_effective_coupling():
    assert model.effective_coupling(1.0, 0) == 0
    g = model.effective_coupling(TWO_PI * 0.2, 1.13e7)
    assert g / TWO_PI == pytest.approx(3.2e6, rel=0.05)


def test_effective_coupling_large_detuning_formula(fig2_physical):
    d = model.derive(fig2_physical)
    drive = fig2_physical.coupling
    approx = math.sqrt(2) * drive.g_mb * d.rabi_omega / fig2_physical.omega_b
    assert d.g_mb_eff == pytest.approx(approx, rel=0.05)


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 10), st.floats(1e3, 1e8), st.floats(0, math.pi))
def test_effective_coupling_linear(g, m, phi):
    z = m * complex(math.cos(phi), math.sin(phi))
    base = model.effective_coupling(g, z)
    assert model.effective_coupling(2 * g, z) == pytest.approx(2 * base, rel=1e-14, abs=1e-300)
    assert model.effective_coupling(g, 3 * z) == pytest.approx(3 * base, rel=1e-14, abs=1e-300)


def test_thermal_occupation():
    assert model.thermal_occupation(WB, 0.0) == 0.0
    assert model.thermal_occupation(WB, 0.01) == pytest.approx(N_10MHZ_10MK, rel=1e-12)
    n = model.thermal_occupation(TWO_PI * 10e9, 0.01)
    assert n < 1e-20
    assert n == pytest.approx(N_10GHZ_10MK, rel=1e-10)
    with pytest.raises(DomainError):
        model.thermal_occupation(0.0, 1.0)


@settings(max_examples=100, deadline=None)
@given(st.floats(1e5, 1e11), st.floats(1e-3, 10), st.floats(1.01, 3))
def test_thermal_occupation_monotone(w, t, f):
    n = model.thermal_occupation(w, t)
    assert model.thermal_occupation(w, t * f) >= n
    assert model.thermal_occupation(w * f, t) <= n


def test_drift_decoupled():
    a = model.drift_from_rates(0, 0, 0.1, 0.2, 0, 0, 1.0, 1e-5)
    expected = np.zeros((6, 6))
    expected[0, 0] = expected[1, 1] = -0.1
    expected[2, 2] = expected[3, 3] = -0.2
    expected[4:, 4:] = [[0, 1], [-1, -1e-5]]
    np.testing.assert_array_equal(a, expected)


def test_drift_layout(fig2):
    g = fig2.coupling.g_mb_eff
    a = model.drift_matrix(fig2, g)
    w = fig2.omega_b
    # 1-based (row, column) positions of the drift matrix
    assert a[5, 3] == pytest.approx(g / w)
    assert a[2, 4] == pytest.approx(-g / w)
    assert a[2, 3] == pytest.approx(fig2.delta_m_eff / w)
    assert a[3, 2] == pytest.approx(-fig2.delta_m_eff / w)
    assert a[0, 1] == pytest.approx(fig2.delta_a / w)
    assert a[1, 0] == -a[0, 1]
    assert a[4, 5] == 1.0 and a[5, 4] == -1.0
    assert not np.array_equal(a, a.T)


RATE_NAMES = ["delta_a", "delta_m_eff", "kappa_a", "kappa_m", "g_ma", "g_mb_eff", "omega_b", "gamma_b"]


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=8, max_size=8), st.integers(0, 7), st.floats(0.01, 1))
def test_drift_affine_in_each_rate(values, which, h):
    def build(x):
        v = list(values)
        v[which] = x
        return model.drift_from_rates(*v)

    x0 = values[which]
    second = build(x0 + 2 * h) - 2 * build(x0 + h) + build(x0)
    assert np.abs(second).max() < 1e-12


def test_diffusion(fig2):
    zero = replace(fig2, temperature=0.0)
    d0 = model.diffusion_matrix(zero, model.derive(zero))
    w = fig2.omega_b
    expected = np.diag([fig2.kappa_a, fig2.kappa_a, fig2.kappa_m, fig2.kappa_m, 0, fig2.gamma_b]) / w
    np.testing.assert_allclose(d0, expected, rtol=1e-15)
    d = model.diffusion_matrix(fig2, model.derive(fig2))
    assert d[4, 4] == 0.0
    assert d[5, 5] == pytest.approx(fig2.gamma_b * (2 * N_10MHZ_10MK + 1) / w, rel=1e-12)
    assert np.count_nonzero(d - np.diag(np.diag(d))) == 0
    assert np.all(np.diag(d) >= 0)


def test_stability_check(fig2):
    assert model.stability_check(model.drift_from_rates(0, 0, 0.1, 0.1, 0, 0, 1, 1e-4)).stable
    undamped = model.stability_check(model.drift_from_rates(0.5, 0.4, 0, 0, 0.3, 0.2, 1, 0))
    assert not undamped.stable
    assert undamped.max_real_part >= -1e-12
    verdict = model.stability_check(model.drift_matrix(fig2, fig2.coupling.g_mb_eff))
    assert verdict.stable
    assert verdict.max_real_part == pytest.approx(-0.04023046712582656, rel=1e-10)


def test_validity_fig2(fig2_physical):
    d = model.derive(fig2_physical)
    v = d.validity
    assert d.magnon_occupation == pytest.approx(1.2e14, rel=0.15)
    assert 2.5 * 2 * d.n_spins == pytest.approx(1.8e17, rel=0.05)
    assert v.low_excitation_ratio == pytest.approx(6.7e-4, rel=0.15)
    assert v.kerr_coefficient / TWO_PI == pytest.approx(6.4e-9, rel=1e-12)
    assert v.kerr_term == pytest.approx(5.7e13, rel=0.15)
    assert v.kerr_ratio == pytest.approx(0.08, rel=0.1)
    assert v.low_excitation_ok and v.kerr_ok and not v.no_drive


def test_validity_no_drive(fig2_physical):
    p = replace(fig2_physical, coupling=replace(fig2_physical.coupling, b0=0.0))
    v = model.derive(p).validity
    assert v.no_drive and v.kerr_ratio is None
    assert v.low_excitation_ratio == 0 and v.ok


def test_validity_not_applicable_in_direct_mode(fig2):
    with pytest.raises(NotApplicableError):
        model.validity_report(fig2, model.derive(fig2))


@settings(max_examples=30, deadline=None)
@given(st.floats(1e-7, 1e-3), st.floats(1.01, 10))
def test_validity_ratios_monotone_in_field(b0, f):
    base = fig2_params("physical")
    lo = model.derive(replace(base, coupling=replace(base.coupling, b0=b0))).validity
    hi = model.derive(replace(base, coupling=replace(base.coupling, b0=b0 * f))).validity
    assert hi.low_excitation_ratio > lo.low_excitation_ratio
    assert hi.kerr_ratio > lo.kerr_ratio


@settings(max_examples=100, deadline=None)
@given(
    st.floats(100, 1e4), st.floats(100, 1e4), st.floats(0.1, 1), st.floats(0.1, 1),
    st.booleans(), st.booleans(), st.floats(0, 3),
)
def test_exact_converges_to_approx(da, dm, ka, km, sa, sm, g):
    # |detuning| >= 100 kappa regime
    wb = 1.0
    p = SystemParams(
        omega_a=1e3, omega_b=wb, delta_a=da if sa else -da, delta_m_eff=dm if sm else -dm,
        kappa_a=ka, kappa_m=km, gamma_b=1e-4, g_ma=g + 0.01, temperature=0.0,
    )
    exact = model.magnon_amplitude_exact(p, 1.0)
    approx = model.magnon_amplitude_approx(p, 1.0)
    bound = 10 * max(ka, km) / min(da, dm)
    assert model.relative_difference(exact, approx) < bound


def test_derive_invariants(fig2_physical):
    d = model.derive(fig2_physical)
    assert d.rabi_omega >= 0 and d.n_spins > 0 and d.g_mb_eff >= 0
    assert d.q_mean == pytest.approx(-fig2_physical.coupling.g_mb / fig2_physical.omega_b * abs(d.m_mean) ** 2)
    assert d.q_mean <= 0
    assert d.g_mb_eff / TWO_PI == pytest.approx(3.2e6, rel=0.05)


def test_direct_mode_derive(fig2):
    d = model.derive(fig2)
    assert d.g_mb_eff == fig2.coupling.g_mb_eff
    assert d.rabi_omega is None and d.validity is None
    assert d.n_therm_b == pytest.approx(N_10MHZ_10MK, rel=1e-12)


@pytest.mark.parametrize(
    "field, value",
    [("kappa_a", -1.0), ("omega_b", 0.0), ("temperature", -0.1), ("gamma_b", TWO_PI * 1e6), ("delta_a", math.nan)],
)
def test_params_validation(fig2, field, value):
    with pytest.raises(DomainError, match=field):
        replace(fig2, **{field: value})


def test_coupling_validation():
    with pytest.raises(DomainError, match="g_mb_eff"):
        DirectCoupling(-1.0)
    with pytest.raises(DomainError, match="sphere_diameter"):
        PhysicalDrive(b0=1e-5, g_mb=1.0, sphere_diameter=0.0)
