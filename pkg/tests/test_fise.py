import math
from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from scipy import integrate

from helpers import random_instance
from udncap.channel import ChannelInstance, FadingParams, LogBase, sinr_trace
from udncap.fise import (PANEL_ORDER, RegimeError, SpectralParams, _bulk_integral, cm2_integral, fise_capacity,
                         fise_from_trace, lsd_density, lsd_mass, spectral_params, spike_estimates)

unit = st.floats(0.01, 0.99)


def test_spectral_params_half_half():
    sp = SpectralParams(0.5, 0.5)
    assert sp.mu == pytest.approx(1.224744871391589, rel=1e-14)
    assert sp.a_m == pytest.approx(0.2020410288672876, rel=1e-12)
    assert sp.b_m == pytest.approx(19.79795897113271, rel=1e-12)


def test_spectral_params_marchenko_pastur_limit():
    sp = SpectralParams(1.0, 1e-12)
    assert sp.mu == pytest.approx(1.0)
    assert sp.a_m == pytest.approx(0.0, abs=1e-20)
    assert sp.b_m == pytest.approx(4.0, rel=1e-10)


def test_spectral_params_from_counts():
    sp = spectral_params(100, 50, 5000)
    assert sp.beta_m == 0.5
    assert sp.y_m == pytest.approx(0.020202020202020204, rel=1e-15)


def test_spectral_params_errors():
    with pytest.raises(RegimeError, match="closed-form"):
        spectral_params(10, 11, 1000)
    with pytest.raises(RegimeError, match="too small"):
        spectral_params(10, 5, 15)
    sp = spectral_params(10, 11, 1000, allow_beta_above_one=True)
    assert sp.beta_m == 1.1


@given(unit, unit)
def test_spectral_invariants(beta, y):
    sp = SpectralParams(beta, y)
    assert 0 <= sp.a_m < sp.b_m


def test_density_endpoints_and_outside():
    sp = SpectralParams(0.5, 0.5)
    assert lsd_density(sp.a_m, sp) == 0.0
    assert lsd_density(sp.b_m, sp) == 0.0
    assert np.all(lsd_density(np.array([-1.0, 0.0, sp.a_m / 2, sp.b_m + 1, 1e9]), sp) == 0.0)


@given(unit, unit, st.floats(-10, 200))
def test_density_nonnegative(beta, y, x):
    assert lsd_density(x, SpectralParams(beta, y)) >= 0.0


def test_mass_matches_adaptive_oracle():
    sp = SpectralParams(0.5, 0.5)
    ref, _ = integrate.quad(lambda x: lsd_density(x, sp), sp.a_m, sp.b_m, epsabs=1e-13, limit=200)
    assert ref == pytest.approx(0.5, abs=1e-8)
    assert lsd_mass(sp) == pytest.approx(0.5, abs=1e-10)


@given(st.floats(1e-3, 1 - 1e-3), st.floats(1e-3, 1 - 1e-3))
def test_mass_equals_beta(beta, y):
    assert lsd_mass(SpectralParams(beta, y)) == pytest.approx(beta, abs=1e-6)


def test_quadrature_node_doubling_converged():
    for beta, y in [(0.5, 0.5), (0.1, 0.9), (0.95, 0.05), (0.3, 0.02)]:
        sp = SpectralParams(beta, y)
        assert abs(cm2_integral(sp) - cm2_integral(sp, order=2 * PANEL_ORDER)) < 1e-8
        assert abs(lsd_mass(sp) - lsd_mass(sp, order=2 * PANEL_ORDER)) < 1e-10


def test_cm2_half_half_value():
    # independent reference: mpmath tanh-sinh at 30 digits gives 0.72912948661025558...
    sp = SpectralParams(0.5, 0.5)
    assert cm2_integral(sp) == pytest.approx(0.7291294866102556, abs=1e-6)
    ref, _ = integrate.quad(lambda x: math.log2(x) * lsd_density(x, sp), 1.0, sp.b_m, limit=200)
    assert cm2_integral(sp) == pytest.approx(ref, abs=1e-6)
    assert cm2_integral(sp, LogBase.NATS) == pytest.approx(ref * math.log(2), abs=1e-6)


def test_cm2_empty_interval():
    sp = SimpleNamespace(beta_m=0.5, y_m=0.5, a_m=0.2, b_m=0.9)
    assert cm2_integral(sp) == 0.0


@given(unit, unit)
def test_cm2_nonnegative(beta, y):
    assert cm2_integral(SpectralParams(beta, y)) >= 0.0


def test_bulk_integral_lower_limit_inside_support():
    sp = SpectralParams(0.5, 0.5)
    ref, _ = integrate.quad(lambda x: lsd_density(x, sp), 3.0, sp.b_m)
    assert _bulk_integral(np.ones_like, sp, 3.0) == pytest.approx(ref, abs=1e-10)


def test_spikes_r1():
    s = spike_estimates(7.5, 1, 123.0)
    assert s.values.tolist() == [8.5]


def test_spikes_example():
    s = spike_estimates(20.0, 2, 4.0)
    assert s.step == pytest.approx(14 / 3)
    assert s.values == pytest.approx([40 / 3, 26 / 3])


@given(st.floats(0, 1e6), st.integers(1, 500), st.floats(1.0, 50.0))
def test_spike_sum_and_spacing(trace, R, b):
    s = spike_estimates(trace, R, b)
    assume(s.separated)
    assert np.sum(s.values) == pytest.approx(R + trace, rel=1e-12)
    assert np.allclose(-np.diff(s.values), s.step, rtol=1e-9, atol=1e-9 * abs(b))
    assert np.all(np.diff(s.values) <= 0)


def test_spikes_not_separated_are_clamped():
    s = spike_estimates(0.0, 5, 4.0)
    assert not s.separated and s.step < 0
    assert np.all(s.values >= 1.0)
    assert np.all(np.diff(s.values) <= 0)


def test_spikes_reject_zero_rank():
    with pytest.raises(ValueError):
        spike_estimates(1.0, 0, 4.0)


def test_zero_gains_degenerate():
    rng = np.random.default_rng(0)
    ch = random_instance(rng, 12, 6)
    ch0 = ChannelInstance(np.zeros_like(ch.L), ch.G, ch.Xi, np.zeros(12))
    est = fise_capacity(ch0, 200, FadingParams())
    assert est.diagnostics["trace"] == 0.0
    assert est.diagnostics["degenerate"]
    assert est.diagnostics["C_m1"] == pytest.approx(np.sum(np.log2(spike_estimates(0.0, 6, est.diagnostics["b_m"]).values)) / 12)


def test_decomposition_and_diagnostics():
    rng = np.random.default_rng(1)
    ch = random_instance(rng, 20, 10)
    p = FadingParams()
    est = fise_capacity(ch, 400, p)
    d = est.diagnostics
    assert est.method == "fise"
    assert est.value == d["C_m1"] + d["C_m2"]
    assert d["trace"] == sinr_trace(ch, p)
    assert d["R"] == 10 and d["J_m"] == 20 and d["K_m"] == 10
    sp = spectral_params(20, 10, 400)
    assert d["C_m2"] == cm2_integral(sp)
    assert d["a_m"] == sp.a_m and d["b_m"] == sp.b_m


def test_work_is_linear_in_rank():
    # fixed (beta_m, y_m) across the ladder: quadrature size is constant, spikes add R
    fixed = []
    for J in (32, 64, 128, 256):
        est = fise_from_trace(1e4, J, J // 2, 20 * J + J // 2)
        fixed.append(est.diagnostics["n_log_evals"] - J // 2)
    assert len(set(fixed)) == 1 and fixed[0] <= 40 * PANEL_ORDER


@given(st.floats(0, 1e5), st.floats(0, 1e5), st.integers(1, 100), st.integers(0, 100))
def test_c1_monotone_in_trace(t1, t2, R, extra):
    J = R + extra
    lo, hi = sorted((t1, t2))
    a = fise_from_trace(lo, J, R, 10 * J + 10).diagnostics["C_m1"]
    b = fise_from_trace(hi, J, R, 10 * J + 10).diagnostics["C_m1"]
    assert b >= a - 1e-12
