import math

import numpy as np
import pytest

from cascade_emitter.amplitudes import build_jsa
from cascade_emitter.correlations import (FREQ_DOMAIN, TIME_DOMAIN, detection_amplitude,
                                          detection_density, g2_cross_freq, g2_cross_tau,
                                          g2_cross_time, g2_freq_surface, g2_time_integral,
                                          g2_time_surface, psi2, step)
from cascade_emitter.params import EmitterParams, FrequencyGrid, default_params


def test_step_right_continuous():
    assert np.array_equal(step([-1e-300, 0.0, 2.0]), [0.0, 1.0, 1.0])


def test_g2_time_zero_delay_counted_once():
    p = default_params(40)
    t = 3.0
    pref = p.gamma_alpha * p.gamma_beta / math.pi**2 * (p.ratio - 1)
    assert g2_cross_time(t, 0.0, p) == pytest.approx(pref * math.exp(-2 * p.gamma_alpha * t), rel=1e-14)


def test_g2_time_support():
    p = default_params(40)
    assert g2_cross_time(-1.0, 2.0, p) == 0.0
    # lower photon detected before t = 0
    assert g2_cross_time(1.0, -2.0, p) == 0.0
    assert g2_cross_time(3.0, -2.0, p) > 0.0


def test_g2_time_no_overflow_far_outside_support():
    p = default_params(40)
    v = g2_cross_time(np.array([-1e6, 1e6, 5.0]), np.array([1e6, -1e6, -1e6]), p)
    assert np.all(np.isfinite(v))


def test_g2_time_continuous_at_zero_delay():
    p = default_params(5)
    t = 20.0
    assert g2_cross_time(t, -1e-12, p) == pytest.approx(g2_cross_time(t, 0.0, p), rel=1e-9)


def test_g2_tau_even_and_decays_at_twice_gamma_beta():
    p = default_params(20)
    tau = np.linspace(0, 40, 9)
    assert np.array_equal(g2_cross_tau(tau, p), g2_cross_tau(-tau, p))
    assert g2_cross_tau(0.0, p) == pytest.approx(p.gamma_beta * (p.ratio - 1) / math.pi, rel=1e-14)
    assert g2_cross_tau(10.0, p) / g2_cross_tau(0.0, p) == pytest.approx(math.exp(-20 * p.gamma_beta), rel=1e-12)


def test_equal_rates_give_no_cross_correlation():
    p = default_params(1)
    assert g2_cross_tau(3.0, p) == 0.0
    assert g2_cross_time(4.0, 1.0, p) == 0.0
    assert g2_cross_freq(1.6, 3.4, p) == 0.0


@pytest.mark.parametrize("ratio, scale", [(40.0, 1.0), (5.0, 1.0), (0.5, 1.0), (20.0, 3.0)])
@pytest.mark.parametrize("tau", [-30.0, -1.0, 0.0, 2.0, 25.0])
def test_time_average_recovers_delay_form(ratio, scale, tau):
    p = EmitterParams(0.005, 0.005 * ratio, 1.5, 3.5, scale)
    avg = g2_time_integral(tau, p) * 2 * math.pi / p.scale
    assert avg == pytest.approx(float(g2_cross_tau(tau, p)), rel=1e-2)
    assert avg == pytest.approx(float(g2_cross_tau(tau, p)), rel=1e-9)


def test_g2_freq_sign_follows_rate_ratio():
    for ratio, sign in ((40.0, 1), (0.5, -1)):
        p = default_params(ratio)
        assert np.sign(g2_cross_freq(p.omega_alpha, p.omega_beta, p)) == sign


@pytest.mark.parametrize("ratio", [40.0, 5.0, 0.5])
def test_g2_freq_ridge_lies_on_antidiagonal(ratio):
    p = default_params(ratio)
    ga, gb = p.gamma_alpha, p.gamma_beta
    s = np.linspace(-40 * ga, 40 * ga, 801)
    for y in np.linspace(-5 * gb, 5 * gb, 41):
        row = np.abs(g2_cross_freq(p.omega_alpha + s - y, p.omega_beta + y, p))
        assert abs(s[np.argmax(row)]) <= 2 * ga + 1e-12


def test_psi2_support_and_magnitude():
    p = default_params(40)
    assert psi2(-1.0, 1.0, p) == 0 and psi2(1.0, -1.0, p) == 0
    t, tau = 10.0, 3.0
    expected = math.sqrt(p.gamma_alpha * p.gamma_beta) / math.pi * math.exp(-p.gamma_alpha * t - p.gamma_beta * tau)
    assert abs(psi2(t, tau, p)) == pytest.approx(expected, rel=1e-14)


def test_mode_sum_converges_to_psi2():
    p = default_params(1)
    gk = FrequencyGrid.centered(p.omega_alpha, 160 * (p.gamma_alpha + p.gamma_beta), 1601)
    gq = FrequencyGrid.centered(p.omega_beta, 160 * p.gamma_beta, 1601)
    jsa = build_jsa(p, gk, gq)
    for t, tau in ((50.0, 30.0), (100.0, 100.0), (50.0, -30.0)):
        err = abs(detection_amplitude(jsa, t, tau) - psi2(t, tau, p))
        assert err <= 2e-2 * abs(psi2(t, abs(tau), p))


def test_detection_density_equals_squared_amplitude():
    p = default_params(5)
    gk = FrequencyGrid.centered(p.omega_alpha, 5 * (p.gamma_alpha + p.gamma_beta), 16)
    gq = FrequencyGrid.centered(p.omega_beta, 5 * p.gamma_beta, 16)
    jsa = build_jsa(p, gk, gq)
    for t, tau in ((0.0, 0.0), (10.0, 5.0), (30.0, -4.0)):
        amp = detection_amplitude(jsa, t, tau)
        assert detection_density(jsa, t, tau) == pytest.approx(abs(amp) ** 2, rel=1e-6)


def test_surfaces_shape_tags_and_threads():
    p = default_params(40)
    t = np.linspace(0, 100, 37)
    tau = np.linspace(-50, 50, 21)
    s1 = g2_time_surface(t, tau, p)
    s4 = g2_time_surface(t, tau, p, threads=4)
    assert s1.values.shape == (37, 21) and s1.domain_tag == TIME_DOMAIN and not s1.log_scale_hint
    assert s1.values.tobytes() == s4.values.tobytes()
    assert np.array_equal(s1.values, g2_cross_time(t[:, None], tau[None, :], p))
    w = np.linspace(1.4, 1.6, 19)
    wp = np.linspace(3.4, 3.6, 23)
    f = g2_freq_surface(w, wp, p, threads=3)
    assert f.domain_tag == FREQ_DOMAIN and f.log_scale_hint
    assert np.array_equal(f.values, g2_cross_freq(w[:, None], wp[None, :], p))
