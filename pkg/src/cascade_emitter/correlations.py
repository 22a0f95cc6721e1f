"""Second-order cross correlations of the photon pair in time and frequency.

Step functions are right-continuous: theta(0) = 1. The second, negative-delay
term of g2_cross_time uses the complementary step (tau < 0) so that tau = 0
is not counted twice.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from ._parallel import fill_grid
from .amplitudes import JointSpectralAmplitude
from .params import EmitterParams

TIME_DOMAIN = "time_t_tau"
FREQ_DOMAIN = "freq_w_wprime"


def step(x):
    """Heaviside step with step(0) = 1."""
    return (np.asarray(x, dtype=float) >= 0).astype(float)


def psi2(t, tau, p: EmitterParams):
    """Two-photon detection amplitude for the upper photon at t and the lower at t + tau."""
    t = np.asarray(t, dtype=float)
    tau = np.asarray(tau, dtype=float)
    pref = -p.scale / math.pi * math.sqrt(p.gamma_alpha * p.gamma_beta)
    # clip inside the exponentials so the masked region cannot overflow
    tc = np.maximum(t, 0.0)
    uc = np.maximum(tau, 0.0)
    first = np.exp(-(1j * (p.omega_alpha + p.omega_beta) + p.gamma_alpha) * tc)
    second = np.exp(-(1j * p.omega_beta + p.gamma_beta) * uc)
    return pref * first * step(t) * second * step(tau)


def _cross_prefactor(p):
    return p.gamma_alpha * p.gamma_beta / math.pi**2 * (p.ratio - 1.0)


def g2_cross_time(t, tau, p: EmitterParams):
    """Normalized cross correlation for detections at t and t + tau."""
    t = np.asarray(t, dtype=float)
    tau = np.asarray(tau, dtype=float)
    ga, gb = p.gamma_alpha, p.gamma_beta
    pref = p.scale**2 * _cross_prefactor(p)
    # every exponent below is <= 0 on its own support; clip elsewhere
    pos = step(tau) * step(t) * np.exp(-2 * ga * np.maximum(t, 0) - 2 * gb * np.maximum(tau, 0))
    neg_tau = np.minimum(tau, 0)
    neg = ((tau < 0) * step(t + tau)
           * np.exp(2 * (gb - ga) * neg_tau - 2 * ga * np.maximum(t, -neg_tau)))
    return pref * (pos + neg)


def g2_cross_tau(tau, p: EmitterParams):
    """Delay-only cross correlation, even in tau with decay rate 2 gamma_beta."""
    tau = np.asarray(tau, dtype=float)
    return p.scale / math.pi * p.gamma_beta * (p.ratio - 1.0) * np.exp(-2 * p.gamma_beta * np.abs(tau))


def g2_time_integral(tau: float, p: EmitterParams, window: float | None = None) -> float:
    """Integral of g2_cross_time over detection time t in [-window, window].

    The window defaults to 50 / gamma_alpha. Analytically the result is
    (scale / (2 pi)) * g2_cross_tau(tau): the time-domain and delay-only
    closed forms differ by that constant.
    """
    if window is None:
        window = 50.0 / p.gamma_alpha
    lo = max(-window, -tau if tau < 0 else 0.0)
    if lo >= window:
        return 0.0
    # the integrand is a single exponential in t on [lo, window]
    val, _ = quad(lambda t: float(g2_cross_time(t, tau, p)), lo, window, limit=200,
                  epsabs=0.0, epsrel=1e-12)
    return val


def g2_cross_freq(omega, omega_prime, p: EmitterParams):
    """Frequency-domain cross correlation; sign follows gamma_beta / gamma_alpha - 1."""
    ga, gb = p.gamma_alpha, p.gamma_beta
    s = np.asarray(omega, dtype=float) + np.asarray(omega_prime, dtype=float) - p.omega_alpha - p.omega_beta
    y = np.asarray(omega_prime, dtype=float) - p.omega_beta
    return _cross_prefactor(p) * (4 * ga * gb + s * y) / ((s**2 + 4 * ga**2) * (y**2 + 4 * gb**2))


@dataclass(frozen=True, eq=False)
class G2Surface:
    """Real surface values[i, j] at (axis1[i], axis2[j])."""

    axis1: np.ndarray
    axis2: np.ndarray
    values: np.ndarray
    domain_tag: str

    @property
    def log_scale_hint(self) -> bool:
        return self.domain_tag == FREQ_DOMAIN


def g2_time_surface(t_axis, tau_axis, p: EmitterParams, threads=1) -> G2Surface:
    vals = fill_grid(lambda t, u: g2_cross_time(t, u, p), t_axis, tau_axis, threads, dtype=float)
    return G2Surface(np.asarray(t_axis, float), np.asarray(tau_axis, float), vals, TIME_DOMAIN)


def g2_freq_surface(omega_axis, omega_prime_axis, p: EmitterParams, threads=1) -> G2Surface:
    vals = fill_grid(lambda w, v: g2_cross_freq(w, v, p), omega_axis, omega_prime_axis, threads, dtype=float)
    return G2Surface(np.asarray(omega_axis, float), np.asarray(omega_prime_axis, float), vals, FREQ_DOMAIN)


# ---------------------------------------------------------------------------
# mode-sum routes on a sampled pair amplitude


def _field_phases(jsa, t, tau):
    ek = np.exp(-1j * jsa.omega_k * t) * np.sqrt(jsa.grid_k.weights) / (2 * math.pi)
    eq = np.exp(-1j * jsa.omega_q * (t + tau)) * np.sqrt(jsa.grid_q.weights) / (2 * math.pi)
    return ek, eq


def detection_amplitude(jsa: JointSpectralAmplitude, t: float, tau: float) -> complex:
    """<0| E_alpha(t) E_beta(t + tau) |pair> as a sum over the sampled modes.

    Each field is sum_k a_k sqrt(dw_k) exp(-i w_k t) / (2 pi), which makes
    the sum converge to psi2(t, tau) at scale 1 as the grid is refined and
    widened.
    """
    a = jsa.weighted()
    ek, eq = _field_phases(jsa, t, tau)
    return complex(ek @ a @ eq)


def detection_density(jsa: JointSpectralAmplitude, t: float, tau: float) -> float:
    """<pair| E-(t) E-(t+tau) E+(t+tau) E+(t) |pair> from the full pair density matrix.

    Sums rho[(k,q),(k',q')] against the four field phases without using
    the vacuum-projector shortcut, as an independent route to |amplitude|^2.
    """
    a = jsa.weighted().ravel()
    ek, eq = _field_phases(jsa, t, tau)
    phase = np.outer(ek, eq).ravel()
    rho = np.outer(a, a.conj())
    return float((phase @ rho @ phase.conj()).real)
