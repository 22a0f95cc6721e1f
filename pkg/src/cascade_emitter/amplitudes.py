"""Cascade emission amplitudes: closed forms, joint spectral amplitude and an
equation-of-motion integrator that serves as their oracle.

Amplitudes use continuum normalization: the coupling of the upper
transition is g_alpha = sqrt(gamma_alpha / pi) per unit frequency (likewise
for beta), so the long-time pair amplitude integrates to one,
    integral |eta(w_k, w_q)|^2 dw_k dw_q = 1.
A discrete mode of width dw carries amplitude eta * sqrt(dw) per photon.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._parallel import fill_grid
from .params import EmitterParams, FrequencyGrid, LorentzianGrid, TimeGrid

# |denominator| below which the removable singularity is taken by its limit
SINGULAR_TOL = 1e-9


def pair_norm(p: EmitterParams) -> float:
    """Continuum normalization constant sqrt(gamma_alpha gamma_beta) / pi."""
    return math.sqrt(p.gamma_alpha * p.gamma_beta) / math.pi


def _rate_gap(omega_k, p):
    # (w_k - w_alpha) + i (gamma_alpha - gamma_beta)
    return (np.asarray(omega_k, dtype=float) - p.omega_alpha) + 1j * (p.gamma_alpha - p.gamma_beta)


def _exp_gap_difference(d, t, log_base):
    """exp(log_base) * (exp(i d t) - 1) / d, stable for small d and for large |d t|.

    At late times exp(log_base) can underflow while exp(log_base + i d t)
    is still significant, so the large-|dt| branch adds the exponents
    before exponentiating.
    """
    d, t, log_base = np.broadcast_arrays(np.asarray(d, complex), np.asarray(t, float),
                                         np.asarray(log_base, complex))
    out = np.empty(d.shape, dtype=complex)
    x = 1j * d * t
    base = np.exp(log_base)
    tiny = np.abs(d) < SINGULAR_TOL
    small = ~tiny & (np.abs(x) < 1.0)
    large = ~(tiny | small)
    out[tiny] = base[tiny] * 1j * t[tiny]
    out[small] = base[small] * np.expm1(x[small]) / d[small]
    # only reached when |d t| >= 1, so the difference has no cancellation
    out[large] = (np.exp(log_base[large] + x[large]) - base[large]) / d[large]
    return out


def eta_e(t, p: EmitterParams):
    """Amplitude of the initially excited state, exp(-gamma_alpha t)."""
    return np.exp(-p.gamma_alpha * np.asarray(t, dtype=float)) + 0j


def eta_m(omega_k, t, p: EmitterParams):
    """Amplitude density of |m, 1_k> at time t (continuum normalized)."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("eta_m needs t >= 0")
    g = math.sqrt(p.gamma_alpha / math.pi)
    d = _rate_gap(omega_k, p)
    # exp(i dk t - ga t) - exp(-gb t) = exp(-gb t) (exp(i d t) - 1)
    return -g * _exp_gap_difference(d, t, -p.gamma_beta * t)


def eta_g(omega_k, omega_q, t, p: EmitterParams):
    """Amplitude density of |g, 1_k, 1_q> at time t (continuum normalized).

    Written as N [1 - E_q + z_q (E_s - E_q)/d] / (z_q z_s) with
    z_q = dq + i gb, z_s = dk + dq + i ga, d = z_s - z_q and E_x = exp(i z_x t),
    which equals the two-bracket form but has no cancellation as d -> 0.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("eta_g needs t >= 0")
    dk = np.asarray(omega_k, dtype=float) - p.omega_alpha
    dq = np.asarray(omega_q, dtype=float) - p.omega_beta
    z_q = dq + 1j * p.gamma_beta
    z_s = dk + dq + 1j * p.gamma_alpha
    d = _rate_gap(omega_k, p)
    e_q = np.exp(1j * z_q * t)
    diff = _exp_gap_difference(d, t, 1j * z_q * t)
    return pair_norm(p) * (1.0 - e_q + z_q * diff) / (z_q * z_s)


def jsa_amplitude(omega_k, omega_q, p: EmitterParams):
    """Long-time pair amplitude N / ((dq + i gb)(dk + dq + i ga))."""
    dq = np.asarray(omega_q, dtype=float) - p.omega_beta
    ds = np.asarray(omega_k, dtype=float) - p.omega_alpha + dq
    return pair_norm(p) / ((dq + 1j * p.gamma_beta) * (ds + 1j * p.gamma_alpha))


@dataclass(frozen=True)
class CascadeAmplitudes:
    """Closed-form amplitudes of one emitter, bound to its parameters."""

    params: EmitterParams

    def eta_e(self, t):
        return eta_e(t, self.params)

    def eta_m(self, omega_k, t):
        return eta_m(omega_k, t, self.params)

    def eta_g(self, omega_k, omega_q, t):
        return eta_g(omega_k, omega_q, t, self.params)


def _axis(grid):
    return np.asarray(grid.points, dtype=float), np.asarray(grid.weights, dtype=float)


@dataclass(frozen=True, eq=False)
class JointSpectralAmplitude:
    """Pair amplitude sampled on a (k, q) grid, rows indexed by k."""

    grid_k: FrequencyGrid | LorentzianGrid
    grid_q: FrequencyGrid | LorentzianGrid
    values: np.ndarray
    norm_constant: float

    def __post_init__(self):
        shape = (self.grid_k.n_points, self.grid_q.n_points)
        if self.values.shape != shape:
            raise ValueError(f"values shape {self.values.shape} does not match grids {shape}")

    @property
    def omega_k(self):
        return self.grid_k.points

    @property
    def omega_q(self):
        return self.grid_q.points

    def weighted(self) -> np.ndarray:
        """values * sqrt(dw_k dw_q): the discrete-mode amplitude matrix."""
        return self.values * np.sqrt(np.outer(self.grid_k.weights, self.grid_q.weights))

    def norm(self) -> float:
        """sum |eta|^2 dw_k dw_q."""
        wk, wq = self.grid_k.weights, self.grid_q.weights
        return float(wk @ (np.abs(self.values) ** 2) @ wq)


def build_jsa(p: EmitterParams, grid_k, grid_q, threads: int | None = 1) -> JointSpectralAmplitude:
    """Sample jsa_amplitude on grid_k x grid_q."""
    values = fill_grid(lambda k, q: jsa_amplitude(k, q, p), grid_k.points, grid_q.points, threads)
    return JointSpectralAmplitude(grid_k, grid_q, values, pair_norm(p))


def jsa_from_function(func, grid_k, grid_q, norm_constant=float("nan"), threads=1) -> JointSpectralAmplitude:
    """Sample an arbitrary amplitude func(omega_k, omega_q) on a grid."""
    values = fill_grid(func, grid_k.points, grid_q.points, threads)
    return JointSpectralAmplitude(grid_k, grid_q, values, norm_constant)


# ---------------------------------------------------------------------------
# equation-of-motion oracle


class IntegrationError(RuntimeError):
    def __init__(self, message, t_reached):
        super().__init__(f"{message} (reached t = {t_reached:.6g} ns)")
        self.t_reached = t_reached


@dataclass(frozen=True, eq=False)
class SampledAmplitudes:
    """Discrete-mode amplitudes from integrate_equations_of_motion.

    eta_m[i, k] and eta_g[i, k, q] are per-mode probability amplitudes at
    times[i]; divide by sqrt of the mode widths to compare with the
    continuum densities.
    """

    params: EmitterParams
    omega_k: np.ndarray
    omega_q: np.ndarray
    weights_k: np.ndarray
    weights_q: np.ndarray
    times: np.ndarray
    eta_e: np.ndarray
    eta_m: np.ndarray
    eta_g: np.ndarray

    @property
    def probability(self) -> np.ndarray:
        """Total population at each saved time."""
        return (np.abs(self.eta_e) ** 2 + np.sum(np.abs(self.eta_m) ** 2, axis=1)
                + np.sum(np.abs(self.eta_g) ** 2, axis=(1, 2)))

    def closed_form(self, index: int):
        """Closed-form (eta_e, eta_m, eta_g) at times[index], in per-mode units."""
        t = self.times[index]
        p = self.params
        sk, sq = np.sqrt(self.weights_k), np.sqrt(self.weights_q)
        m = eta_m(self.omega_k, t, p) * sk
        g = eta_g(self.omega_k[:, None], self.omega_q[None, :], t, p) * np.outer(sk, sq)
        return eta_e(t, p), m, g

    def max_deviation(self, index: int) -> float:
        """Largest absolute difference to the closed forms at times[index]."""
        e, m, g = self.closed_form(index)
        return float(max(abs(self.eta_e[index] - e), np.abs(self.eta_m[index] - m).max(),
                         np.abs(self.eta_g[index] - g).max()))


def ode_oracle_grids(p: EmitterParams, n_modes: int = 64, span: float = 20.0):
    """Uniform mode grids for the integrator, `span` linewidths either side.

    With 64 modes a span near 20 balances the band-edge error (too narrow)
    against the revival of the discrete mode set at t = 2 pi / dw (too wide).
    """
    k = FrequencyGrid.centered(p.omega_alpha, span * (p.gamma_alpha + p.gamma_beta), n_modes)
    q = FrequencyGrid.centered(p.omega_beta, span * p.gamma_beta, n_modes)
    return k, q


def integrate_equations_of_motion(p: EmitterParams, grid_k, grid_q, time_grid: TimeGrid,
                                  steps_per_lifetime: int = 200,
                                  drift_limit: float = 1e-2) -> SampledAmplitudes:
    """Fixed-step RK4 integration of the interaction-picture equations of motion.

    Modes are the nodes of grid_k / grid_q with couplings sqrt(gamma w / pi).
    The step is at most 1/(gamma_beta steps_per_lifetime) and small enough to
    resolve the fastest mode detuning. Integration stops with
    IntegrationError if the state turns non-finite or the total probability
    drifts by more than drift_limit.
    """
    if time_grid.start != 0:
        raise ValueError("time_grid must start at t = 0")
    k, wk = _axis(grid_k)
    q, wq = _axis(grid_q)
    ga, gb = p.gamma_alpha, p.gamma_beta
    cpl_k = np.sqrt(ga * wk / math.pi)
    cpl_q = np.sqrt(gb * wq / math.pi)
    det_k = p.omega_alpha - k
    det_q = p.omega_beta - q

    def rhs(t, e, m, g):
        pk = np.exp(1j * det_k * t)
        pq = np.exp(1j * det_q * t)
        de = -1j * np.sum(cpl_k * m * pk)
        dm = -1j * cpl_k * e * pk.conj() - 1j * (g @ (cpl_q * pq))
        dg = -1j * np.outer(m, cpl_q * pq.conj())
        return de, dm, dg

    max_det = max(np.abs(det_k).max(), np.abs(det_q).max(), 1e-300)
    h_max = min(1.0 / (gb * steps_per_lifetime), 0.25 / max_det)

    times = time_grid.points
    nt = times.size
    out_e = np.zeros(nt, complex)
    out_m = np.zeros((nt, k.size), complex)
    out_g = np.zeros((nt, k.size, q.size), complex)
    e, m, g = 1.0 + 0j, np.zeros(k.size, complex), np.zeros((k.size, q.size), complex)
    out_e[0] = e
    t = 0.0
    for i in range(1, nt):
        span = times[i] - t
        n_steps = max(1, int(math.ceil(span / h_max)))
        h = span / n_steps
        for _ in range(n_steps):
            a = rhs(t, e, m, g)
            b = rhs(t + h / 2, e + h / 2 * a[0], m + h / 2 * a[1], g + h / 2 * a[2])
            c = rhs(t + h / 2, e + h / 2 * b[0], m + h / 2 * b[1], g + h / 2 * b[2])
            d = rhs(t + h, e + h * c[0], m + h * c[1], g + h * c[2])
            e = e + h / 6 * (a[0] + 2 * b[0] + 2 * c[0] + d[0])
            m = m + h / 6 * (a[1] + 2 * b[1] + 2 * c[1] + d[1])
            g = g + h / 6 * (a[2] + 2 * b[2] + 2 * c[2] + d[2])
            t += h
        t = times[i]
        prob = abs(e) ** 2 + np.sum(np.abs(m) ** 2) + np.sum(np.abs(g) ** 2)
        if not np.isfinite(prob):
            raise IntegrationError("state became non-finite", t)
        if abs(prob - 1.0) > drift_limit:
            raise IntegrationError(f"probability drifted to {prob:.6g}", t)
        out_e[i], out_m[i], out_g[i] = e, m, g
    return SampledAmplitudes(p, k, q, wk, wq, times, out_e, out_m, out_g)
