"""First-order coherence and emission power spectra of the photon pair."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .amplitudes import JointSpectralAmplitude
from .params import EmitterParams, FrequencyGrid

BRANCHES = ("alpha", "beta")
LABELS = ("alpha", "beta", "total")


def _linewidth(branch, p):
    # the upper photon inherits the width of both levels it connects
    if branch == "alpha":
        return p.omega_alpha, p.gamma_alpha + p.gamma_beta
    if branch == "beta":
        return p.omega_beta, p.gamma_beta
    raise ValueError(f"branch must be 'alpha' or 'beta', got {branch!r}")


def g1(tau, branch: str, p: EmitterParams):
    """Normalized first-order coherence exp(i w0 tau - width |tau|)."""
    center, width = _linewidth(branch, p)
    tau = np.asarray(tau, dtype=float)
    return np.exp(1j * center * tau - width * np.abs(tau))


def lorentzian_line(omega, branch: str, p: EmitterParams):
    """scale * width / ((omega - center)^2 + width^2) for one branch."""
    center, width = _linewidth(branch, p)
    omega = np.asarray(omega, dtype=float)
    return p.scale * width / ((omega - center) ** 2 + width**2)


@dataclass(frozen=True, eq=False)
class SpectrumCurve:
    grid: FrequencyGrid
    values: np.ndarray
    label: str

    def fwhm(self) -> float:
        return fwhm(self.grid.points, self.values)

    def peak_frequency(self) -> float:
        return float(self.grid.points[np.argmax(self.values)])


def power_spectrum(branch: str, grid: FrequencyGrid, p: EmitterParams) -> SpectrumCurve:
    """Closed-form emission spectrum of one photon, or their sum for 'total'."""
    omega = grid.points
    if branch == "total":
        values = lorentzian_line(omega, "alpha", p) + lorentzian_line(omega, "beta", p)
    elif branch in BRANCHES:
        values = lorentzian_line(omega, branch, p)
    else:
        raise ValueError(f"branch must be one of {LABELS}, got {branch!r}")
    return SpectrumCurve(grid, values, branch)


def spectrum_table(grid: FrequencyGrid, p: EmitterParams) -> dict:
    """Columns omega_ghz, s_alpha, s_beta, s_total with s_total = s_alpha + s_beta."""
    a = lorentzian_line(grid.points, "alpha", p)
    b = lorentzian_line(grid.points, "beta", p)
    return {"omega_ghz": grid.points, "s_alpha": a, "s_beta": b, "s_total": a + b}


def fwhm(x, y) -> float:
    """Full width at half maximum of a single-peaked sampled curve.

    Each half-maximum crossing is located by linear interpolation between
    the two samples that bracket it.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    i = int(np.argmax(y))
    half = 0.5 * y[i]
    left = np.nonzero(y[:i] < half)[0]
    right = np.nonzero(y[i:] < half)[0]
    if left.size == 0 or right.size == 0:
        raise ValueError("curve does not fall below half maximum on both sides")
    a = left[-1]
    b = i + right[0]
    xl = x[a] + (half - y[a]) * (x[a + 1] - x[a]) / (y[a + 1] - y[a])
    xr = x[b - 1] + (half - y[b - 1]) * (x[b] - x[b - 1]) / (y[b] - y[b - 1])
    return float(xr - xl)


def spectrum_from_coherence(omega, branch: str, p: EmitterParams, n_lifetimes: float = 40.0,
                            points_per_lifetime: int = 400):
    """(1/pi) Re int_0^inf G1(tau) exp(-i omega tau) dtau by Simpson quadrature.

    The integral is cut at n_lifetimes coherence times. The step is refined
    so that the fastest detuning in `omega` is sampled at least 20 times per
    period. With this convention the result equals
    lorentzian_line / (pi * scale).
    """
    center, width = _linewidth(branch, p)
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    tau_max = n_lifetimes / width
    max_det = float(np.max(np.abs(omega - center))) if omega.size else 0.0
    n = int(max(points_per_lifetime * n_lifetimes, 20 * max_det * tau_max / (2 * np.pi)))
    n += n % 2  # even interval count for Simpson
    tau = np.linspace(0.0, tau_max, n + 1)
    # demodulate by the line center so the integrand only oscillates at the detuning
    envelope = g1(tau, branch, p) * np.exp(-1j * center * tau)
    out = np.empty(omega.size)
    for j, w in enumerate(omega):
        out[j] = simpson((envelope * np.exp(-1j * (w - center) * tau)).real, x=tau) / np.pi
    return out


def marginal_spectrum(jsa: JointSpectralAmplitude, branch: str) -> np.ndarray:
    """Single-photon spectrum from the pair amplitude by summing out the partner.

    'beta' gives sum_k |eta(w_k, w)|^2 dw_k on the q axis; 'alpha' sums over q.
    For the cascade these are the unit-area Lorentzians of the two lines.
    """
    dens = np.abs(jsa.values) ** 2
    if branch == "beta":
        return jsa.grid_k.weights @ dens
    if branch == "alpha":
        return dens @ jsa.grid_q.weights
    raise ValueError(f"branch must be 'alpha' or 'beta', got {branch!r}")
