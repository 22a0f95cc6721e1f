"""Four-level cascade with H and V decay paths split by the exciton fine structure.

Both paths are evaluated on one shared (w_xx, w_x) grid; the V path picks
up the phase phi = delta_fss * tau_e (hbar = 1) relative to H.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ._parallel import fill_grid
from .amplitudes import pair_norm
from .params import ConfigError, EmitterParams, FrequencyGrid, default_params

DEFAULT_TAU_E = 0.02  # ns
# default detuning of the V path: the exciton level sits this much higher,
# lowering the biexciton photon and raising the exciton photon
DEFAULT_SPLIT = 0.01  # GHz


@dataclass(frozen=True)
class PolarizedCascadeParams:
    branch_h: EmitterParams
    branch_v: EmitterParams
    delta_fss: float
    tau_e: float = DEFAULT_TAU_E
    norm_h: float | None = None
    norm_v: float | None = None

    def __post_init__(self):
        if not (math.isfinite(self.delta_fss) and math.isfinite(self.tau_e)):
            raise ConfigError("delta_fss and tau_e must be finite")
        if self.tau_e < 0:
            raise ConfigError(f"tau_e must be >= 0, got {self.tau_e!r}")
        # None means the per-path continuum normalization
        if self.norm_h is None:
            object.__setattr__(self, "norm_h", pair_norm(self.branch_h))
        if self.norm_v is None:
            object.__setattr__(self, "norm_v", pair_norm(self.branch_v))

    @property
    def phase(self) -> float:
        return self.delta_fss * self.tau_e

    @classmethod
    def from_phase(cls, branch_h, branch_v, phi, tau_e=DEFAULT_TAU_E, **kw):
        if tau_e <= 0:
            raise ConfigError("tau_e must be > 0 to convert a phase into a splitting")
        return cls(branch_h, branch_v, phi / tau_e, tau_e, **kw)

    def with_phase(self, phi) -> "PolarizedCascadeParams":
        return replace(self, delta_fss=phi / self.tau_e)

    def to_dict(self) -> dict:
        return {
            "branch_h": self.branch_h.to_dict(),
            "branch_v": self.branch_v.to_dict(),
            "delta_fss": self.delta_fss,
            "tau_e": self.tau_e,
            "phi": self.phase,
            "norm_h": self.norm_h,
            "norm_v": self.norm_v,
        }


def default_polarized_params(ratio: float = 40.0, phi: float = math.pi / 4,
                             split: float = DEFAULT_SPLIT, tau_e: float = DEFAULT_TAU_E):
    """Reference emitter for both paths, the V path detuned by `split`."""
    h = default_params(ratio)
    v = replace(h, omega_alpha=h.omega_alpha - split, omega_beta=h.omega_beta + split)
    return PolarizedCascadeParams.from_phase(h, v, phi, tau_e)


def _branch(omega_xx, omega_x, p: EmitterParams, norm):
    dq = omega_x - p.omega_beta
    ds = omega_xx + dq - p.omega_alpha
    return norm / ((dq + 1j * p.gamma_beta) * (ds + 1j * p.gamma_alpha))


def polarized_amplitudes(omega_xx, omega_x, p: PolarizedCascadeParams):
    """(eta_H, eta_V) at biexciton-photon frequency omega_xx and exciton-photon omega_x."""
    omega_xx = np.asarray(omega_xx, dtype=float)
    omega_x = np.asarray(omega_x, dtype=float)
    return (_branch(omega_xx, omega_x, p.branch_h, p.norm_h),
            _branch(omega_xx, omega_x, p.branch_v, p.norm_v))


PATH_WEIGHT = 0.5


def _jsd_kernel(p, phase, weight):
    def kernel(xx, x):
        h, v = polarized_amplitudes(xx, x, p)
        return weight * np.abs(h + phase * v) ** 2
    return kernel


def polarized_jsd(grid_xx, grid_x, p: PolarizedCascadeParams, threads=1,
                  path_weight: float = PATH_WEIGHT) -> np.ndarray:
    """path_weight * |eta_H + exp(i phi) eta_V|^2 on grid_xx x grid_x.

    The default 0.5 is the squared 1/sqrt(2) amplitude of each decay path;
    pass path_weight=1 for the bare interference pattern.
    """
    phase = np.exp(1j * p.phase)
    return fill_grid(_jsd_kernel(p, phase, path_weight), _points(grid_xx), _points(grid_x),
                     threads, dtype=float)


def _points(grid):
    return grid.points if hasattr(grid, "points") else np.asarray(grid, dtype=float)


def default_polarized_grids(p: PolarizedCascadeParams, n_points: int = 121, span: float = 5.0):
    """Shared (w_xx, w_x) grids covering both paths, `span` linewidths wide."""
    h, v = p.branch_h, p.branch_v
    c_xx = 0.5 * (h.omega_alpha + v.omega_alpha)
    c_x = 0.5 * (h.omega_beta + v.omega_beta)
    w_xx = span * max(h.gamma_alpha + h.gamma_beta, v.gamma_alpha + v.gamma_beta)
    w_x = span * max(h.gamma_beta, v.gamma_beta)
    half_split_xx = 0.5 * abs(h.omega_alpha - v.omega_alpha)
    half_split_x = 0.5 * abs(h.omega_beta - v.omega_beta)
    return (FrequencyGrid.centered(c_xx, w_xx + half_split_xx, n_points),
            FrequencyGrid.centered(c_x, w_x + half_split_x, n_points))
