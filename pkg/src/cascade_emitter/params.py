"""Physical parameters, sampling grids and configuration loading.

Units: frequencies and rates in GHz, times in ns, hbar = 1.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping

import numpy as np
from scipy import constants as _sc


class ConfigError(ValueError):
    """Invalid parameter values or a malformed configuration document."""


def _require_positive(name, value):
    if not (isinstance(value, (int, float, np.floating, np.integer)) and math.isfinite(value)):
        raise ConfigError(f"{name} must be a finite number, got {value!r}")
    if value <= 0:
        raise ConfigError(f"{name} must be > 0, got {value!r}")


@dataclass(frozen=True)
class EmitterParams:
    """Three-level cascade emitter.

    gamma_* are decay half-rates and omega_* the transition centers of the
    upper (biexciton -> exciton) and lower (exciton -> ground) photons.
    `scale` is a dimensionless prefactor on spectra and correlations.
    """

    gamma_alpha: float
    gamma_beta: float
    omega_alpha: float
    omega_beta: float
    scale: float = 1.0

    def __post_init__(self):
        for name in ("gamma_alpha", "gamma_beta", "omega_alpha", "omega_beta", "scale"):
            _require_positive(name, getattr(self, name))

    @property
    def ratio(self) -> float:
        """gamma_beta / gamma_alpha."""
        return self.gamma_beta / self.gamma_alpha

    def with_ratio(self, ratio: float) -> "EmitterParams":
        _require_positive("ratio", ratio)
        return replace(self, gamma_beta=ratio * self.gamma_alpha)

    def to_dict(self) -> dict:
        return {
            "gamma_alpha": self.gamma_alpha,
            "gamma_beta": self.gamma_beta,
            "omega_alpha": self.omega_alpha,
            "omega_beta": self.omega_beta,
            "scale": self.scale,
        }


DEFAULT_GAMMA_ALPHA = 0.005
DEFAULT_OMEGA_ALPHA = 1.5
DEFAULT_OMEGA_BETA = 3.5
DEFAULT_RATIO = 40.0


def default_params(ratio: float = DEFAULT_RATIO) -> EmitterParams:
    """Reference emitter with gamma_beta = ratio * gamma_alpha."""
    _require_positive("ratio", ratio)
    return EmitterParams(
        gamma_alpha=DEFAULT_GAMMA_ALPHA,
        gamma_beta=ratio * DEFAULT_GAMMA_ALPHA,
        omega_alpha=DEFAULT_OMEGA_ALPHA,
        omega_beta=DEFAULT_OMEGA_BETA,
    )


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform frequency axis from start to stop inclusive."""

    start: float
    stop: float
    n_points: int

    def __post_init__(self):
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise ConfigError("grid bounds must be finite")
        if not self.stop > self.start:
            raise ConfigError(f"grid stop ({self.stop}) must exceed start ({self.start})")
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise ConfigError(f"grid needs an integer n_points >= 2, got {self.n_points!r}")

    @classmethod
    def centered(cls, center: float, half_width: float, n_points: int) -> "FrequencyGrid":
        return cls(center - half_width, center + half_width, n_points)

    @property
    def step(self) -> float:
        return (self.stop - self.start) / (self.n_points - 1)

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.n_points)

    @property
    def weights(self) -> np.ndarray:
        # point-sampled cells: every node carries one step of measure
        return np.full(self.n_points, self.step)

    def to_dict(self) -> dict:
        return {"start": self.start, "stop": self.stop, "n": self.n_points}


@dataclass(frozen=True)
class LorentzianGrid:
    """Quadrature nodes at the midpoints of equal-probability cells of a Lorentzian.

    x = center + width * tan(theta) with theta uniform on (-pi/2, pi/2). The
    weights make sum(w * L(x)) exact for a Lorentzian of this center and
    width, and the nodes cover the full real line, so slowly decaying tails
    are not truncated.
    """

    center: float
    width: float
    n_points: int

    def __post_init__(self):
        _require_positive("width", self.width)
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise ConfigError(f"grid needs an integer n_points >= 2, got {self.n_points!r}")

    def _theta(self):
        dtheta = math.pi / self.n_points
        return -0.5 * math.pi + dtheta * (np.arange(self.n_points) + 0.5), dtheta

    @property
    def points(self) -> np.ndarray:
        theta, _ = self._theta()
        return self.center + self.width * np.tan(theta)

    @property
    def weights(self) -> np.ndarray:
        theta, dtheta = self._theta()
        return self.width * dtheta / np.cos(theta) ** 2

    def to_dict(self) -> dict:
        return {"kind": "lorentzian", "center": self.center, "width": self.width, "n": self.n_points}


@dataclass(frozen=True)
class TimeGrid:
    start: float
    stop: float
    n_points: int

    def __post_init__(self):
        if not self.stop > self.start:
            raise ConfigError(f"time grid stop ({self.stop}) must exceed start ({self.start})")
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise ConfigError(f"time grid needs an integer n_points >= 2, got {self.n_points!r}")

    @property
    def step(self) -> float:
        return (self.stop - self.start) / (self.n_points - 1)

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.n_points)

    def to_dict(self) -> dict:
        return {"start": self.start, "stop": self.stop, "n": self.n_points}


# Grids span this many linewidths either side of each line center.
DEFAULT_SPAN = 40.0


def default_grid_k(p: EmitterParams, n_points: int = 512, span: float = DEFAULT_SPAN) -> FrequencyGrid:
    # the upper photon's marginal has half-width gamma_alpha + gamma_beta
    return FrequencyGrid.centered(p.omega_alpha, span * (p.gamma_alpha + p.gamma_beta), n_points)


def default_grid_q(p: EmitterParams, n_points: int = 512, span: float = DEFAULT_SPAN) -> FrequencyGrid:
    return FrequencyGrid.centered(p.omega_beta, span * p.gamma_beta, n_points)


@dataclass(frozen=True)
class PhysicalConstants:
    """Constant bundle for decay_rate_from_dipole, SI by default."""

    epsilon_0: float = _sc.epsilon_0
    hbar: float = _sc.hbar
    c: float = _sc.c


SI = PhysicalConstants()


def decay_rate_from_dipole(omega: float, dipole_sq: float, constants: PhysicalConstants = SI) -> float:
    """Radiative decay half-rate gamma = 4 omega^3 mu^2 / (3 hbar c^3) / (4 pi eps0).

    Inputs and output are in whatever unit system `constants` is expressed in
    (SI: omega in rad/s, dipole_sq in C^2 m^2, gamma in 1/s).
    """
    if not omega > 0:
        raise ConfigError(f"omega must be > 0, got {omega!r}")
    if not dipole_sq > 0:
        raise ConfigError(f"dipole_sq must be > 0, got {dipole_sq!r}")
    k = constants
    return 4.0 * omega**3 * dipole_sq / (3.0 * k.hbar * k.c**3) / (4.0 * math.pi * k.epsilon_0)


# ---------------------------------------------------------------------------
# configuration documents

PARAM_KEYS = ("gamma_alpha", "gamma_beta", "omega_alpha", "omega_beta", "scale")
GRID_KEYS = ("grid_k", "grid_q", "time_grid", "tau_grid")
EXTRA_KEYS = ("ratios", "polarization", "schmidt")
CONFIG_KEYS = PARAM_KEYS + GRID_KEYS + EXTRA_KEYS

POLARIZATION_KEYS = (
    "gamma_alpha_v", "gamma_beta_v", "omega_alpha_v", "omega_beta_v",
    "delta_fss", "tau_e", "phi",
)
SCHMIDT_KEYS = ("n", "method", "span")


@dataclass(frozen=True)
class Config:
    """Parsed configuration document. Absent entries are None."""

    params: EmitterParams
    grid_k: FrequencyGrid | None = None
    grid_q: FrequencyGrid | None = None
    time_grid: TimeGrid | None = None
    tau_grid: TimeGrid | None = None
    ratios: tuple | None = None
    polarization: Mapping[str, float] = field(default_factory=dict)
    schmidt: Mapping[str, Any] = field(default_factory=dict)
    raw: Mapping[str, Any] = field(default_factory=dict)


def _check_keys(doc, allowed, where):
    for key in doc:
        if key not in allowed:
            raise ConfigError(f"unknown config key '{where}{key}'")


def _grid(doc, name, cls):
    if not isinstance(doc, Mapping):
        raise ConfigError(f"{name} must be an object with start, stop, n")
    _check_keys(doc, ("start", "stop", "n"), f"{name}.")
    missing = [k for k in ("start", "stop", "n") if k not in doc]
    if missing:
        raise ConfigError(f"{name} is missing {', '.join(missing)}")
    return cls(float(doc["start"]), float(doc["stop"]), int(doc["n"]))


def parse_config(doc: Mapping[str, Any], ratio: float | None = None) -> Config:
    """Validate a configuration mapping. `ratio` overrides gamma_beta."""
    if not isinstance(doc, Mapping):
        raise ConfigError("configuration must be a JSON object")
    _check_keys(doc, CONFIG_KEYS, "")
    base = default_params()
    values = base.to_dict()
    for key in PARAM_KEYS:
        if key in doc:
            try:
                values[key] = float(doc[key])
            except (TypeError, ValueError):
                raise ConfigError(f"{key} must be a number, got {doc[key]!r}") from None
    if ratio is not None:
        _require_positive("ratio", ratio)
        values["gamma_beta"] = ratio * values["gamma_alpha"]
    params = EmitterParams(**values)

    grids = {}
    for name, cls in (("grid_k", FrequencyGrid), ("grid_q", FrequencyGrid),
                      ("time_grid", TimeGrid), ("tau_grid", TimeGrid)):
        if name in doc:
            grids[name] = _grid(doc[name], name, cls)

    ratios = None
    if "ratios" in doc:
        if not isinstance(doc["ratios"], list):
            raise ConfigError("ratios must be a list of numbers")
        ratios = tuple(float(r) for r in doc["ratios"])

    pol = dict(doc.get("polarization", {}))
    _check_keys(pol, POLARIZATION_KEYS, "polarization.")
    schmidt = dict(doc.get("schmidt", {}))
    _check_keys(schmidt, SCHMIDT_KEYS, "schmidt.")

    return Config(params=params, ratios=ratios, polarization=pol, schmidt=schmidt,
                  raw=dict(doc), **grids)


def load_config(path: str | Path | None, ratio: float | None = None) -> Config:
    """Read a JSON configuration file; None gives the defaults."""
    if path is None:
        return parse_config({}, ratio=ratio)
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc.msg} at line {exc.lineno}") from None
    return parse_config(doc, ratio=ratio)
