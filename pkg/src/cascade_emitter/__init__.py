"""Biexciton-exciton cascade emitter: pair amplitudes, spectra, correlations,
Schmidt analysis and a polarized four-level model."""
from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

from .amplitudes import (CascadeAmplitudes, IntegrationError, JointSpectralAmplitude, build_jsa,
                         eta_e, eta_g, eta_m, integrate_equations_of_motion, jsa_amplitude)
from .correlations import G2Surface, g2_cross_freq, g2_cross_tau, g2_cross_time, psi2
from .params import (ConfigError, EmitterParams, FrequencyGrid, LorentzianGrid, TimeGrid,
                     decay_rate_from_dipole, default_params, load_config)
from .polarization import PolarizedCascadeParams, polarized_amplitudes, polarized_jsd
from .schmidt import (ReducedDensity, SchmidtResult, cascade_schmidt, joint_spectral_density, purity,
                      reduced_density, schmidt_coefficients_analytic, schmidt_decompose,
                      schmidt_number_analytic)
from .spectra import SpectrumCurve, g1, power_spectrum

__all__ = [
    "CascadeAmplitudes", "ConfigError", "EmitterParams", "FrequencyGrid", "G2Surface", "IntegrationError",
    "JointSpectralAmplitude", "LorentzianGrid", "PolarizedCascadeParams", "ReducedDensity", "SchmidtResult",
    "SpectrumCurve", "TimeGrid", "build_jsa", "cascade_schmidt", "decay_rate_from_dipole", "default_params",
    "eta_e", "eta_g", "eta_m", "g1", "g2_cross_freq", "g2_cross_tau", "g2_cross_time",
    "integrate_equations_of_motion", "joint_spectral_density", "jsa_amplitude", "load_config",
    "polarized_amplitudes", "polarized_jsd", "power_spectrum", "psi2", "purity", "reduced_density",
    "schmidt_coefficients_analytic", "schmidt_decompose", "schmidt_number_analytic",
]
