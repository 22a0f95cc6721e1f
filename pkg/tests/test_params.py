import json
import math

import numpy as np
import pytest

from cascade_emitter.params import (ConfigError, EmitterParams, FrequencyGrid, LorentzianGrid,
                                    PhysicalConstants, TimeGrid, decay_rate_from_dipole,
                                    default_grid_k, default_grid_q, default_params, load_config,
                                    parse_config)


def test_default_params_reference_values():
    p = default_params()
    assert (p.gamma_alpha, p.omega_alpha, p.omega_beta) == (0.005, 1.5, 3.5)
    assert p.gamma_beta == pytest.approx(0.2, rel=1e-15)
    assert p.scale == 1.0


@pytest.mark.parametrize("ratio, gamma_beta", [(40, 0.2), (1, 0.005), (20, 0.1)])
def test_default_params_ratio(ratio, gamma_beta):
    assert default_params(ratio).gamma_beta == pytest.approx(gamma_beta, rel=1e-15)


@pytest.mark.parametrize("ratio", [0, -1, float("nan")])
def test_default_params_rejects_bad_ratio(ratio):
    with pytest.raises(ConfigError):
        default_params(ratio)


@pytest.mark.parametrize("field", ["gamma_alpha", "gamma_beta", "omega_alpha", "omega_beta", "scale"])
@pytest.mark.parametrize("bad", [0.0, -0.1, float("inf")])
def test_params_reject_non_positive(field, bad):
    values = default_params().to_dict()
    values[field] = bad
    with pytest.raises(ConfigError, match=field):
        EmitterParams(**values)


def test_frequency_grid_geometry():
    g = FrequencyGrid(1.0, 3.0, 5)
    assert g.step == 0.5
    assert np.array_equal(g.points, [1.0, 1.5, 2.0, 2.5, 3.0])
    assert np.all(g.weights == 0.5)


@pytest.mark.parametrize("args", [(1.0, 1.0, 5), (2.0, 1.0, 5), (0.0, 1.0, 1)])
def test_frequency_grid_invalid(args):
    with pytest.raises(ConfigError):
        FrequencyGrid(*args)


def test_time_grid_invalid():
    with pytest.raises(ConfigError):
        TimeGrid(0.0, 0.0, 10)


def test_default_grids_span_forty_linewidths():
    p = default_params(40)
    k, q = default_grid_k(p), default_grid_q(p)
    assert k.stop - k.start == pytest.approx(80 * (p.gamma_alpha + p.gamma_beta))
    assert q.stop - q.start == pytest.approx(80 * p.gamma_beta)
    assert k.n_points == q.n_points == 512


def test_lorentzian_grid_integrates_its_lorentzian_exactly():
    g = LorentzianGrid(3.5, 0.2, 64)
    lor = 0.2 / math.pi / ((g.points - 3.5) ** 2 + 0.04)
    assert np.sum(g.weights * lor) == pytest.approx(1.0, abs=1e-14)
    assert np.all(np.diff(g.points) > 0)


def test_decay_rate_cubic_in_frequency():
    g1 = decay_rate_from_dipole(1.0e15, 1e-58)
    g2 = decay_rate_from_dipole(2.0e15, 1e-58)
    assert g2 / g1 == pytest.approx(8.0, rel=1e-14)


def test_decay_rate_against_hand_evaluation():
    # literal CODATA 2018 constants; scipy may ship a later revision (~1e-9 apart)
    eps0, hbar, c = 8.8541878128e-12, 1.054571817e-34, 299792458.0
    omega = 2.0 * math.pi * 3.4e14  # ~880 nm photon
    mu = 30 * 3.33564e-30  # 30 debye in C m
    expected = (1 / (4 * math.pi * eps0)) * (4 * omega**3 * mu**2) / (3 * hbar * c**3)
    assert decay_rate_from_dipole(omega, mu**2) == pytest.approx(expected, rel=1e-8)
    # ns-scale lifetime for a quantum-dot-sized dipole
    assert 1e8 < expected < 1e10


def test_decay_rate_monotone_in_dipole():
    assert decay_rate_from_dipole(1e15, 2e-58) > decay_rate_from_dipole(1e15, 1e-58)


@pytest.mark.parametrize("omega, mu2", [(1e15, 0.0), (0.0, 1e-58), (-1.0, 1e-58)])
def test_decay_rate_domain_errors(omega, mu2):
    with pytest.raises(ConfigError):
        decay_rate_from_dipole(omega, mu2)


def test_decay_rate_custom_constants():
    unit = PhysicalConstants(epsilon_0=1 / (4 * math.pi), hbar=1.0, c=1.0)
    assert decay_rate_from_dipole(3.0, 0.5, unit) == pytest.approx(4 * 27 * 0.5 / 3)


def test_parse_config_full_document():
    cfg = parse_config({
        "gamma_alpha": 0.01, "gamma_beta": 0.05, "omega_alpha": 2.0, "omega_beta": 4.0, "scale": 2.0,
        "grid_k": {"start": 1.0, "stop": 3.0, "n": 11},
        "grid_q": {"start": 3.0, "stop": 5.0, "n": 21},
        "time_grid": {"start": 0.0, "stop": 10.0, "n": 3},
    })
    assert cfg.params == EmitterParams(0.01, 0.05, 2.0, 4.0, 2.0)
    assert cfg.grid_k == FrequencyGrid(1.0, 3.0, 11)
    assert cfg.grid_q.n_points == 21
    assert cfg.time_grid == TimeGrid(0.0, 10.0, 3)


def test_ratio_override_replaces_gamma_beta():
    cfg = parse_config({"gamma_alpha": 0.01, "gamma_beta": 0.5}, ratio=3.0)
    assert cfg.params.gamma_beta == pytest.approx(0.03)


@pytest.mark.parametrize("doc, key", [
    ({"gamma_alfa": 1.0}, "gamma_alfa"),
    ({"grid_k": {"start": 0, "stop": 1, "n": 3, "step": 0.5}}, "grid_k.step"),
    ({"polarization": {"phase": 1.0}}, "polarization.phase"),
])
def test_unknown_keys_are_named(doc, key):
    with pytest.raises(ConfigError, match=key.replace(".", r"\.")):
        parse_config(doc)


def test_load_config_errors(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "absent.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError, match="not valid JSON"):
        load_config(bad)
    ok = tmp_path / "ok.json"
    ok.write_text(json.dumps({"omega_beta": 3.0}))
    assert load_config(ok).params.omega_beta == 3.0
