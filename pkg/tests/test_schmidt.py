import math

import numpy as np
import pytest

from cascade_emitter.amplitudes import build_jsa, jsa_from_function
from cascade_emitter.params import FrequencyGrid, default_grid_k, default_grid_q, default_params
from cascade_emitter.schmidt import (PreconditionError, antidiagonal_fraction, cascade_schmidt,
                                     conditional_modes, frequency_correlation,
                                     kappa_denominator_bruteforce, purity, reduced_density,
                                     result_from_weights, schmidt_coefficients_analytic,
                                     schmidt_decompose, schmidt_from_density,
                                     schmidt_number_analytic)


@pytest.fixture(scope="module")
def resolved_equal_rates():
    # step gamma_alpha / 2 resolves the anti-diagonal; +-320 linewidths holds the norm
    p = default_params(1)
    gk = FrequencyGrid.centered(p.omega_alpha, 1.6, 641)
    gq = FrequencyGrid.centered(p.omega_beta, 0.8, 321)
    return p, build_jsa(p, gk, gq)


def test_result_from_weights_normalizes_and_sorts():
    r = result_from_weights([1.0, 3.0, 0.0, -1e-20], {"tag": 1})
    assert np.array_equal(r.coefficients, [0.75, 0.25, 0.0, 0.0])
    assert r.purity == pytest.approx(0.625)
    assert r.schmidt_number == pytest.approx(1.6)
    assert r.rank_effective == 2
    assert set(r.to_dict()) == {"coefficients", "schmidt_number", "purity", "rank_effective", "grid"}
    with pytest.raises(PreconditionError):
        result_from_weights([0.0, 0.0])


def test_product_state_has_unit_schmidt_number():
    g = FrequencyGrid(-5.0, 5.0, 201)
    jsa = jsa_from_function(lambda k, q: np.exp(-(k**2 + q**2) / 2) / math.sqrt(math.pi), g, g)
    r = schmidt_decompose(jsa)
    assert r.schmidt_number == pytest.approx(1.0, abs=1e-10)
    assert r.rank_effective == 1


@pytest.mark.parametrize("ratio", [1.0, 5.0, 20.0, 40.0])
def test_cascade_schmidt_number(ratio):
    p = default_params(ratio)
    r = cascade_schmidt(p)
    assert r.schmidt_number == pytest.approx(schmidt_number_analytic(p), rel=0.02)
    assert r.purity == pytest.approx(1 / r.schmidt_number, rel=1e-12)
    assert purity(r) == pytest.approx(r.purity, rel=1e-12)
    assert r.coefficients.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(np.diff(r.coefficients) <= 0)


def test_cascade_schmidt_refines_toward_analytic():
    for ratio in (5.0, 40.0):
        p = default_params(ratio)
        target = schmidt_number_analytic(p)
        errs = [abs(cascade_schmidt(p, n).schmidt_number / target - 1) for n in (128, 256, 512)]
        assert errs[0] > errs[1] > errs[2]


def test_schmidt_number_grows_with_ratio():
    kappas = [cascade_schmidt(default_params(r), 256).schmidt_number for r in (0.5, 1, 2, 5, 10, 20, 40)]
    assert np.all(np.diff(kappas) > 0)


def test_schmidt_number_analytic_value():
    assert schmidt_number_analytic(default_params(40)) == pytest.approx(41.0)


@pytest.mark.parametrize("ratio", [1.0, 40.0])
def test_conditional_modes_routes_agree(ratio):
    p = default_params(ratio)
    modes = conditional_modes(p, 256)
    a = modes.amplitude_matrix()
    assert np.sum(np.abs(a) ** 2) == pytest.approx(modes.norm(), rel=1e-10)
    rho_b = modes.reduced_density_beta()
    assert np.trace(rho_b.matrix).real == pytest.approx(modes.norm(), rel=1e-10)
    rho_a = a @ a.conj().T
    svd = cascade_schmidt(p, 256)
    p_a = np.sum(np.abs(rho_a) ** 2) / np.trace(rho_a).real ** 2
    p_b = rho_b.purity() / np.trace(rho_b.matrix).real ** 2
    assert p_a == pytest.approx(svd.purity, abs=1e-6)
    assert p_b == pytest.approx(svd.purity, abs=1e-6)


def test_conditional_norm_close_to_one():
    for ratio in (1.0, 40.0):
        assert conditional_modes(default_params(ratio), 512).norm() == pytest.approx(1.0, abs=2e-3)


def test_grid_routes_agree_on_resolving_grid(resolved_equal_rates):
    p, jsa = resolved_equal_rates
    svd = schmidt_decompose(jsa)
    eig_k = schmidt_from_density(reduced_density(jsa, "beta"))
    eig_q = schmidt_from_density(reduced_density(jsa, "alpha"))
    assert eig_k.schmidt_number == pytest.approx(svd.schmidt_number, rel=1e-10)
    assert eig_q.schmidt_number == pytest.approx(svd.schmidt_number, rel=1e-10)
    assert svd.schmidt_number == pytest.approx(schmidt_number_analytic(p), rel=0.02)


def test_reduced_density_is_a_density_matrix(resolved_equal_rates):
    _, jsa = resolved_equal_rates
    rho = reduced_density(jsa, "alpha")
    assert np.allclose(rho.matrix, rho.matrix.conj().T)
    assert np.trace(rho.matrix).real == pytest.approx(1.0, abs=1e-12)
    assert rho.eigenvalues().min() > -1e-12
    assert 0 < rho.purity() <= 1
    with pytest.raises(ValueError):
        reduced_density(jsa, "gamma")


def test_bruteforce_denominator_equals_svd(resolved_equal_rates):
    _, jsa = resolved_equal_rates
    sigma = np.linalg.svd(jsa.weighted(), compute_uv=False)
    assert kappa_denominator_bruteforce(jsa) == pytest.approx(np.sum(sigma**4), rel=1e-10)


def test_bruteforce_on_coarse_forty_linewidth_grid():
    p = default_params(1)
    jsa = build_jsa(p, default_grid_k(p, 96), default_grid_q(p, 96))
    assert kappa_denominator_bruteforce(jsa) == pytest.approx(1 / schmidt_number_analytic(p), rel=0.05)


def test_precondition_rejects_unresolved_default_grid():
    p = default_params(40)
    jsa = build_jsa(p, default_grid_k(p, 128), default_grid_q(p, 128))
    with pytest.raises(PreconditionError, match="norm"):
        schmidt_decompose(jsa)
    with pytest.raises(PreconditionError):
        reduced_density(jsa)


def test_precondition_rejects_single_point_axis():
    g1 = FrequencyGrid(0.0, 1.0, 2)
    jsa = jsa_from_function(lambda k, q: np.ones_like(k + q), g1, g1)
    with pytest.raises(PreconditionError):
        schmidt_decompose(jsa)


def zoom_jsa(ratio):
    p = default_params(ratio)
    gk = FrequencyGrid.centered(p.omega_alpha, 5 * (p.gamma_alpha + p.gamma_beta), 601)
    gq = FrequencyGrid.centered(p.omega_beta, 5 * p.gamma_beta, 601)
    return p, build_jsa(p, gk, gq)


def test_jsd_concentrates_on_antidiagonal_for_fast_lower_decay():
    p, jsa = zoom_jsa(40)
    assert antidiagonal_fraction(jsa, p, 6 * p.gamma_alpha) >= 0.8
    assert frequency_correlation(jsa) < -0.95


def test_jsd_correlation_weakens_as_rates_approach():
    _, strong = zoom_jsa(40)
    _, weak = zoom_jsa(2)
    assert frequency_correlation(strong) < frequency_correlation(weak) < 0


def test_frequency_correlation_zero_for_product_state():
    g = FrequencyGrid(-3.0, 3.0, 61)
    jsa = jsa_from_function(lambda k, q: np.exp(-(k**2) - 2 * q**2), g, g)
    assert frequency_correlation(jsa) == pytest.approx(0.0, abs=1e-12)


def test_piecewise_basis_weights():
    p = default_params(40)
    lam = schmidt_coefficients_analytic(p)
    assert lam.sum() == pytest.approx(1.0, abs=1e-2)
    assert 1 / np.sum(lam**2) == pytest.approx(math.pi * p.ratio, rel=1e-2)
    for ratio in (2.0, 5.0, 20.0):
        assert schmidt_coefficients_analytic(default_params(ratio)).sum() == pytest.approx(1.0, abs=1e-2)


def test_piecewise_basis_window_precondition():
    p = default_params(40)
    with pytest.raises(PreconditionError):
        schmidt_coefficients_analytic(p, n_terms=11)
    with pytest.raises(ValueError):
        schmidt_coefficients_analytic(p, n_terms=0)
    lam = schmidt_coefficients_analytic(p, n_terms=40001)
    assert lam.size == 40001
