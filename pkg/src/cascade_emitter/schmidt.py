"""Reduced densities, Schmidt decomposition and heralded purity of the pair.

Two numeric routes are provided:

* schmidt_decompose works on any sampled JointSpectralAmplitude through the
  singular values of the cell-weighted amplitude matrix.
* cascade_schmidt is specific to the cascade amplitude. The lower photon is
  sampled on a Lorentzian quadrature grid and, for each sampled w_q, the
  upper photon's amplitude is a Lorentzian in w_k whose overlaps are known in
  closed form, so the w_k integral is exact and no anti-diagonal has to be
  resolved by a grid.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .amplitudes import JointSpectralAmplitude, pair_norm
from .params import EmitterParams, FrequencyGrid, LorentzianGrid

RANK_THRESHOLD = 1e-6
NORM_TOLERANCE = 1e-2


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SchmidtResult:
    coefficients: np.ndarray
    schmidt_number: float
    purity: float
    rank_effective: int
    grid_meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "coefficients": [float(x) for x in self.coefficients],
            "schmidt_number": float(self.schmidt_number),
            "purity": float(self.purity),
            "rank_effective": int(self.rank_effective),
            "grid": self.grid_meta,
        }


@dataclass(frozen=True, eq=False)
class ReducedDensity:
    """Density matrix of one photon in the orthonormal basis of its sampled modes."""

    basis_grid: FrequencyGrid | LorentzianGrid
    matrix: np.ndarray

    def purity(self) -> float:
        """Tr(rho^2), summed elementwise as sum |rho_ij|^2."""
        return float(np.sum(np.abs(self.matrix) ** 2).real)

    def eigenvalues(self) -> np.ndarray:
        return np.sort(np.linalg.eigvalsh(self.matrix))[::-1]


def result_from_weights(lam, grid_meta=None) -> SchmidtResult:
    """SchmidtResult from unnormalized Schmidt weights (sigma^2 or eigenvalues)."""
    lam = np.sort(np.clip(np.asarray(lam, dtype=float), 0.0, None))[::-1]
    total = lam.sum()
    if not total > 0:
        raise PreconditionError("amplitude matrix is identically zero")
    lam = lam / total
    p = float(np.sum(lam**2))
    return SchmidtResult(lam, 1.0 / p, p, int(np.count_nonzero(lam > RANK_THRESHOLD)), dict(grid_meta or {}))


def _grid_meta(jsa):
    return {"k": jsa.grid_k.to_dict(), "q": jsa.grid_q.to_dict()}


def _check_normalized(jsa):
    norm = jsa.norm()
    if abs(norm - 1.0) > NORM_TOLERANCE:
        raise PreconditionError(f"joint amplitude norm is {norm:.6g}, outside 1 +/- {NORM_TOLERANCE:g}")
    return norm


def reduced_density(jsa: JointSpectralAmplitude, trace_out: str = "beta") -> ReducedDensity:
    """Partial trace of the pair state over one photon.

    trace_out='beta' keeps the upper photon: rho[k, k'] = sum_q A[k,q] A*[k',q]
    with A the cell-weighted amplitude matrix; the result is scaled to unit
    trace.
    """
    norm = _check_normalized(jsa)
    a = jsa.weighted()
    if trace_out == "beta":
        rho, grid = a @ a.conj().T, jsa.grid_k
    elif trace_out == "alpha":
        rho, grid = a.T @ a.conj(), jsa.grid_q
    else:
        raise ValueError(f"trace_out must be 'alpha' or 'beta', got {trace_out!r}")
    rho = 0.5 * (rho + rho.conj().T) / norm
    return ReducedDensity(grid, rho)


def schmidt_decompose(jsa: JointSpectralAmplitude) -> SchmidtResult:
    """Schmidt weights from the singular values of the cell-weighted amplitude matrix."""
    if jsa.grid_k.n_points < 2 or jsa.grid_q.n_points < 2:
        raise PreconditionError("Schmidt decomposition needs at least 2 points per axis")
    _check_normalized(jsa)
    sigma = np.linalg.svd(jsa.weighted(), compute_uv=False)
    return result_from_weights(sigma**2, _grid_meta(jsa))


def schmidt_from_density(rho: ReducedDensity) -> SchmidtResult:
    """Eigenvalue route, the oracle for schmidt_decompose."""
    return result_from_weights(rho.eigenvalues(), {"basis": rho.basis_grid.to_dict()})


def purity(result: SchmidtResult) -> float:
    """Heralded single-photon purity sum(lambda^2) = 1 / schmidt_number."""
    return float(np.sum(np.asarray(result.coefficients) ** 2))


def schmidt_number_analytic(p: EmitterParams) -> float:
    return 1.0 + p.gamma_beta / p.gamma_alpha


def joint_spectral_density(jsa: JointSpectralAmplitude) -> np.ndarray:
    return np.abs(jsa.values) ** 2


def kappa_denominator_bruteforce(jsa: JointSpectralAmplitude) -> float:
    """sum_mn |sum_k eta_km eta*_kn dw_k|^2 dw_m dw_n, accumulated one k row at a time.

    No factorization or decomposition is used. Equals 1 / kappa for a
    normalized amplitude.
    """
    wk, wq = jsa.grid_k.weights, jsa.grid_q.weights
    rho = np.zeros((jsa.grid_q.n_points,) * 2, dtype=complex)
    for i in range(jsa.grid_k.n_points):
        row = jsa.values[i]
        rho += wk[i] * np.outer(row, row.conj())
    return float(np.sum(np.abs(rho) ** 2 * np.outer(wq, wq)))


def antidiagonal_fraction(jsa: JointSpectralAmplitude, p: EmitterParams, half_width: float) -> float:
    """Share of the JSD mass with |w_k + w_q - w_alpha - w_beta| <= half_width."""
    dens = joint_spectral_density(jsa) * np.outer(jsa.grid_k.weights, jsa.grid_q.weights)
    s = jsa.omega_k[:, None] + jsa.omega_q[None, :] - p.omega_alpha - p.omega_beta
    return float(dens[np.abs(s) <= half_width].sum() / dens.sum())


def frequency_correlation(jsa: JointSpectralAmplitude) -> float:
    """Pearson correlation of (w_k, w_q) under the JSD on the sampled window.

    Close to -1 for a pair locked to the anti-diagonal, near 0 when the two
    frequencies are independent.
    """
    dens = joint_spectral_density(jsa) * np.outer(jsa.grid_k.weights, jsa.grid_q.weights)
    dens = dens / dens.sum()
    k, q = jsa.omega_k, jsa.omega_q
    pk, pq = dens.sum(axis=1), dens.sum(axis=0)
    mk, mq = pk @ k, pq @ q
    cov = (k - mk) @ dens @ (q - mq)
    return float(cov / math.sqrt(pk @ (k - mk) ** 2 * (pq @ (q - mq) ** 2)))


# ---------------------------------------------------------------------------
# exact-in-w_k route for the cascade amplitude


@dataclass(frozen=True, eq=False)
class ConditionalModes:
    """Cascade pair state expanded over sampled lower-photon frequencies.

    For each node q_j the upper photon is in the Lorentzian mode
    L_j(k) = 1 / (k - (w_alpha + w_beta - q_j) + i gamma_alpha) with
    coefficient c_j = N sqrt(w_j) / (q_j - w_beta + i gamma_beta). The overlap
    matrix of these modes, gram[j, l] = <L_j|L_l>, follows from a contour
    integral: 2 pi i / (q_l - q_j + 2 i gamma_alpha).
    """

    params: EmitterParams
    grid_q: LorentzianGrid
    coefficients: np.ndarray
    gram: np.ndarray

    def amplitude_matrix(self) -> np.ndarray:
        """Coefficients in an orthonormal basis of the upper-photon modes (rows)
        times the lower-photon quadrature nodes (columns)."""
        mu, u = np.linalg.eigh(self.gram)
        root = np.sqrt(np.clip(mu, 0.0, None))[:, None] * u.conj().T
        return root * self.coefficients[None, :]

    def reduced_density_beta(self) -> ReducedDensity:
        """Lower-photon density with the upper photon traced out exactly.

        rho[j, l] = c_j c_l* <L_l|L_j>, the quadrature-sampled kernel
        N^2 f(q) f*(q') 2 pi i / (q - q' + 2 i gamma_alpha).
        """
        c = self.coefficients
        rho = c[:, None] * self.gram.T * c.conj()[None, :]
        return ReducedDensity(self.grid_q, 0.5 * (rho + rho.conj().T))

    def norm(self) -> float:
        return float(np.sum(np.abs(self.coefficients) ** 2 * self.gram.diagonal().real))


def conditional_modes(p: EmitterParams, n_points: int = 512) -> ConditionalModes:
    grid = LorentzianGrid(p.omega_beta, p.gamma_beta, n_points)
    q = grid.points
    c = pair_norm(p) * np.sqrt(grid.weights) / (q - p.omega_beta + 1j * p.gamma_beta)
    gram = 2j * math.pi / (q[None, :] - q[:, None] + 2j * p.gamma_alpha)
    return ConditionalModes(p, grid, c, gram)


def cascade_schmidt(p: EmitterParams, n_points: int = 512) -> SchmidtResult:
    """Schmidt weights of the cascade pair from an n_points x n_points SVD."""
    modes = conditional_modes(p, n_points)
    sigma = np.linalg.svd(modes.amplitude_matrix(), compute_uv=False)
    meta = {"method": "conditional", "q": modes.grid_q.to_dict(), "k": "exact"}
    return result_from_weights(sigma**2, meta)


# ---------------------------------------------------------------------------
# piecewise-basis approximation


def schmidt_coefficients_analytic(p: EmitterParams, n_terms: int | None = None,
                                  max_tail: float = 1e-3) -> np.ndarray:
    """Approximate Schmidt weights of the piecewise frequency-bin basis.

    lambda_s = (gamma_beta / pi) 2 gamma_alpha / ((2 gamma_alpha N_s - w_beta)^2 + gamma_beta^2)
    with N_s stepping by one around w_beta / (2 gamma_alpha). The window
    holds n_terms bins; by default the smallest window whose Lorentzian tail
    mass is below max_tail. A window leaving more tail than max_tail raises.
    """
    ga, gb = p.gamma_alpha, p.gamma_beta
    if n_terms is None:
        half = math.ceil(gb / (2 * ga) / math.tan(0.5 * math.pi * max_tail))
        n_terms = 2 * half + 1
    if n_terms < 1:
        raise ValueError("n_terms must be positive")
    center = p.omega_beta / (2 * ga)
    offsets = np.arange(n_terms) - (n_terms - 1) / 2
    n_s = center + offsets
    # mass of the continuous Lorentzian inside the window of bins
    edge = (n_terms / 2) * 2 * ga / gb
    captured = 2 / math.pi * math.atan(edge)
    if 1 - captured > max_tail:
        raise PreconditionError(
            f"window of {n_terms} terms captures {captured:.6f} of the Lorentzian mass; tail exceeds {max_tail:g}")
    return gb / math.pi * 2 * ga / ((2 * ga * n_s - p.omega_beta) ** 2 + gb**2)
