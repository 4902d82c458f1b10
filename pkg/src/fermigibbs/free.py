"""Closed-form solution of the sampler for quadratic Hamiltonians.

For H = w^T h w with Majorana jump operators and a real filter, the
generator maps onto a quadratic form in adjoint-fermion maps and its full
4^n spectrum follows from the per-mode relaxation rates
q(4 eps_i)^2 cosh(2 beta eps_i), eps_i in spec(h). The same structure gives
the covariance-matrix trajectory from the maximally mixed state, a
logarithmic mixing-time bound and the quadratic partition function.

Covariance matrices follow the convention Gamma_ij = (i/2) Tr([w_i, w_j] rho)
with root-two-normalised Majoranas ({w_i, w_j} = delta_ij), so i*Gamma has
eigenvalues in [-1/2, 1/2].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .filters import FilterSpec
from .fock import build_majoranas


class SpectrumPairingError(ValueError):
    """Eigenvalues of h do not come in symmetric +/- pairs."""


def _eig_h(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    h = np.asarray(h, dtype=complex)
    scale = max(1.0, np.abs(h).max())
    if np.abs(h - h.conj().T).max() > 1e-12 * scale:
        raise ValueError("h must be Hermitian")
    if np.abs(h + h.T).max() > 1e-12 * scale:
        raise ValueError("h must be antisymmetric")
    return np.linalg.eigh(h)


def _matrix_function(h_eigs, h_vecs, values) -> np.ndarray:
    return h_vecs @ np.diag(values) @ h_vecs.conj().T


@dataclass
class FreeSolution:
    """Spectral data of the quadratic sampler.

    ``rates`` holds q(4 eps_i)^2 cosh(2 beta eps_i) for all 2n eigenvalues
    of h; the gap is twice their minimum. ``s_mat`` and ``a_mat`` are the
    symmetric and antisymmetric blocks of the quadratic-form dynamics,
    q(4h)^2 and q(4h)^2 sinh(2 beta h).
    """

    h: np.ndarray
    beta: float
    epsilons: np.ndarray
    rates: np.ndarray
    s_mat: np.ndarray
    a_mat: np.ndarray
    gap: float

    @property
    def n_modes(self) -> int:
        return self.h.shape[0] // 2


def solve_free(h: np.ndarray, filt: FilterSpec) -> FreeSolution:
    """Rates, dynamical blocks and gap for the quadratic sampler."""
    eigs, vecs = _eig_h(h)
    q = np.real(filt.q(4.0 * eigs))
    rates = q**2 * np.cosh(2.0 * filt.beta * eigs)
    s_mat = _matrix_function(eigs, vecs, q**2)
    a_mat = _matrix_function(eigs, vecs, q**2 * np.sinh(2.0 * filt.beta * eigs))
    return FreeSolution(
        h=np.asarray(h, dtype=complex),
        beta=filt.beta,
        epsilons=eigs,
        rates=rates,
        s_mat=s_mat,
        a_mat=a_mat,
        gap=float(2.0 * rates.min()),
    )


def exact_free_spectrum(h: np.ndarray, filt: FilterSpec) -> np.ndarray:
    """Full 4^n generator spectrum from the per-mode rates.

    Every subset of the 2n relaxation modes contributes minus twice the sum
    of its rates, enumerated over all bitstrings.
    """
    rates = solve_free(h, filt).rates
    spectrum = np.zeros(1)
    for r in rates:
        spectrum = np.concatenate([spectrum, spectrum - 2.0 * r])
    return np.sort(spectrum)


def gaussian_gap_formula(h_norm: float, beta: float) -> float:
    """Gap 2 exp(-4 beta^2 ||h||^2) cosh(2 beta ||h||) of the Gaussian filter."""
    return float(2.0 * np.exp(-4.0 * beta**2 * h_norm**2) * np.cosh(2.0 * beta * h_norm))


def rate_function_monotone(h: np.ndarray, filt: FilterSpec, samples: int = 512) -> bool:
    """Whether the per-mode rate decreases with |eps| up to ||h||.

    When true, the minimal rate sits at the spectral edge and the gap
    reduces to the closed form evaluated at ||h||.
    """
    eigs, _ = _eig_h(h)
    top = float(np.abs(eigs).max())
    if top == 0.0:
        return True
    eps = np.linspace(0.0, top, samples)
    q = np.real(filt.q(4.0 * eps))
    rate = q**2 * np.cosh(2.0 * filt.beta * eps)
    return bool(np.all(np.diff(rate) <= 1e-12 * max(1.0, rate.max())))


@dataclass
class CovarianceMatrix:
    """Antisymmetric Majorana covariance matrix at a given time."""

    gamma: np.ndarray
    time: float


def equilibrium_covariance(h: np.ndarray, beta: float) -> np.ndarray:
    """Gibbs-state covariance (i/2) tanh(2 beta h)."""
    eigs, vecs = _eig_h(h)
    return 0.5j * _matrix_function(eigs, vecs, np.tanh(2.0 * beta * eigs))


def covariance_trajectory(h: np.ndarray, filt: FilterSpec, t: float) -> CovarianceMatrix:
    """Covariance at time t of the evolution started from the maximally mixed state.

    Gamma(t) = (i/2) tanh(2 beta h) (1 - exp(-4 q(4h)^2 cosh(2 beta h) t)).
    """
    if t < 0:
        raise ValueError("time must be nonnegative")
    eigs, vecs = _eig_h(h)
    q = np.real(filt.q(4.0 * eigs))
    rates = q**2 * np.cosh(2.0 * filt.beta * eigs)
    vals = np.tanh(2.0 * filt.beta * eigs) * (1.0 - np.exp(-4.0 * rates * t))
    return CovarianceMatrix(gamma=0.5j * _matrix_function(eigs, vecs, vals), time=t)


def covariance_ode_residual(h: np.ndarray, filt: FilterSpec, t: float, dt: float = 1e-6) -> float:
    """Max-norm residual of the covariance equation of motion at time t.

    d Gamma/dt = -2 q^2 cosh . Gamma - Gamma . 2 q^2 cosh + 2i q^2 sinh,
    with the derivative taken by central differences.
    """
    sol = solve_free(h, filt)
    eigs, vecs = _eig_h(h)
    q = np.real(filt.q(4.0 * eigs))
    relax = _matrix_function(eigs, vecs, q**2 * np.cosh(2.0 * filt.beta * eigs))
    lo = max(t - dt, 0.0)
    g_plus = covariance_trajectory(h, filt, t + dt).gamma
    g_minus = covariance_trajectory(h, filt, lo).gamma
    lhs = (g_plus - g_minus) / (t + dt - lo)
    g_t = covariance_trajectory(h, filt, t).gamma
    rhs = -2.0 * relax @ g_t - g_t @ (2.0 * relax) + 2.0j * sol.a_mat
    return float(np.abs(lhs - rhs).max())


def extract_covariance(rho: np.ndarray, n_modes: int) -> np.ndarray:
    """Covariance matrix of a state, (i/2) Tr([w_i, w_j] rho) with {w,w} = delta."""
    w = [op.matrix for op in build_majoranas(n_modes)]
    m2 = 2 * n_modes
    gamma = np.zeros((m2, m2), dtype=complex)
    for i in range(m2):
        for j in range(m2):
            # norm-one Majoranas carry an extra factor two in the commutator
            gamma[i, j] = 0.25j * np.trace(w[i] @ w[j] @ rho - w[j] @ w[i] @ rho)
    return gamma


def covariance_trace_distance(gamma_a: np.ndarray, gamma_b: np.ndarray) -> float:
    """Half the trace norm of the covariance difference (singular values)."""
    return float(0.5 * np.linalg.svd(gamma_a - gamma_b, compute_uv=False).sum())


@dataclass
class FreeMixingBound:
    """Logarithmic mixing-time bound from the maximally mixed state."""

    time: float
    epsilon: float
    certificate: float
    clamped: bool


def free_mixing_bound(h: np.ndarray, filt: FilterSpec, epsilon: float) -> FreeMixingBound:
    """Upper bound on the time to reach trace distance epsilon from equilibrium.

    Evaluates log((n/2) tanh(2 beta ||h||) / eps) / (4 min rate) for the
    maximally mixed initial state and returns alongside it the certified
    covariance trace distance at that time (which must be <= eps). A
    nonpositive bound (already epsilon-close at t = 0) is clamped to zero.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    sol = solve_free(h, filt)
    n = sol.n_modes
    h_norm = float(np.abs(sol.epsilons).max())
    prefactor = 0.5 * n * np.tanh(2.0 * filt.beta * h_norm)
    clamped = prefactor <= epsilon
    t = 0.0 if clamped else float(np.log(prefactor / epsilon) / (4.0 * sol.rates.min()))
    cert = covariance_trace_distance(
        covariance_trajectory(h, filt, t).gamma, equilibrium_covariance(h, filt.beta)
    )
    return FreeMixingBound(time=t, epsilon=epsilon, certificate=cert, clamped=clamped)


def pair_spectrum(eigs: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Positive representatives of the +/- eigenvalue pairs of h."""
    eigs = np.sort(np.asarray(eigs, dtype=float))
    n = len(eigs) // 2
    scale = max(1.0, np.abs(eigs).max())
    for k in range(n):
        if abs(eigs[k] + eigs[-1 - k]) > tol * scale:
            raise SpectrumPairingError(
                f"eigenvalues {eigs[k]} and {eigs[-1 - k]} do not pair symmetrically"
            )
    return eigs[n:][::-1]


def free_partition(h: np.ndarray, beta: float) -> float:
    """Partition function prod_i 2 cosh(2 beta eps_i) of the quadratic form.

    The product runs over one representative per +/- pair; it equals the
    trace of exp(-beta H) whenever the quadratic Hamiltonian is traceless
    (pure hopping), and the trace of the shifted form otherwise.
    """
    eigs, _ = _eig_h(h)
    reps = pair_spectrum(eigs)
    return float(np.prod(2.0 * np.cosh(2.0 * beta * reps)))
