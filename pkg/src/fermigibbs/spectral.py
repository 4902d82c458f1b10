"""Spectra, gaps, semigroup evolution and mixing-time diagnostics.

The gap is always read off the Hermitian parent Hamiltonian: dense
diagonalisation up to six modes, implicitly restarted Lanczos (ARPACK with
full reorthogonalisation) on the matrix-free parent action beyond that.
The zero eigenvalue is identified by a relative tolerance cluster; the gap
is the distance from zero to the next eigenvalue below the cluster.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse.linalg as spla

from .filters import FilterSpec
from .fock import LatticeModel
from .lindblad import (
    LindbladSet,
    ParentLinearOperator,
    Superoperator,
    lindblad_set_for_model,
    parent_hamiltonian,
)

DENSE_MODE_LIMIT = 6
DEFAULT_ZERO_TOL = 1e-10


class EigensolverError(RuntimeError):
    """Iterative eigensolver failed to converge; carries partial results."""

    def __init__(self, message, eigenvalues=None):
        super().__init__(message)
        self.eigenvalues = eigenvalues


@dataclass
class SpectralReport:
    """Eigenvalues of the generator together with the gap bookkeeping."""

    eigenvalues: np.ndarray  # descending, full (dense) or top-k (iterative)
    gap: float
    zero_multiplicity: int
    stationarity_residual: float
    hermiticity_residual: float
    method: str

    @property
    def mixing_gap(self) -> float:
        """Distance between the highest and second-highest eigenvalue.

        A degenerate kernel means the semigroup is no longer ergodic and
        the mixing-relevant gap is zero, even though the distance from the
        zero cluster to the rest of the spectrum may stay finite.
        """
        return 0.0 if self.zero_multiplicity > 1 else self.gap


@dataclass
class SlopeReport:
    """One-sided sensitivities of the gap to the interaction at u = 0."""

    n: int
    beta: float
    d_plus: float
    d_minus: float
    h_fd: float


def _gap_from_values(values: np.ndarray, zero_tol: float) -> tuple[float, int]:
    """Zero-cluster multiplicity and gap from descending eigenvalues."""
    scale = max(float(np.abs(values).max()), 1.0)
    in_zero = np.abs(values) <= zero_tol * scale
    mult = int(in_zero.sum())
    below = values[~in_zero]
    if mult == 0:
        # the kernel should always be present; treat the top value as zero
        mult = 1
        below = values[1:]
    gap = float(-below.max()) if len(below) else 0.0
    return gap, mult


def spectrum_and_gap(
    op: Superoperator | ParentLinearOperator,
    method: str = "dense",
    zero_tol: float = DEFAULT_ZERO_TOL,
    k: int = 8,
    v0_seed: int = 7,
    arpack_tol: float = 1e-10,
) -> SpectralReport:
    """Spectrum and gap of a parent Hamiltonian.

    Parameters
    ----------
    op : Superoperator or ParentLinearOperator
        Hermitian parent; dense superoperators also carry their kernel
        vector for the stationarity residual.
    method : str
        "dense" (full spectrum) or "iterative" (top-k Lanczos).
    zero_tol : float
        Relative half-width of the zero cluster.
    k : int
        Number of extremal eigenvalues for the iterative path.
    v0_seed : int
        Seed of the deterministic Lanczos start vector.
    """
    if method == "dense":
        if not isinstance(op, Superoperator):
            raise ValueError("dense method requires an assembled Superoperator")
        if op.role != "parent_hamiltonian":
            raise ValueError("gap extraction expects the Hermitian parent Hamiltonian")
        M = 0.5 * (op.matrix + op.matrix.conj().T)
        values = np.linalg.eigvalsh(M)[::-1]
        herm = op.hermiticity_residual
        if op.stationary_vector is not None:
            stat = float(
                np.linalg.norm(op.matrix @ op.stationary_vector) / np.linalg.norm(op.matrix, 2)
            )
        else:
            stat = np.nan
    elif method == "iterative":
        if isinstance(op, Superoperator):
            raise ValueError("iterative method expects the matrix-free parent action")
        rng = np.random.default_rng(v0_seed)
        v0 = rng.standard_normal(op.shape[0])
        v0 /= np.linalg.norm(v0)
        try:
            values = spla.eigsh(
                op, k=k, which="LA", v0=v0, tol=arpack_tol, return_eigenvectors=False
            )
        except spla.ArpackNoConvergence as exc:
            raise EigensolverError(
                f"Lanczos did not converge: {exc}", eigenvalues=exc.eigenvalues
            ) from exc
        values = np.sort(values)[::-1]
        herm = 0.0
        scale = op.norm_bound()
        sig = op.lset.sigma_power(0.5).reshape(-1)
        sig /= np.linalg.norm(sig)
        stat = float(np.linalg.norm(op @ sig) / scale)
    else:
        raise ValueError(f"unknown method {method!r}")
    gap, mult = _gap_from_values(values, zero_tol)
    return SpectralReport(
        eigenvalues=values,
        gap=gap,
        zero_multiplicity=mult,
        stationarity_residual=stat,
        hermiticity_residual=herm,
        method=method,
    )


def model_gap_report(
    model: LatticeModel,
    filt: FilterSpec,
    jump_kind: str = "majorana",
    zero_tol: float = DEFAULT_ZERO_TOL,
    method: str = "auto",
) -> SpectralReport:
    """Gap of the sampler for a lattice model, choosing the solver by size."""
    lset = lindblad_set_for_model(model, filt, jump_kind)
    if method == "auto":
        method = "dense" if model.n_modes <= DENSE_MODE_LIMIT else "iterative"
    if method == "dense":
        return spectrum_and_gap(parent_hamiltonian(lset), method="dense", zero_tol=zero_tol)
    return spectrum_and_gap(ParentLinearOperator(lset), method="iterative", zero_tol=zero_tol)


def evolve(lset: LindbladSet, rho0: np.ndarray, times) -> list[np.ndarray]:
    """Propagate a state with the quantum Markov semigroup.

    Computes exp(t L)[rho0] through the eigendecomposition of the parent
    Hamiltonian: the generator is similar to the parent via the modular
    square root, so the semigroup is a sandwich of a Hermitian heat kernel.

    Parameters
    ----------
    lset : LindbladSet
    rho0 : ndarray
        Initial density matrix (trace one, positive semidefinite).
    times : float or sequence of float
        Nonnegative evolution times.

    Returns
    -------
    list of ndarray (single ndarray if ``times`` is scalar).
    """
    scalar = np.isscalar(times)
    ts = [float(times)] if scalar else [float(t) for t in times]
    if any(t < 0 for t in ts):
        raise ValueError("evolution times must be nonnegative")
    parent = parent_hamiltonian(lset)
    M = 0.5 * (parent.matrix + parent.matrix.conj().T)
    lam, W = np.linalg.eigh(M)
    s4 = lset.sigma_power(0.25)
    s4i = lset.sigma_power(-0.25)
    v = (s4i @ rho0 @ s4i).reshape(-1)
    coeffs = W.conj().T @ v
    out = []
    for t in ts:
        vt = W @ (np.exp(lam * t) * coeffs)
        rho_t = s4 @ vt.reshape(lset.dim, lset.dim) @ s4
        rho_t = 0.5 * (rho_t + rho_t.conj().T)
        out.append(rho_t)
    return out[0] if scalar else out


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    diff = rho - sigma
    return float(0.5 * np.abs(np.linalg.eigvalsh(0.5 * (diff + diff.conj().T))).sum())


class UnboundedMixingError(ArithmeticError):
    """The spectral gap is numerically closed; no finite mixing bound exists."""


def mixing_time_bound(
    report: SpectralReport, sigma: np.ndarray, epsilon: float, zero_tol: float = DEFAULT_ZERO_TOL
) -> float:
    """Mixing-time bound log(2 ||sigma^{-1/2}|| / eps) / gap."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    scale = max(float(np.abs(report.eigenvalues).max()), 1.0)
    if report.gap <= zero_tol * scale:
        raise UnboundedMixingError("spectral gap is closed to within the zero tolerance")
    p_min = float(np.linalg.eigvalsh(sigma).min())
    if p_min <= 0:
        raise UnboundedMixingError("stationary state is singular")
    inv_sqrt_norm = p_min**-0.5
    return float(np.log(2.0 * inv_sqrt_norm / epsilon) / report.gap)


def one_sided_slopes(gap_fn, h_fd: float, sides: str = "both") -> tuple[float, float]:
    """One-sided finite differences of a gap function at u = 0.

    The gap has a kink at u = 0, so the two signs are probed separately:
    d+ = (gap(0) - gap(+h))/h and d- = (gap(0) - gap(-h))/h. Skipped sides
    come back as nan.
    """
    if h_fd <= 0:
        raise ValueError("finite-difference step must be positive")
    g0 = gap_fn(0.0)
    d_plus = (g0 - gap_fn(+h_fd)) / h_fd if sides in ("both", "plus") else float("nan")
    d_minus = (g0 - gap_fn(-h_fd)) / h_fd if sides in ("both", "minus") else float("nan")
    return d_plus, d_minus


def gap_slope(
    model: LatticeModel,
    filt: FilterSpec,
    jump_kind: str = "majorana",
    h_fd: float = 1e-4,
    zero_tol: float = DEFAULT_ZERO_TOL,
    method: str = "auto",
    sides: str = "both",
) -> SlopeReport:
    """Sensitivity of the sampler gap to the interaction strength at u = 0."""

    def gap_at(u: float) -> float:
        return model_gap_report(
            model.replace(u=u), filt, jump_kind, zero_tol=zero_tol, method=method
        ).gap

    d_plus, d_minus = one_sided_slopes(gap_at, h_fd, sides)
    return SlopeReport(
        n=model.n_sites, beta=filt.beta, d_plus=d_plus, d_minus=d_minus, h_fd=h_fd
    )
