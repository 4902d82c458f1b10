"""Dense fermionic operator algebra on small Fock spaces.

Creation/annihilation and Majorana operators are represented as dense
matrices of dimension 2**n_modes via the Jordan-Wigner transformation with
the occupation convention N = (I + Z)/2, i.e. the first computational basis
state of each qubit is the occupied one (this makes omega_1 = X and
omega_2 = Y for a single mode).

The module also assembles the lattice Hamiltonians (spinless and spinful
nearest-neighbour hopping plus density-density/on-site interaction) and the
single-particle matrix h of a quadratic Hamiltonian written as a Majorana
quadratic form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

import numpy as np

DEFAULT_MODE_CAP = 8

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
# lowering operator |empty><occupied| in the N = (I+Z)/2 convention
_LOWER = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)

PAULIS = {"X": _X, "Y": _Y, "Z": _Z}


class ResourceCapError(ValueError):
    """Requested system exceeds the configured dense-mode cap."""


@dataclass(frozen=True)
class LatticeModel:
    """Lattice geometry and couplings of a Fermi-Hubbard-type chain.

    Parameters
    ----------
    n_sites : int
        Number of lattice sites (positive).
    spinful : bool
        Spinful model (two modes per site, interleaved as site0-up,
        site0-down, site1-up, ...) or spinless (one mode per site).
    t : float
        Hopping amplitude.
    u : float
        Interaction strength (on-site for spinful, nearest-neighbour
        density-density for spinless).
    beta : float
        Inverse temperature, beta >= 0.
    edges : tuple of (int, int), optional
        Site adjacency. Defaults to the open 1D chain.
    mode_cap : int
        Hard cap on the number of fermionic modes (dense solvers).
    """

    n_sites: int
    spinful: bool = False
    t: float = 1.0
    u: float = 0.0
    beta: float = 1.0
    edges: tuple[tuple[int, int], ...] = field(default=None)  # type: ignore[assignment]
    mode_cap: int = DEFAULT_MODE_CAP

    def __post_init__(self):
        if self.n_sites < 1:
            raise ValueError(f"n_sites must be positive, got {self.n_sites}")
        if not (np.isfinite(self.t) and np.isfinite(self.u)):
            raise ValueError("couplings t and u must be finite")
        if not (np.isfinite(self.beta) and self.beta >= 0):
            raise ValueError(f"beta must be a nonnegative real, got {self.beta}")
        if self.edges is None:
            chain = tuple((i, i + 1) for i in range(self.n_sites - 1))
            object.__setattr__(self, "edges", chain)
        else:
            object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))
        for i, j in self.edges:
            if not (0 <= i < self.n_sites and 0 <= j < self.n_sites and i != j):
                raise ValueError(f"invalid edge ({i}, {j})")
        if self.n_modes > self.mode_cap:
            raise ResourceCapError(
                f"{self.n_modes} modes exceed the dense cap of {self.mode_cap}"
            )

    @property
    def n_modes(self) -> int:
        return 2 * self.n_sites if self.spinful else self.n_sites

    @property
    def dim(self) -> int:
        return 2**self.n_modes

    def replace(self, **kwargs) -> "LatticeModel":
        from dataclasses import replace as _replace

        return _replace(self, **kwargs)

    def site_of_mode(self, mode: int) -> int:
        return mode // 2 if self.spinful else mode


@dataclass(frozen=True)
class FockOperator:
    """Dense operator on the Fock space with its fermion-parity grading."""

    matrix: np.ndarray
    parity: str  # "even" | "odd" | "mixed"

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def _kron_all(factors) -> np.ndarray:
    return reduce(np.kron, factors)


def _check_cap(n_modes: int, cap: int) -> None:
    if n_modes < 1:
        raise ValueError(f"n_modes must be positive, got {n_modes}")
    if n_modes > cap:
        raise ResourceCapError(f"{n_modes} modes exceed the dense cap of {cap}")


def annihilation_operators(n_modes: int, cap: int = DEFAULT_MODE_CAP) -> list[np.ndarray]:
    """Jordan-Wigner annihilation operators a_1 .. a_n as dense matrices."""
    _check_cap(n_modes, cap)
    ops = []
    for j in range(n_modes):
        ops.append(_kron_all([_Z] * j + [_LOWER] + [_I2] * (n_modes - j - 1)))
    return ops


def build_majoranas(n_modes: int, cap: int = DEFAULT_MODE_CAP) -> list[FockOperator]:
    """Majorana operators omega_1 .. omega_2n with {w_i, w_j} = 2 delta_ij.

    omega_{2j-1} = a_j + a_j^dag and omega_{2j} = i(a_j - a_j^dag); all are
    Hermitian involutions of odd parity.
    """
    ann = annihilation_operators(n_modes, cap)
    out = []
    for a in ann:
        adag = a.conj().T
        out.append(FockOperator(a + adag, "odd"))
        out.append(FockOperator(1j * (a - adag), "odd"))
    return out


def parity_operator(n_modes: int) -> np.ndarray:
    """Total fermion parity (-1)^{N_tot} as a diagonal matrix."""
    return _kron_all([-_Z] * n_modes)


def operator_parity(matrix: np.ndarray, n_modes: int, tol: float = 1e-12) -> str:
    """Classify an operator as even/odd/mixed under conjugation by parity."""
    p = np.diag(parity_operator(n_modes)).real
    conj = (p[:, None] * p[None, :]) * matrix
    scale = max(np.abs(matrix).max(), 1e-300)
    if np.abs(conj - matrix).max() <= tol * scale:
        return "even"
    if np.abs(conj + matrix).max() <= tol * scale:
        return "odd"
    return "mixed"


def number_operators(n_modes: int, cap: int = DEFAULT_MODE_CAP) -> list[np.ndarray]:
    ann = annihilation_operators(n_modes, cap)
    return [a.conj().T @ a for a in ann]


def hamiltonian_terms(model: LatticeModel) -> list[tuple[frozenset, np.ndarray]]:
    """Individual Hamiltonian terms with their site supports.

    Returns a list of (sites, matrix) pairs whose sum is the full
    Hamiltonian; used by the quasi-locality probes to truncate the
    generator to balls around a jump operator.
    """
    m = model.n_modes
    ann = annihilation_operators(m, model.mode_cap)
    num = [a.conj().T @ a for a in ann]
    terms: list[tuple[frozenset, np.ndarray]] = []
    if model.spinful:
        for i, j in model.edges:
            for s in (0, 1):  # spin up, spin down
                mi, mj = 2 * i + s, 2 * j + s
                hop = ann[mi].conj().T @ ann[mj]
                terms.append((frozenset((i, j)), -model.t * (hop + hop.conj().T)))
        for i in range(model.n_sites):
            terms.append((frozenset((i,)), model.u * (num[2 * i] @ num[2 * i + 1])))
    else:
        for i, j in model.edges:
            hop = ann[i].conj().T @ ann[j]
            terms.append((frozenset((i, j)), -model.t * (hop + hop.conj().T)))
            terms.append((frozenset((i, j)), model.u * (num[i] @ num[j])))
    return terms


def build_hamiltonian(model: LatticeModel) -> FockOperator:
    """Assemble the dense lattice Hamiltonian of the model."""
    H = np.zeros((model.dim, model.dim), dtype=complex)
    for _, term in hamiltonian_terms(model):
        H += term
    return FockOperator(H, "even")


def single_particle_matrix(model: LatticeModel) -> np.ndarray:
    """Majorana quadratic-form matrix h of a quadratic Hamiltonian.

    For u = 0 the Hamiltonian satisfies H = sum_ij h_ij w_i w_j + c*I with
    h Hermitian and antisymmetric (purely imaginary entries). Eigenvalues
    of h come in +/- pairs; for the open spinless chain they are
    (t/2) cos(pi k/(n+1)), k = 1..n, each with multiplicity two.

    Raises
    ------
    ValueError
        If the model has a nonzero interaction u.
    """
    if model.u != 0.0:
        raise ValueError("single_particle_matrix requires a quadratic model (u = 0)")
    H = build_hamiltonian(model).matrix
    return majorana_quadratic_matrix(H, model.n_modes, cap=model.mode_cap)


def majorana_quadratic_matrix(
    H: np.ndarray, n_modes: int, cap: int = DEFAULT_MODE_CAP
) -> np.ndarray:
    """Project a quadratic Fock Hamiltonian onto its Majorana form h.

    Uses the orthogonality Tr(w_a w_b w_d w_c) to extract
    h_cd = Tr(H w_d w_c) / (2 * 2^n) for c != d; the diagonal is zero and
    the trace constant is dropped.
    """
    w = [op.matrix for op in build_majoranas(n_modes, cap)]
    m2 = 2 * n_modes
    dim = H.shape[0]
    h = np.zeros((m2, m2), dtype=complex)
    for c in range(m2):
        for d in range(m2):
            if c != d:
                h[c, d] = np.trace(H @ w[d] @ w[c]) / (2 * dim)
    return h


def quadratic_trace_constant(H: np.ndarray) -> float:
    """Identity shift c with H = w^T h w + c*I for quadratic H."""
    return float(np.trace(H).real / H.shape[0])


def chain_single_particle_spectrum(n_sites: int, t: float) -> np.ndarray:
    """Closed-form eigenvalues (t/2) cos(pi k/(n+1)) of h for the open chain.

    Each value occurs twice in spec(h); this returns the n distinct ones.
    """
    k = np.arange(1, n_sites + 1)
    return (t / 2.0) * np.cos(np.pi * k / (n_sites + 1))


def majorana_jumps(n_modes: int, cap: int = DEFAULT_MODE_CAP) -> list[FockOperator]:
    """The 2n Majorana operators as a norm-one jump set."""
    return build_majoranas(n_modes, cap)


def single_site_pauli_jumps(n_modes: int, cap: int = DEFAULT_MODE_CAP) -> list[FockOperator]:
    """Single-qubit X, Y, Z on every site of the Jordan-Wigner qubit register."""
    _check_cap(n_modes, cap)
    jumps = []
    for k in range(n_modes):
        for name in ("X", "Y", "Z"):
            mat = _kron_all([_I2] * k + [PAULIS[name]] + [_I2] * (n_modes - k - 1))
            jumps.append(FockOperator(mat, operator_parity(mat, n_modes)))
    return jumps
