"""Assembly of the detailed-balance Lindbladian and its parent Hamiltonian.

Jump operators are decomposed over Bohr frequencies (energy differences of
the Hamiltonian, with near-degenerate eigenvalues merged by a clustering
tolerance), weighted by a filter function and summed into Lindblad
operators. The generator acts on vectorised density matrices with the
row-major convention vec(|psi><phi|) = |psi> (x) conj|phi>, i.e.
vec(A rho B) = (A (x) B^T) vec(rho).

Two independent routes produce the Hermitian parent Hamiltonian: conjugation
of the assembled generator by the square root of the modular map of the
Gibbs state, and direct assembly from the thermally twisted operators. Both
are exposed and must agree, which is one of the main self-tests of the
construction.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse.linalg as spla

from .filters import FilterSpec
from .fock import FockOperator, LatticeModel, build_hamiltonian, build_majoranas, hamiltonian_terms

# exp() overflow guard for quarter-inverse Boltzmann weights
_MAX_QUARTER_EXPONENT = 600.0


class ConditionNumberError(ArithmeticError):
    """Thermal weights too extreme for the requested conjugation."""


def _as_matrix(op) -> np.ndarray:
    return op.matrix if isinstance(op, FockOperator) else np.asarray(op, dtype=complex)


def cluster_values(values: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    """Group sorted values whose consecutive gaps are <= tol.

    Returns (representatives, labels) where labels[i] indexes the group of
    values[i] and representatives holds the group means.
    """
    values = np.asarray(values, dtype=float)
    labels = np.zeros(len(values), dtype=int)
    if len(values) > 1:
        labels[1:] = np.cumsum(np.diff(values) > tol)
    reps = np.array([values[labels == k].mean() for k in range(labels[-1] + 1)])
    return reps, labels


def _frequency_table(eigvals: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    """Clustered Bohr-frequency matrix nu[i,j] ~ E_i - E_j and its values.

    Frequencies are merged within tol and represented symmetrically, so the
    returned matrix is exactly antisymmetric and its distinct entries pair
    as nu <-> -nu.
    """
    reps, labels = cluster_values(eigvals, tol)
    diff = reps[:, None] - reps[None, :]
    pos = np.unique(diff[diff > 0])
    if len(pos):
        pos_reps, pos_labels = cluster_values(pos, tol)
    else:
        pos_reps = np.array([])
        pos_labels = np.array([], dtype=int)
    lookup = dict(zip(pos, pos_reps[pos_labels]))
    k = len(reps)
    nu_cluster = np.zeros((k, k))
    for a in range(k):
        for b in range(k):
            if a == b:
                continue
            d = diff[a, b]
            nu_cluster[a, b] = lookup[d] if d > 0 else -lookup[-d]
    nu = nu_cluster[np.ix_(labels, labels)]
    freqs = np.unique(nu)
    return nu, freqs


@dataclass
class BohrDecomposition:
    """A = sum_nu A_nu with [H, A_nu] = nu A_nu and A_nu^dag = A_{-nu}."""

    frequencies: np.ndarray
    components: list[np.ndarray]
    cluster_tol: float

    def reconstruct(self) -> np.ndarray:
        return sum(self.components)

    def component(self, nu: float) -> np.ndarray:
        idx = int(np.argmin(np.abs(self.frequencies - nu)))
        return self.components[idx]


def default_cluster_tol(eigvals: np.ndarray) -> float:
    return 1e-9 * max(1.0, float(np.abs(eigvals).max()))


def bohr_decompose(H, A, cluster_tol: float | None = None) -> BohrDecomposition:
    """Decompose a jump operator over the Bohr frequencies of H.

    Eigenvalues of H are merged within cluster_tol before the spectral
    projectors are formed, so degenerate subspaces contribute a single
    frequency.
    """
    H = _as_matrix(H)
    A = _as_matrix(A)
    if np.abs(H - H.conj().T).max() > 1e-12 * max(1.0, np.abs(H).max()):
        raise ValueError("H must be Hermitian")
    E, V = np.linalg.eigh(H)
    tol = default_cluster_tol(E) if cluster_tol is None else cluster_tol
    nu, freqs = _frequency_table(E, tol)
    Ae = V.conj().T @ A @ V
    floor = 1e-14 * max(1.0, float(np.abs(A).max()))
    frequencies, components = [], []
    for f in freqs:
        comp = V @ np.where(nu == f, Ae, 0.0) @ V.conj().T
        if np.abs(comp).max() > floor:
            frequencies.append(f)
            components.append(comp)
    return BohrDecomposition(
        frequencies=np.array(frequencies), components=components, cluster_tol=tol
    )


@dataclass
class LindbladSet:
    """Jump operators with their filtered and thermally twisted versions.

    All operators are stored in the computational basis; the eigensystem of
    the Hamiltonian and the clustered Bohr-frequency table are kept for the
    superoperator assembly. Instances are treated as immutable after
    construction.
    """

    hamiltonian: np.ndarray
    beta: float
    filt: FilterSpec
    jump_kind: str
    jumps: list[np.ndarray]
    lindblads: list[np.ndarray]
    tilde_lindblads: list[np.ndarray]
    coherent: np.ndarray
    tilde_coherent: np.ndarray
    tilde_coherent_parts: list[np.ndarray]
    tilde_mops: list[np.ndarray]
    eigvals: np.ndarray
    eigvecs: np.ndarray
    nu_matrix: np.ndarray
    support_truncated: bool = False
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]

    @property
    def boltzmann_weights(self) -> np.ndarray:
        """Eigenbasis probabilities of the Gibbs state (energy-shifted)."""
        if "p" not in self._cache:
            w = np.exp(-self.beta * (self.eigvals - self.eigvals.min()))
            self._cache["p"] = w / w.sum()
        return self._cache["p"]

    def sigma_power(self, power: float) -> np.ndarray:
        """sigma_beta^power as a dense matrix (eigenbasis evaluation)."""
        p = self.boltzmann_weights
        if power < 0:
            expo = self.beta * (self.eigvals.max() - self.eigvals.min()) * abs(power)
            if expo > _MAX_QUARTER_EXPONENT:
                raise ConditionNumberError(
                    f"beta*spread*|power| = {expo:.3g} would overflow sigma^{power}; "
                    "the Gibbs weights span too many orders of magnitude"
                )
        V = self.eigvecs
        return V @ np.diag(p**power) @ V.conj().T

    @property
    def sigma(self) -> np.ndarray:
        return self.sigma_power(1.0)


def build_lindblad_set(
    H,
    jumps,
    filt: FilterSpec,
    cluster_tol: float | None = None,
    jump_kind: str = "custom",
) -> LindbladSet:
    """Build Lindblad operators, coherent term and their twisted versions.

    Parameters
    ----------
    H : ndarray or FockOperator
        Hermitian Hamiltonian.
    jumps : sequence of ndarray or FockOperator
        Hermitian jump operators with spectral norm <= 1.
    filt : FilterSpec
        Frequency filter; its beta is the inverse temperature of the target
        Gibbs state.
    cluster_tol : float, optional
        Bohr-frequency clustering tolerance (default 1e-9 * max(1, ||H||)).
    """
    H = _as_matrix(H)
    scale = max(1.0, np.abs(H).max())
    if np.abs(H - H.conj().T).max() > 1e-12 * scale:
        raise ValueError("H must be Hermitian")
    mats = []
    for A in jumps:
        A = _as_matrix(A)
        if np.abs(A - A.conj().T).max() > 1e-12:
            raise ValueError("jump operators must be Hermitian")
        if np.linalg.norm(A, 2) > 1.0 + 1e-9:
            raise ValueError("jump operators must have spectral norm <= 1")
        mats.append(A)

    E, V = np.linalg.eigh(H)
    tol = default_cluster_tol(E) if cluster_tol is None else cluster_tol
    nu, _ = _frequency_table(E, tol)

    support_truncated = False
    if filt.support is not None:
        diameter = float(E.max() - E.min())
        if diameter >= filt.support:
            support_truncated = True
            warnings.warn(
                f"filter support {filt.support} does not cover the spectral "
                f"diameter {diameter:.3g}; transitions are being discarded",
                stacklevel=2,
            )

    beta = filt.beta
    fh = filt.fhat(nu)
    qv = filt.q(nu)
    th = np.tanh(beta * nu / 4.0)
    if np.abs(beta * nu / 4.0).max() > _MAX_QUARTER_EXPONENT:
        raise ConditionNumberError("beta * spectral diameter too large for twisted operators")
    ebq = np.exp(beta * nu / 4.0)

    lindblads, tildes, mops, g_parts = [], [], [], []
    G_eig = np.zeros_like(H)
    Gt_eig = np.zeros_like(H)
    for A in mats:
        Ae = V.conj().T @ A @ V
        Le = fh * Ae
        Ka = Le.conj().T @ Le
        lindblads.append(V @ Le @ V.conj().T)
        tildes.append(V @ (qv * Ae) @ V.conj().T)
        mops.append(V @ (ebq * Ka) @ V.conj().T)
        ga = 0.5j * th * Ka
        gta = ga * ebq
        g_parts.append(V @ gta @ V.conj().T)
        G_eig = G_eig + ga
        Gt_eig = Gt_eig + gta

    return LindbladSet(
        hamiltonian=H,
        beta=beta,
        filt=filt,
        jump_kind=jump_kind,
        jumps=mats,
        lindblads=lindblads,
        tilde_lindblads=tildes,
        coherent=V @ G_eig @ V.conj().T,
        tilde_coherent=V @ Gt_eig @ V.conj().T,
        tilde_coherent_parts=g_parts,
        tilde_mops=mops,
        eigvals=E,
        eigvecs=V,
        nu_matrix=nu,
        support_truncated=support_truncated,
    )


def lindblad_set_for_model(
    model: LatticeModel,
    filt: FilterSpec,
    jump_kind: str = "majorana",
    cluster_tol: float | None = None,
) -> LindbladSet:
    """Convenience wrapper: Hamiltonian plus a named jump set for a model."""
    from .fock import majorana_jumps, single_site_pauli_jumps

    H = build_hamiltonian(model)
    if jump_kind == "majorana":
        jumps = majorana_jumps(model.n_modes, model.mode_cap)
    elif jump_kind == "pauli":
        jumps = single_site_pauli_jumps(model.n_modes, model.mode_cap)
    else:
        raise ValueError(f"unknown jump kind {jump_kind!r}")
    return build_lindblad_set(H, jumps, filt, cluster_tol=cluster_tol, jump_kind=jump_kind)


@dataclass
class Superoperator:
    """Dense superoperator on vectorised density matrices.

    ``matrix`` acts on C-order vec(rho); ``role`` records whether it is the
    generator itself or its Hermitian parent; ``stationary_vector`` is the
    normalised kernel vector implied by detailed balance (vec(sigma) for
    the generator, vec(sqrt(sigma)) for the parent).
    """

    matrix: np.ndarray
    role: str  # "lindbladian" | "parent_hamiltonian"
    dim: int
    hermiticity_residual: float = 0.0
    stationary_vector: np.ndarray | None = None

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return (self.matrix @ rho.reshape(-1)).reshape(self.dim, self.dim)


def _dissipator_matrix(ls, ms, coherent) -> np.ndarray:
    # -i(G rho - rho G^dag) + sum_a (L rho L^dag - (M rho + rho M^dag)/2);
    # G need not be Hermitian on the twisted route, so both sides are explicit
    d = coherent.shape[0]
    eye = np.eye(d, dtype=complex)
    S = -1j * (np.kron(coherent, eye) - np.kron(eye, coherent.conj()))
    for L, M in zip(ls, ms):
        S += np.kron(L, L.conj())
        S -= 0.5 * (np.kron(M, eye) + np.kron(eye, M.conj()))
    return S


def assemble_lindbladian(lset: LindbladSet) -> Superoperator:
    """Vectorised generator: -i[G, .] + sum_a (L.L^dag - {L^dag L, .}/2)."""
    ms = [L.conj().T @ L for L in lset.lindblads]
    S = _dissipator_matrix(lset.lindblads, ms, lset.coherent)
    sig = lset.sigma.reshape(-1)
    return Superoperator(
        matrix=S,
        role="lindbladian",
        dim=lset.dim,
        stationary_vector=sig / np.linalg.norm(sig),
    )


def parent_hamiltonian(lset: LindbladSet, sigma=None, route: str = "tilde") -> Superoperator:
    """Hermitian parent of the generator, by either of two routes.

    route="direct" conjugates the assembled generator with the square root
    of the modular map built from sigma^{1/4}; route="tilde" assembles the
    parent from the twisted operators directly. The two agree up to
    numerical error and share their spectrum with the generator.
    """
    d = lset.dim
    if route == "direct":
        s4 = lset.sigma_power(0.25) if sigma is None else _quarter_power(sigma, 0.25)
        s4i = lset.sigma_power(-0.25) if sigma is None else _quarter_power(sigma, -0.25)
        S = assemble_lindbladian(lset).matrix
        gamma_half = np.kron(s4, s4.T)
        gamma_half_inv = np.kron(s4i, s4i.T)
        M = gamma_half_inv @ S @ gamma_half
    elif route == "tilde":
        M = _dissipator_matrix(lset.tilde_lindblads, lset.tilde_mops, lset.tilde_coherent)
    else:
        raise ValueError(f"unknown route {route!r}")
    herm = float(np.abs(M - M.conj().T).max())
    sqrt_sig = lset.sigma_power(0.5).reshape(-1)
    return Superoperator(
        matrix=M,
        role="parent_hamiltonian",
        dim=d,
        hermiticity_residual=herm,
        stationary_vector=sqrt_sig / np.linalg.norm(sqrt_sig),
    )


def parent_term(lset: LindbladSet, a: int) -> np.ndarray:
    """Single-jump contribution to the parent Hamiltonian (frustration-free piece)."""
    return _dissipator_matrix(
        [lset.tilde_lindblads[a]], [lset.tilde_mops[a]], lset.tilde_coherent_parts[a]
    )


def _quarter_power(sigma: np.ndarray, power: float) -> np.ndarray:
    w, V = np.linalg.eigh(sigma)
    if power < 0 and w.min() <= 0:
        raise ConditionNumberError("sigma is singular; cannot form negative powers")
    return V @ np.diag(w**power) @ V.conj().T


class ParentLinearOperator(spla.LinearOperator):
    """Matrix-free action of the parent Hamiltonian on vectorised operators.

    Used for the Krylov path at sizes where the dense 4^n superoperator
    does not fit in memory; the matvec works on d x d matrices with a few
    dense products per jump operator.
    """

    def __init__(self, lset: LindbladSet):
        self.lset = lset
        d = lset.dim
        self._gt = lset.tilde_coherent
        self._msum = 0.5 * sum(lset.tilde_mops)
        self._tildes = lset.tilde_lindblads
        super().__init__(dtype=complex, shape=(d * d, d * d))

    def _matvec(self, v):
        d = self.lset.dim
        rho = np.ascontiguousarray(v.reshape(d, d))
        out = -1j * (self._gt @ rho - rho @ self._gt.conj().T)
        out -= self._msum @ rho + rho @ self._msum.conj().T
        for L in self._tildes:
            out += L @ rho @ L.conj().T
        return out.reshape(v.shape)

    def _adjoint(self):
        return self

    def norm_bound(self) -> float:
        """Cheap upper bound on the spectral norm, for residual scales."""
        b = 2 * np.linalg.norm(self._gt, 2) + 2 * np.linalg.norm(self._msum, 2)
        b += sum(np.linalg.norm(L, 2) ** 2 for L in self._tildes)
        return float(b)


def ball_sites(model: LatticeModel, center_sites, radius: int) -> frozenset:
    """Sites within graph distance radius of center_sites on the model graph."""
    adj: dict[int, set[int]] = {i: set() for i in range(model.n_sites)}
    for i, j in model.edges:
        adj[i].add(j)
        adj[j].add(i)
    frontier = set(center_sites)
    seen = set(frontier)
    for _ in range(radius):
        frontier = {k for s in frontier for k in adj[s]} - seen
        if not frontier:
            break
        seen |= frontier
    return frozenset(seen)


def truncated_lindblad(
    model: LatticeModel,
    jump,
    jump_sites,
    filt: FilterSpec,
    radius: int,
    cluster_tol: float | None = None,
) -> np.ndarray:
    """Lindblad operator built from the Hamiltonian truncated to a ball.

    Keeps the Hamiltonian terms whose support intersects the ball of the
    given radius around the jump's support and filters the jump with the
    truncated generator. At full radius this reproduces the untruncated
    Lindblad operator exactly.
    """
    ball = ball_sites(model, jump_sites, radius)
    Hr = np.zeros((model.dim, model.dim), dtype=complex)
    for support, term in hamiltonian_terms(model):
        if support & ball:
            Hr += term
    lset = build_lindblad_set(Hr, [jump], filt, cluster_tol=cluster_tol)
    return lset.lindblads[0]


def locality_decay_probe(
    model: LatticeModel,
    site: int,
    filt: FilterSpec,
    which: int = 0,
    cluster_tol: float | None = None,
) -> list[tuple[int, float]]:
    """Deviation ||L - L^(r)|| of the ball-truncated Lindblad operator vs r.

    ``which`` selects one of the two Majorana operators of the site (0 or
    1). Radii run from 0 to the eccentricity of the site, where the
    truncation becomes total and the deviation vanishes.
    """
    mode = 2 * site if model.spinful else site
    w = build_majoranas(model.n_modes, model.mode_cap)[2 * mode + which]
    full = build_lindblad_set(build_hamiltonian(model), [w], filt, cluster_tol=cluster_tol)
    L = full.lindblads[0]
    out = []
    r = 0
    while True:
        Lr = truncated_lindblad(model, w, {site}, filt, r, cluster_tol=cluster_tol)
        out.append((r, float(np.linalg.norm(L - Lr, 2))))
        if len(ball_sites(model, {site}, r)) == model.n_sites:
            break
        r += 1
    return out


def fit_decay_slope(pairs, floor: float = 1e-14) -> float:
    """Least-squares slope of log10(deviation) against radius.

    Radii whose deviation is at or below the floor (exact truncations) are
    excluded from the fit.
    """
    rs = np.array([r for r, dev in pairs if dev > floor], dtype=float)
    devs = np.array([dev for _, dev in pairs if dev > floor], dtype=float)
    if len(rs) < 2:
        raise ValueError("not enough nonzero deviations to fit a slope")
    coeffs = np.polyfit(rs, np.log10(devs), 1)
    return float(coeffs[0])
