"""Telescoping-product estimation of interacting partition functions.

The partition function at coupling u factorises as the quadratic reference
value times a product of step ratios Z(u_{i+1})/Z(u_i), each of which is the
expectation of exp(beta H(u_i)) exp(-beta H(u_{i+1})) in the Gibbs state at
u_i. Ratios are evaluated either as exact dense traces or by simulating
projective measurements of the (symmetrised) step observable, drawing
outcomes from its eigenbasis with Gibbs-state probabilities.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fock import LatticeModel, build_hamiltonian, quadratic_trace_constant, single_particle_matrix
from .free import free_partition


@dataclass(frozen=True)
class Schedule:
    """Coupling schedule from zero monotonically toward the target value."""

    couplings: tuple[float, ...]

    def __post_init__(self):
        if len(self.couplings) < 1:
            raise ValueError("schedule must contain at least the starting coupling")
        if self.couplings[0] != 0.0:
            raise ValueError("schedule must start at coupling 0")
        steps = np.diff(self.couplings)
        sign = 1.0 if self.couplings[-1] >= 0 else -1.0
        if len(steps) and np.any(sign * steps < 0):
            raise ValueError("schedule must be monotone toward the target")

    @property
    def target(self) -> float:
        return self.couplings[-1]


def uniform_schedule(target: float, n_steps: int | None = None, size_hint: int = 4) -> Schedule:
    """Uniform schedule; the default step count scales with the system size."""
    if n_steps is None:
        n_steps = max(1, int(np.ceil(abs(target) * size_hint)))
    return Schedule(tuple(np.linspace(0.0, target, n_steps + 1)))


@dataclass
class PartitionEstimate:
    """Telescoping estimate with its per-step bookkeeping."""

    value: float
    z_free: float
    ratios: list[float]
    ratio_stderrs: list[float]
    mode: str
    relative_stderr: float
    hermitian_as_written: bool
    seed: int | None = None
    schedule: Schedule | None = field(default=None, repr=False)

    @property
    def stderr(self) -> float:
        return self.value * self.relative_stderr


def _expm_herm(H: np.ndarray, scale: float) -> np.ndarray:
    w, V = np.linalg.eigh(H)
    return V @ np.diag(np.exp(scale * w)) @ V.conj().T


def telescoping_partition(
    model: LatticeModel,
    schedule: Schedule | None = None,
    mode: str = "exact",
    shots: int = 10_000,
    seed: int | None = None,
) -> PartitionEstimate:
    """Estimate Tr exp(-beta H(u)) along a coupling schedule.

    Parameters
    ----------
    model : LatticeModel
        Defines beta, the hopping background and the target coupling
        model.u reached by the schedule.
    schedule : Schedule, optional
        Defaults to a uniform schedule with Theta(n_sites) steps per unit
        coupling, ending at model.u.
    mode : str
        "exact" evaluates every ratio as a dense trace; "sampled" draws
        ``shots`` simulated measurement outcomes per step (reproducible
        through ``seed``).
    """
    beta = model.beta
    if schedule is None:
        schedule = uniform_schedule(model.u, size_hint=model.n_sites)
    if abs(schedule.target - model.u) > 1e-12 * max(1.0, abs(model.u)):
        raise ValueError("schedule must end at the model coupling")
    if mode not in ("exact", "sampled"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "sampled":
        if shots < 1:
            raise ValueError("sampled mode needs at least one shot")
        if seed is None:
            raise ValueError("sampled mode needs a seed for reproducibility")
        step_seeds = np.random.SeedSequence(seed).spawn(max(len(schedule.couplings) - 1, 1))

    free_model = model.replace(u=0.0)
    h = single_particle_matrix(free_model)
    shift = quadratic_trace_constant(build_hamiltonian(free_model).matrix)
    z_free = free_partition(h, beta) * float(np.exp(-beta * shift))

    hams = [build_hamiltonian(model.replace(u=float(u))).matrix for u in schedule.couplings]
    ratios: list[float] = []
    stderrs: list[float] = []
    hermitian_as_written = True
    for i in range(len(hams) - 1):
        Hi, Hj = hams[i], hams[i + 1]
        expo_plus = _expm_herm(Hi, +beta)
        expo_minus = _expm_herm(Hj, -beta)
        as_written = expo_plus @ expo_minus
        if np.abs(as_written - as_written.conj().T).max() > 1e-10 * np.abs(as_written).max():
            hermitian_as_written = False
        wi, Vi = np.linalg.eigh(Hi)
        gibbs = np.exp(-beta * (wi - wi.min()))
        gibbs /= gibbs.sum()
        sigma_i = Vi @ np.diag(gibbs) @ Vi.conj().T
        if mode == "exact":
            ratios.append(float(np.trace(as_written @ sigma_i).real))
            stderrs.append(0.0)
        else:
            # Hermitian observable with the same Gibbs expectation as the
            # as-written product: exp(bH_i/2) exp(-bH_j) exp(bH_i/2)
            half = _expm_herm(Hi, +beta / 2.0)
            obs = half @ expo_minus @ half
            obs = 0.5 * (obs + obs.conj().T)
            outcomes, W = np.linalg.eigh(obs)
            probs = np.einsum("ij,jk,ki->i", W.conj().T, sigma_i, W).real
            probs = np.clip(probs, 0.0, None)
            probs /= probs.sum()
            rng = np.random.default_rng(step_seeds[i])
            draws = rng.choice(outcomes, size=shots, p=probs)
            ratios.append(float(draws.mean()))
            stderrs.append(float(draws.std(ddof=1) / np.sqrt(shots)))

    if any(r <= 0 for r in ratios):
        raise ArithmeticError("nonpositive step ratio; schedule too coarse")
    value = z_free * float(np.prod(ratios)) if ratios else z_free
    rel = float(np.sqrt(sum((s / r) ** 2 for s, r in zip(stderrs, ratios))))
    return PartitionEstimate(
        value=value,
        z_free=z_free,
        ratios=ratios,
        ratio_stderrs=stderrs,
        mode=mode,
        relative_stderr=rel,
        hermitian_as_written=hermitian_as_written,
        seed=seed,
        schedule=schedule,
    )


def dense_partition(model: LatticeModel) -> float:
    """Brute-force Tr exp(-beta H) for cross-checks."""
    H = build_hamiltonian(model).matrix
    w = np.linalg.eigvalsh(H)
    return float(np.exp(-model.beta * w).sum())
