"""Exact numerical simulation of detailed-balance Lindbladian Gibbs samplers
for small fermionic lattice models, with closed-form cross-checks for
quadratic Hamiltonians, the separable no-hopping point, and partition
functions."""

__version__ = "0.1.0"

from .atomic import (
    AtomicFullCheck,
    AtomicSolution,
    atomic_full_check,
    atomic_gap_curve,
    atomic_reduced_matrix,
    gap_symmetry_deviation,
    identity_kernel_residual,
)
from .filters import (
    FilterSpec,
    coherent_weight,
    evenized_spec,
    filter_spec,
    gaussian_filter,
    gaussian_spec,
    metropolis_filter,
    metropolis_spec,
)
from .fock import (
    FockOperator,
    LatticeModel,
    ResourceCapError,
    build_hamiltonian,
    build_majoranas,
    chain_single_particle_spectrum,
    majorana_jumps,
    single_particle_matrix,
    single_site_pauli_jumps,
)
from .free import (
    CovarianceMatrix,
    FreeMixingBound,
    FreeSolution,
    covariance_trajectory,
    equilibrium_covariance,
    exact_free_spectrum,
    extract_covariance,
    free_mixing_bound,
    free_partition,
    gaussian_gap_formula,
    solve_free,
)
from .lindblad import (
    BohrDecomposition,
    ConditionNumberError,
    LindbladSet,
    ParentLinearOperator,
    Superoperator,
    assemble_lindbladian,
    bohr_decompose,
    build_lindblad_set,
    lindblad_set_for_model,
    locality_decay_probe,
    parent_hamiltonian,
    truncated_lindblad,
)
from .partition import (
    PartitionEstimate,
    Schedule,
    dense_partition,
    telescoping_partition,
    uniform_schedule,
)
from .spectral import (
    EigensolverError,
    SlopeReport,
    SpectralReport,
    UnboundedMixingError,
    evolve,
    gap_slope,
    mixing_time_bound,
    model_gap_report,
    one_sided_slopes,
    spectrum_and_gap,
    trace_distance,
)
