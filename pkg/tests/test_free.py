import numpy as np
import pytest
import scipy.linalg as sla

from fermigibbs.filters import gaussian_spec, metropolis_spec
from fermigibbs.fock import LatticeModel, build_hamiltonian, single_particle_matrix
from fermigibbs.free import (
    SpectrumPairingError,
    covariance_ode_residual,
    covariance_trace_distance,
    covariance_trajectory,
    equilibrium_covariance,
    exact_free_spectrum,
    extract_covariance,
    free_mixing_bound,
    free_partition,
    gaussian_gap_formula,
    pair_spectrum,
    rate_function_monotone,
    solve_free,
)
from fermigibbs.lindblad import (
    assemble_lindbladian,
    lindblad_set_for_model,
    parent_hamiltonian,
)
from fermigibbs.spectral import evolve, spectrum_and_gap


def chain_h(n, t=1.0):
    return single_particle_matrix(LatticeModel(n_sites=n, t=t, u=0.0))


class TestSpectrum:
    def test_trivial_mode(self):
        h = np.zeros((2, 2))
        spec = exact_free_spectrum(h, gaussian_spec(1.0))
        assert np.allclose(spec, [-4.0, -2.0, -2.0, 0.0], atol=1e-14)

    def test_maximum_is_zero(self):
        spec = exact_free_spectrum(chain_h(3), gaussian_spec(0.7))
        assert spec.max() == 0.0
        assert spec.min() < 0.0

    @pytest.mark.parametrize("make_filter", [gaussian_spec, lambda b: metropolis_spec(b, 10.0)])
    @pytest.mark.parametrize("n", [2, 3])
    def test_matches_dense_lindbladian(self, n, make_filter):
        beta = 1.0
        filt = make_filter(beta)
        model = LatticeModel(n_sites=n, t=1.0, u=0.0, beta=beta)
        lset = lindblad_set_for_model(model, filt, "majorana")
        dense = np.sort(np.linalg.eigvals(assemble_lindbladian(lset).matrix).real)
        closed = exact_free_spectrum(single_particle_matrix(model), filt)
        assert np.abs(dense - closed).max() <= 1e-9

    def test_gap_equals_multiset_gap(self):
        filt = gaussian_spec(1.0)
        h = chain_h(3)
        sol = solve_free(h, filt)
        spec = exact_free_spectrum(h, filt)
        nonzero = spec[spec < -1e-14]
        assert sol.gap == pytest.approx(-nonzero.max(), abs=1e-14)

    @pytest.mark.parametrize("n", range(2, 9))
    def test_gaussian_norm_formula(self, n):
        beta = 1.0
        filt = gaussian_spec(beta)
        h = chain_h(n)
        assert rate_function_monotone(h, filt)
        sol = solve_free(h, filt)
        formula = gaussian_gap_formula(float(np.abs(sol.epsilons).max()), beta)
        assert abs(sol.gap - formula) <= 1e-12

    def test_metropolis_gap_closure_with_support(self):
        h = chain_h(2)  # ||h|| = 1/4, spectral scale 4||h|| = 1
        open_rates = solve_free(h, metropolis_spec(1.0, support=1.01)).rates
        closed_rates = solve_free(h, metropolis_spec(1.0, support=0.99)).rates
        assert open_rates.min() > 0.0
        assert closed_rates.min() == 0.0


class TestCovariance:
    def test_starts_at_zero(self):
        cov = covariance_trajectory(chain_h(3), gaussian_spec(1.0), 0.0)
        assert np.abs(cov.gamma).max() == 0.0

    def test_structure(self):
        cov = covariance_trajectory(chain_h(3), gaussian_spec(1.0), 0.7)
        g = cov.gamma
        assert np.abs(g + g.T).max() <= 1e-12
        eigs = np.linalg.eigvalsh(1j * g)
        assert eigs.min() >= -0.5 - 1e-12 and eigs.max() <= 0.5 + 1e-12

    def test_long_time_limit(self):
        filt = gaussian_spec(1.0)
        h = chain_h(3)
        sol = solve_free(h, filt)
        late = covariance_trajectory(h, filt, 1e3 / sol.gap).gamma
        assert np.abs(late - equilibrium_covariance(h, 1.0)).max() <= 1e-8

    @pytest.mark.parametrize("t", [0.1, 1.0, 10.0])
    def test_ode_residual(self, t):
        assert covariance_ode_residual(chain_h(3), gaussian_spec(1.0), t) <= 1e-9

    @pytest.mark.parametrize("t", [0.1, 1.0, 10.0])
    def test_matches_full_evolution(self, t):
        beta = 1.0
        model = LatticeModel(n_sites=3, t=1.0, u=0.0, beta=beta)
        filt = gaussian_spec(beta)
        lset = lindblad_set_for_model(model, filt, "majorana")
        rho_t = evolve(lset, np.eye(model.dim, dtype=complex) / model.dim, t)
        extracted = extract_covariance(rho_t, model.n_modes)
        closed = covariance_trajectory(single_particle_matrix(model), filt, t).gamma
        assert np.abs(extracted - closed).max() <= 1e-8

    def test_rejects_negative_time(self):
        with pytest.raises(ValueError):
            covariance_trajectory(chain_h(2), gaussian_spec(1.0), -0.1)


class TestMixingBound:
    def test_already_close_is_clamped(self):
        h = chain_h(3)
        bound = free_mixing_bound(h, gaussian_spec(1.0), epsilon=10.0)
        assert bound.clamped and bound.time == 0.0

    def test_doubling_modes_adds_log_two(self):
        filt = gaussian_spec(1.0)
        h = chain_h(3)
        h2 = sla.block_diag(h, h)  # two copies: same rates, twice the modes
        b1 = free_mixing_bound(h, filt, 1e-4)
        b2 = free_mixing_bound(h2, filt, 1e-4)
        rate_min = solve_free(h, filt).rates.min()
        assert b2.time - b1.time == pytest.approx(np.log(2.0) / (4.0 * rate_min), rel=1e-10)

    def test_certificate_holds(self):
        bound = free_mixing_bound(chain_h(3), gaussian_spec(1.0), epsilon=1e-3)
        assert bound.certificate <= 1e-3

    def test_certified_against_full_dynamics(self):
        beta = 1.0
        model = LatticeModel(n_sites=3, t=1.0, u=0.0, beta=beta)
        filt = gaussian_spec(beta)
        h = single_particle_matrix(model)
        bound = free_mixing_bound(h, filt, epsilon=1e-3)
        lset = lindblad_set_for_model(model, filt, "majorana")
        rho_t = evolve(lset, np.eye(model.dim, dtype=complex) / model.dim, bound.time)
        from fermigibbs.spectral import trace_distance

        assert trace_distance(rho_t, lset.sigma) <= 1e-3


class TestPartition:
    def test_two_site_closed_form(self):
        z = free_partition(chain_h(2), beta=1.0)
        assert z == pytest.approx((2.0 * np.cosh(0.5)) ** 2, rel=1e-12)
        assert z == pytest.approx(2.0 + 2.0 * np.cosh(1.0), rel=1e-12)
        assert z == pytest.approx(5.0862, abs=1e-4)

    def test_infinite_temperature(self):
        assert free_partition(chain_h(4), beta=0.0) == pytest.approx(2.0**4, rel=1e-14)

    def test_trivial_hamiltonian(self):
        h = np.zeros((6, 6))
        for beta in (0.0, 1.0, 7.0):
            assert free_partition(h, beta) == pytest.approx(2.0**3, rel=1e-14)

    @pytest.mark.parametrize("n", range(2, 7))
    def test_matches_dense_trace(self, n):
        beta = 1.0
        model = LatticeModel(n_sites=n, t=1.0, u=0.0, beta=beta)
        H = build_hamiltonian(model).matrix
        dense = np.exp(-beta * np.linalg.eigvalsh(H)).sum()
        closed = free_partition(single_particle_matrix(model), beta)
        assert abs(closed - dense) <= 1e-10 * dense

    def test_unpaired_spectrum_rejected(self):
        with pytest.raises(SpectrumPairingError):
            pair_spectrum(np.array([-1.0, 2.0]))


def test_covariance_trace_distance_from_singular_values():
    rng = np.random.default_rng(8)
    a = rng.standard_normal((4, 4))
    a = a - a.T
    dist = covariance_trace_distance(a, np.zeros_like(a))
    assert dist == pytest.approx(0.5 * np.abs(np.linalg.eigvalsh(1j * a)).sum(), rel=1e-12)


def test_parent_gap_matches_free_gap_interaction_free():
    beta = 0.5
    model = LatticeModel(n_sites=3, t=1.0, u=0.0, beta=beta)
    filt = gaussian_spec(beta)
    lset = lindblad_set_for_model(model, filt, "majorana")
    report = spectrum_and_gap(parent_hamiltonian(lset))
    sol = solve_free(single_particle_matrix(model), filt)
    assert report.gap == pytest.approx(sol.gap, abs=1e-9)
