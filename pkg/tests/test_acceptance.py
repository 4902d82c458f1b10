"""End-to-end acceptance suite.

Each test implements one numbered acceptance criterion at its stated
tolerance and prints a one-line pass message; run with `pytest -s` to see
the lines as they stream.
"""

import time
import warnings

import numpy as np
import pytest
import scipy.linalg as sla

from fermigibbs.atomic import (
    atomic_full_check,
    atomic_reduced_matrix,
    identity_kernel_residual,
)
from fermigibbs.filters import evenized_spec, gaussian_spec, metropolis_spec
from fermigibbs.fock import LatticeModel, single_particle_matrix
from fermigibbs.free import (
    covariance_ode_residual,
    covariance_trajectory,
    exact_free_spectrum,
    extract_covariance,
    free_partition,
    gaussian_gap_formula,
    rate_function_monotone,
    solve_free,
)
from fermigibbs.lindblad import (
    assemble_lindbladian,
    fit_decay_slope,
    lindblad_set_for_model,
    locality_decay_probe,
    parent_hamiltonian,
)
from fermigibbs.partition import dense_partition, telescoping_partition, uniform_schedule
from fermigibbs.spectral import (
    evolve,
    gap_slope,
    mixing_time_bound,
    model_gap_report,
    spectrum_and_gap,
    trace_distance,
)


def both_filters(beta):
    return [("gaussian", gaussian_spec(beta)), ("metropolis", metropolis_spec(beta, 10.0))]


def report_pass(num, text):
    print(f"\n[PASS] criterion {num}: {text}")


def test_criterion_01_free_fermion_oracle_equivalence():
    start = time.perf_counter()
    worst = 0.0
    for n in (2, 3):
        for beta in (0.5, 1.0):
            for _, filt in both_filters(beta):
                model = LatticeModel(n_sites=n, t=1.0, u=0.0, beta=beta)
                lset = lindblad_set_for_model(model, filt, "majorana")
                dense = np.sort(np.linalg.eigvals(assemble_lindbladian(lset).matrix).real)
                closed = exact_free_spectrum(single_particle_matrix(model), filt)
                worst = max(worst, float(np.abs(dense - closed).max()))
    elapsed = time.perf_counter() - start
    assert worst <= 1e-9
    assert elapsed <= 120.0
    report_pass(1, f"dense vs closed-form spectra, max dev {worst:.2e} in {elapsed:.1f}s")


def test_criterion_02_gaussian_gap_formula():
    worst_dense = 0.0
    for n in (2, 3):
        for beta in (0.5, 1.0):
            model = LatticeModel(n_sites=n, t=1.0, u=0.0, beta=beta)
            report = model_gap_report(model, gaussian_spec(beta), "majorana", method="dense")
            h = single_particle_matrix(model)
            h_norm = float(np.abs(np.linalg.eigvalsh(h)).max())
            formula = gaussian_gap_formula(h_norm, beta)
            worst_dense = max(worst_dense, abs(report.gap - formula))
    assert worst_dense <= 1e-9
    worst_closed = 0.0
    for n in range(2, 9):
        beta = 1.0
        filt = gaussian_spec(beta)
        h = single_particle_matrix(LatticeModel(n_sites=n, t=1.0, u=0.0, beta=beta))
        assert rate_function_monotone(h, filt)
        sol = solve_free(h, filt)
        formula = gaussian_gap_formula(float(np.abs(sol.epsilons).max()), beta)
        worst_closed = max(worst_closed, abs(sol.gap - formula))
    assert worst_closed <= 1e-12
    report_pass(2, f"gap formula: dense dev {worst_dense:.2e}, closed-form dev {worst_closed:.2e}")


def test_criterion_03_detailed_balance_and_stationarity():
    rng = np.random.default_rng(123)
    worst_kms = worst_stat = worst_imag = worst_real = 0.0
    beta = 1.0
    for n in (2, 3):
        for u in (0.0, 0.5, 2.0):
            for _, filt in both_filters(beta):
                for jumps in ("majorana", "pauli"):
                    model = LatticeModel(n_sites=n, t=1.0, u=u, beta=beta)
                    lset = lindblad_set_for_model(model, filt, jumps)
                    sup = assemble_lindbladian(lset)
                    norm = np.linalg.norm(sup.matrix, 2)
                    stat = np.linalg.norm(sup.matrix @ sup.stationary_vector) / norm
                    worst_stat = max(worst_stat, float(stat))
                    eigs = np.linalg.eigvals(sup.matrix)
                    scale = max(np.abs(eigs).max(), 1.0)
                    worst_imag = max(worst_imag, float(np.abs(eigs.imag).max() / scale))
                    worst_real = max(worst_real, float(eigs.real.max() / scale))
                    assert (np.abs(eigs) <= 1e-10 * scale).sum() == 1
                    adjoint = sup.matrix.conj().T
                    s2 = sla.sqrtm(lset.sigma)
                    d = model.dim
                    for _ in range(20):
                        A = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
                        B = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
                        LB = (adjoint @ B.reshape(-1)).reshape(d, d)
                        LA = (adjoint @ A.reshape(-1)).reshape(d, d)
                        lhs = np.trace(A.conj().T @ s2 @ LB @ s2)
                        rhs = np.trace(LA.conj().T @ s2 @ B @ s2)
                        worst_kms = max(worst_kms, abs(lhs - rhs))
    assert worst_kms <= 1e-9
    assert worst_stat <= 1e-10
    assert worst_imag <= 1e-9
    assert worst_real <= 1e-10
    report_pass(
        3,
        f"KMS dev {worst_kms:.2e}, stationarity {worst_stat:.2e}, "
        f"imag {worst_imag:.2e}, max real {worst_real:.2e}, kernel simple",
    )


def test_criterion_04_parent_route_agreement():
    model = LatticeModel(n_sites=2, t=1.0, u=0.5, beta=1.0)
    lset = lindblad_set_for_model(model, gaussian_spec(1.0), "majorana")
    direct = parent_hamiltonian(lset, route="direct")
    tilde = parent_hamiltonian(lset, route="tilde")
    a = np.sort(np.linalg.eigvalsh(0.5 * (direct.matrix + direct.matrix.conj().T)))
    b = np.sort(np.linalg.eigvalsh(0.5 * (tilde.matrix + tilde.matrix.conj().T)))
    dev = float(np.abs(a - b).max())
    assert dev <= 1e-9
    report_pass(4, f"direct vs twisted parent spectra, max dev {dev:.2e}")


def test_criterion_05_covariance_trajectory():
    beta = 1.0
    model = LatticeModel(n_sites=3, t=1.0, u=0.0, beta=beta)
    filt = gaussian_spec(beta)
    h = single_particle_matrix(model)
    lset = lindblad_set_for_model(model, filt, "majorana")
    rho0 = np.eye(model.dim, dtype=complex) / model.dim
    worst = 0.0
    for t, rho_t in zip((0.1, 1.0, 10.0), evolve(lset, rho0, [0.1, 1.0, 10.0])):
        closed = covariance_trajectory(h, filt, t).gamma
        extracted = extract_covariance(rho_t, model.n_modes)
        worst = max(worst, float(np.abs(closed - extracted).max()))
        assert covariance_ode_residual(h, filt, t) <= 1e-9
    assert worst <= 1e-8
    report_pass(5, f"closed-form vs evolved covariance, max dev {worst:.2e}; ODE residual ok")


def test_criterion_06_atomic_limit():
    filt = gaussian_spec(1.0)
    check = atomic_full_check(1.0, filt)
    assert check.minkowski_deviation <= 1e-9
    gap0 = atomic_reduced_matrix(0.0, filt).gap
    assert gap0 == pytest.approx(2.0, abs=1e-9)
    gap50 = atomic_reduced_matrix(50.0, filt).gap
    assert gap50 < 0.05 * gap0
    even_res = identity_kernel_residual(3.0, evenized_spec(filt))
    assert even_res <= 1e-12
    report_pass(
        6,
        f"separability dev {check.minkowski_deviation:.2e}, gap(0)={gap0:.12f}, "
        f"gap(50)/gap(0)={gap50 / gap0:.4f}, even-filter residual {even_res:.2e}",
    )


def test_criterion_07_partition_function():
    model = LatticeModel(n_sites=4, t=1.0, u=0.5, beta=1.0)
    exact = telescoping_partition(model, mode="exact")
    dense = dense_partition(model)
    rel = abs(exact.value - dense) / dense
    assert rel <= 1e-8
    worst_free = 0.0
    for n in range(2, 7):
        free_model = LatticeModel(n_sites=n, t=1.0, u=0.0, beta=1.0)
        z = free_partition(single_particle_matrix(free_model), 1.0)
        z_dense = dense_partition(free_model)
        worst_free = max(worst_free, abs(z - z_dense) / z_dense)
    assert worst_free <= 1e-10
    sampled = telescoping_partition(model, mode="sampled", shots=10_000, seed=20240817)
    spread = 3.0 * max(sampled.stderr, 1e-30)
    assert abs(sampled.value - exact.value) <= spread
    report_pass(
        7,
        f"telescoping rel dev {rel:.2e}, free-formula dev {worst_free:.2e}, "
        f"sampled within {abs(sampled.value - exact.value) / max(sampled.stderr, 1e-30):.2f} SE",
    )


def test_criterion_08_mixing_bound_validity():
    model = LatticeModel(n_sites=2, t=1.0, u=0.5, beta=1.0)
    lset = lindblad_set_for_model(model, gaussian_spec(1.0), "majorana")
    report = spectrum_and_gap(parent_hamiltonian(lset))
    eps = 1e-3
    t_mix = mixing_time_bound(report, lset.sigma, eps)
    rng = np.random.default_rng(2718)
    worst = 0.0
    for _ in range(10):
        psi = rng.standard_normal(model.dim) + 1j * rng.standard_normal(model.dim)
        psi /= np.linalg.norm(psi)
        rho_t = evolve(lset, np.outer(psi, psi.conj()), t_mix)
        worst = max(worst, trace_distance(rho_t, lset.sigma))
    assert worst <= eps
    report_pass(8, f"bound t={t_mix:.3f}; worst distance over 10 pure states {worst:.2e} <= {eps}")


def test_criterion_09_slope_boundedness():
    beta = 1.0
    filt = gaussian_spec(beta)
    slopes = {}
    for n in range(4, 9):
        report = gap_slope(
            LatticeModel(n_sites=n, t=1.0, beta=beta), filt, "majorana",
            h_fd=1e-4, sides="plus",
        )
        slopes[n] = report.d_plus
    bound = 1.1 * max(slopes[6], slopes[7])
    assert slopes[8] <= bound
    summary = ", ".join(f"d+({n})={v:.4f}" for n, v in slopes.items())
    report_pass(9, f"{summary}; d+(8) <= 1.1*max(d+(6), d+(7)) = {bound:.4f}")


def test_criterion_10_metropolis_support_effect():
    beta = 1.0
    filt = metropolis_spec(beta, 10.0)
    opens, closes = [], []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # the closed regime warns by design
        for n in (3, 4, 5):
            for u in (2.0, 4.0, 6.0):
                rep = model_gap_report(
                    LatticeModel(n_sites=n, t=1.0, u=u, beta=beta), filt, "pauli"
                )
                opens.append(rep.mixing_gap)
                assert rep.mixing_gap > 0.0
            for u in (-15.0, -14.0, 14.0, 15.0):
                rep = model_gap_report(
                    LatticeModel(n_sites=n, t=1.0, u=u, beta=beta), filt, "pauli"
                )
                closes.append(rep.mixing_gap)
                assert rep.mixing_gap <= 1e-6
    report_pass(
        10,
        f"gap open on [2,6] (min {min(opens):.2e}) and closed for |u|>=14 "
        f"(max {max(closes):.2e})",
    )


def test_criterion_11_locality_decay():
    model = LatticeModel(n_sites=8, t=1.0, u=0.0, beta=1.0)
    pairs = locality_decay_probe(model, site=4, filt=gaussian_spec(1.0))
    devs = [dev for _, dev in pairs]
    assert devs[-1] == 0.0
    slope = fit_decay_slope(pairs)
    assert slope < 0.0
    report_pass(11, f"log-deviation slope {slope:.3f} over radii 0..{pairs[-1][0]}, exact at full radius")
