"""Functionals and monitors against quadrature and extended-precision oracles."""

import numpy as np
import pytest

from oblab.diagnostics import (
    DissipationReport,
    EnergyReport,
    acoustic_ratio,
    convergence_gap,
    dissipation_D,
    energy_E,
    energy_inequality_monitor,
    fit_rate,
    relative_entropy,
    sqrt_density_lemma_check,
)
from oblab.errors import ConfigError, StateError
from oblab.grid import (
    Field,
    SymTensorField,
    VectorField,
    coordinates,
    make_grid,
)
from oblab.initial_data import matched_limit_init, well_prepared_init
from oblab.model import CompressibleState, IncompressibleState, PhysicalParams
from oblab.timestep import DiagnosticRecord, Trajectory

from oracles import direct_weighted_sobolev, taylor_green

GRID = make_grid(2, 32, 2 * np.pi)


def random_state(seed=13, epsilon=0.4, delta=0.05):
    return well_prepared_init(GRID, PhysicalParams(), epsilon, delta, seed)


def synthetic_trajectory(times, e_values, d_values):
    traj = Trajectory()
    for t, e, d in zip(times, e_values, d_values):
        traj.append(
            DiagnosticRecord(
                time=t,
                energy=EnergyReport(time=t, e_phi=e, e_u=0.0, e_eta=0.0, e_tau=0.0),
                dissipation=DissipationReport(
                    time=t, d_grad_u=d, d_div_u=0.0, d_grad_eta=0.0,
                    d_tau=0.0, d_grad_tau=0.0,
                ),
                div_u_h1=0.0,
                pprime_grad_phi_h1=0.0,
                max_abs_u=0.0,
                state_max_abs=0.0,
            )
        )
    return traj


class TestEnergy:
    def test_rest_state_zero(self):
        report = energy_E(CompressibleState.rest(GRID, 0.5), PhysicalParams())
        assert report.e_total == 0.0

    def test_constant_eta_shift(self):
        p = PhysicalParams(beta=0.5, L_poly=2.0, zbar=0.1)
        c = 0.2
        s = CompressibleState(
            phi=Field.zeros(GRID),
            u=VectorField.zeros(GRID),
            eta=Field.constant(GRID, 1.0 + c),
            tau=SymTensorField.zeros(GRID),
            epsilon=0.5,
        )
        report = energy_E(s, p)
        volume = GRID.box_length**2
        expected = p.eta_weight * c**2 * volume
        assert abs(report.e_eta - expected) < 1e-12 * expected
        assert report.e_phi == 0.0 and report.e_u == 0.0 and report.e_tau == 0.0

    def test_random_state_matches_direct_oracle(self):
        p = PhysicalParams(gamma=1.4, a=1.3)
        s = random_state()
        report = energy_E(s, p)
        rho = 1.0 + s.epsilon * s.phi.values
        pprime = p.a * p.gamma * rho ** (p.gamma - 1.0)
        L = GRID.box_length
        e_phi = direct_weighted_sobolev([s.phi.values], [1], 3, L, pprime) ** 2
        e_u = (
            direct_weighted_sobolev([c.values for c in s.u.components], [1, 1], 3, L, rho)
            ** 2
        )
        e_eta = p.eta_weight * direct_weighted_sobolev(
            [s.eta.values - 1.0], [1], 3, L
        ) ** 2
        e_tau = (p.beta / (2 * p.k**2)) * direct_weighted_sobolev(
            [c.values for c in s.tau.components], [1, 2, 1], 3, L
        ) ** 2
        total = e_phi + e_u + e_eta + e_tau
        assert abs(report.e_total - total) < 1e-10 * total

    def test_quadratic_homogeneity_exact(self):
        p = PhysicalParams()
        s = random_state(seed=14)
        base = energy_E(s, p)
        doubled = CompressibleState(
            phi=s.phi,
            u=s.u,
            eta=Field(GRID, 1.0 + 2.0 * (s.eta.values - 1.0)),
            tau=SymTensorField.from_arrays(
                GRID, [2.0 * c.values for c in s.tau.components]
            ),
            epsilon=s.epsilon,
        )
        scaled = energy_E(doubled, p)
        assert scaled.e_eta == 4.0 * base.e_eta
        assert scaled.e_tau == 4.0 * base.e_tau


class TestDissipation:
    def test_rest_state_zero(self):
        report = dissipation_D(CompressibleState.rest(GRID, 0.5), PhysicalParams())
        assert report.d_total == 0.0

    def test_constant_isotropic_tau(self):
        p = PhysicalParams(beta=0.5, A0=1.2, k=0.8)
        c = 0.3
        arrays = [np.full(GRID.shape, c), np.zeros(GRID.shape), np.full(GRID.shape, c)]
        s = CompressibleState(
            phi=Field.zeros(GRID),
            u=VectorField.zeros(GRID),
            eta=Field.constant(GRID, 1.0),
            tau=SymTensorField.from_arrays(GRID, arrays),
            epsilon=0.5,
        )
        report = dissipation_D(s, p)
        volume = GRID.box_length**2
        expected = (p.beta * p.A0 / (4 * p.k**2)) * 2 * c**2 * volume
        assert abs(report.d_tau - expected) < 1e-12 * expected
        assert report.d_total == pytest.approx(expected, rel=1e-12)

    def test_random_state_matches_direct_oracle(self):
        p = PhysicalParams()
        s = random_state(seed=15)
        report = dissipation_D(s, p)
        L = GRID.box_length
        modes = np.fft.fftfreq(GRID.n, d=1.0 / GRID.n)
        k_axis = 2 * np.pi * modes / L
        k_axis[GRID.n // 2] = 0.0

        def deriv(arr, axis):
            shape = [1, 1]
            shape[axis] = GRID.n
            return np.fft.ifftn(np.fft.fftn(arr) * (1j * k_axis.reshape(shape))).real

        u = [c.values for c in s.u.components]
        d_grad_u = p.mu1 * sum(
            direct_weighted_sobolev([deriv(u[i], j)], [1], 3, L) ** 2
            for i in range(2)
            for j in range(2)
        )
        div_u = deriv(u[0], 0) + deriv(u[1], 1)
        d_div = p.mu2 * direct_weighted_sobolev([div_u], [1], 3, L) ** 2
        d_eta = p.nu * p.eta_weight * sum(
            direct_weighted_sobolev([deriv(s.eta.values, j)], [1], 3, L) ** 2
            for j in range(2)
        )
        tau = [c.values for c in s.tau.components]
        d_tau = (p.beta * p.A0 / (4 * p.k**2)) * direct_weighted_sobolev(
            tau, [1, 2, 1], 3, L
        ) ** 2
        d_grad_tau = (p.beta * p.nu / (2 * p.k**2)) * sum(
            m * direct_weighted_sobolev([deriv(t, j)], [1], 3, L) ** 2
            for m, t in zip([1, 2, 1], tau)
            for j in range(2)
        )
        total = d_grad_u + d_div + d_eta + d_tau + d_grad_tau
        assert abs(report.d_total - total) < 1e-10 * total


class TestRelativeEntropy:
    def test_equilibrium_zero(self):
        s = CompressibleState.rest(GRID, 0.3)
        field, integral = relative_entropy(s, PhysicalParams())
        assert np.max(np.abs(field.values)) == 0.0
        assert integral == 0.0

    def test_gamma_two_closed_form(self):
        # gamma = 2: rho^2 - 2(rho-1) - 1 = (rho-1)^2, so Pi = a phi^2
        p = PhysicalParams(a=1.0, gamma=2.0)
        x, y = coordinates(GRID)
        phi = 0.9 * np.cos(x) + 0.5 * np.sin(2 * y)
        s = CompressibleState(
            phi=Field(GRID, phi),
            u=VectorField.zeros(GRID),
            eta=Field.constant(GRID, 1.0),
            tau=SymTensorField.zeros(GRID),
            epsilon=0.5,
        )
        field, _ = relative_entropy(s, p)
        assert np.max(np.abs(field.values - p.a * phi**2)) < 1e-14

    def test_extended_precision_oracle(self):
        import mpmath

        mpmath.mp.dps = 50
        p = PhysicalParams(a=1.0, gamma=1.4)
        epsilon = 0.1
        rng = np.random.default_rng(16)
        rho = 0.8 + 0.4 * rng.random(GRID.shape)  # in [0.8, 1.2]
        phi = (rho - 1.0) / epsilon
        s = CompressibleState(
            phi=Field(GRID, phi),
            u=VectorField.zeros(GRID),
            eta=Field.constant(GRID, 1.0),
            tau=SymTensorField.zeros(GRID),
            epsilon=epsilon,
        )
        _, integral = relative_entropy(s, p)
        gamma = mpmath.mpf("1.4")
        acc = mpmath.mpf(0)
        for r in rho.ravel():
            rm = mpmath.mpf(r)
            acc += rm**gamma - gamma * (rm - 1) - 1
        oracle = float(
            (mpmath.mpf(p.a) / (gamma - 1))
            / mpmath.mpf(epsilon) ** 2
            * acc
            * mpmath.mpf(GRID.cell_volume)
        )
        assert abs(integral - oracle) < 1e-12 * oracle

    def test_pointwise_nonnegative(self):
        for seed in range(5):
            s = random_state(seed=seed)
            field, _ = relative_entropy(s, PhysicalParams(gamma=1.7))
            assert np.min(field.values) >= 0.0

    def test_nonpositive_density_rejected(self):
        s = CompressibleState(
            phi=Field.constant(GRID, -2.5),
            u=VectorField.zeros(GRID),
            eta=Field.constant(GRID, 1.0),
            tau=SymTensorField.zeros(GRID),
            epsilon=0.5,
        )
        with pytest.raises(StateError):
            relative_entropy(s, PhysicalParams())


class TestSqrtDensityLemma:
    def test_equilibrium_returns_zero(self):
        assert sqrt_density_lemma_check(
            CompressibleState.rest(GRID, 0.5), PhysicalParams()
        ) == 0.0

    def test_small_perturbation_limit_half(self):
        # sqrt(1+x) ~ 1 + x/2 and Pi -> a phi^2: ratio -> 1/(2 sqrt(a gamma / 2))
        p = PhysicalParams(a=1.0, gamma=2.0)
        x, _ = coordinates(GRID)
        s = CompressibleState(
            phi=Field(GRID, 1e-7 * np.cos(x)),
            u=VectorField.zeros(GRID),
            eta=Field.constant(GRID, 1.0),
            tau=SymTensorField.zeros(GRID),
            epsilon=0.5,
        )
        assert abs(sqrt_density_lemma_check(s, p) - 0.5) < 1e-6

    def test_ratio_bounded_over_random_states(self):
        # |eps phi| <= 0.5 scan: the modest-constant bound of the lemma
        rng = np.random.default_rng(17)
        p = PhysicalParams(a=1.0, gamma=2.0)
        for _ in range(1000):
            epsilon = float(rng.uniform(0.05, 1.0))
            amp = float(rng.uniform(0.0, 0.5)) / epsilon
            phi = amp * (2.0 * rng.random(GRID.shape) - 1.0)
            s = CompressibleState(
                phi=Field(GRID, phi),
                u=VectorField.zeros(GRID),
                eta=Field.constant(GRID, 1.0),
                tau=SymTensorField.zeros(GRID),
                epsilon=epsilon,
            )
            assert sqrt_density_lemma_check(s, p) <= 2.0


class TestConvergenceGap:
    def test_identical_states_zero(self):
        p = PhysicalParams()
        sc = CompressibleState.rest(GRID, 0.4)
        si = IncompressibleState.rest(GRID)
        gap = convergence_gap(sc, si, p)
        assert gap.total == 0.0

    def test_one_sided_taylor_green(self):
        p = PhysicalParams()
        amp = 0.7
        sc = CompressibleState.rest(GRID, 0.4)
        ux, uy = taylor_green(coordinates(GRID), amp)
        si = IncompressibleState(
            u=VectorField.from_arrays(GRID, [ux, uy]),
            eta=Field.constant(GRID, 1.0),
            tau=SymTensorField.zeros(GRID),
            pi=Field.zeros(GRID),
        )
        gap = convergence_gap(sc, si, p)
        expected = float(((ux**2 + uy**2)).sum()) * GRID.cell_volume
        assert abs(gap.g_u - expected) < 1e-12 * expected
        assert gap.g_eta == 0.0 and gap.g_tau == 0.0 and gap.g_pi == 0.0

    def test_random_pair_matches_quadrature_oracle(self):
        p = PhysicalParams()
        sc = random_state(seed=18)
        si = matched_limit_init(GRID, p, delta=0.03, seed=19)
        gap = convergence_gap(sc, si, p)
        vol = GRID.cell_volume
        sqrt_rho = np.sqrt(1.0 + sc.epsilon * sc.phi.values)
        g_u = sum(
            (((sqrt_rho * a.values - b.values) ** 2).sum()) * vol
            for a, b in zip(sc.u.components, si.u.components)
        )
        g_eta = (((sc.eta.values - si.eta.values) ** 2).sum()) * vol
        g_tau = sum(
            m * (((a.values - b.values) ** 2).sum()) * vol
            for m, (a, b) in zip([1, 2, 1], zip(sc.tau.components, si.tau.components))
        )
        assert abs(gap.g_u - g_u) < 1e-12 * max(g_u, 1e-30)
        assert abs(gap.g_eta - g_eta) < 1e-12 * max(g_eta, 1e-30)
        assert abs(gap.g_tau - g_tau) < 1e-12 * max(g_tau, 1e-30)

    def test_eta_tau_slots_symmetric(self):
        p = PhysicalParams()
        sc = random_state(seed=20)
        si = matched_limit_init(GRID, p, delta=0.03, seed=21)
        gap = convergence_gap(sc, si, p)
        swapped_c = CompressibleState(
            phi=sc.phi, u=sc.u, eta=si.eta, tau=si.tau, epsilon=sc.epsilon
        )
        swapped_i = IncompressibleState(
            u=si.u, eta=sc.eta, tau=sc.tau, pi=si.pi
        )
        gap_swapped = convergence_gap(swapped_c, swapped_i, p)
        assert gap.g_eta == gap_swapped.g_eta
        assert gap.g_tau == gap_swapped.g_tau

    def test_grid_and_time_mismatch_rejected(self):
        p = PhysicalParams()
        other = make_grid(2, 16, 2 * np.pi)
        with pytest.raises(ConfigError):
            convergence_gap(
                CompressibleState.rest(GRID, 0.4), IncompressibleState.rest(other), p
            )
        late = IncompressibleState(
            u=VectorField.zeros(GRID),
            eta=Field.constant(GRID, 1.0),
            tau=SymTensorField.zeros(GRID),
            pi=Field.zeros(GRID),
            time=1.0,
        )
        with pytest.raises(ConfigError):
            convergence_gap(CompressibleState.rest(GRID, 0.4), late, p)


class TestEnergyInequalityMonitor:
    def test_rest_trajectory_nonpositive(self):
        traj = synthetic_trajectory([0.0, 0.1, 0.2], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0])
        assert energy_inequality_monitor(traj) <= 0.0

    def test_single_sample_exactly_zero(self):
        traj = synthetic_trajectory([0.0], [0.7], [0.3])
        assert energy_inequality_monitor(traj) == 0.0

    def test_decaying_energy_with_dissipation(self):
        # later samples are negative; the t=0 sample pins the max at zero
        traj = synthetic_trajectory(
            [0.0, 0.1, 0.2], [1.0, 0.8, 0.65], [0.5, 0.4, 0.3]
        )
        assert energy_inequality_monitor(traj) == 0.0

    def test_no_dissipation_reduces_to_energy_bound(self):
        traj = synthetic_trajectory([0.0, 0.1], [1.0, 1.2], [0.0, 0.0])
        assert energy_inequality_monitor(traj) == pytest.approx(0.2, abs=1e-12)

    def test_empty_trajectory_rejected(self):
        with pytest.raises(ValueError):
            energy_inequality_monitor(Trajectory())


class TestAcousticRatio:
    def test_rest_trajectory_zero(self):
        traj = synthetic_trajectory([0.0, 0.1], [0.0, 0.0], [0.0, 0.0])
        assert acoustic_ratio(traj, 0.2) == 0.0

    def test_single_snapshot_arithmetic(self):
        epsilon = 0.25
        traj = Trajectory()
        traj.append(
            DiagnosticRecord(
                time=0.0,
                energy=EnergyReport(0.0, 0.0, 0.0, 0.0, 0.0),
                dissipation=DissipationReport(0.0, 0.0, 0.0, 0.0, 0.0, 0.0),
                div_u_h1=epsilon,
                pprime_grad_phi_h1=epsilon,
                max_abs_u=0.0,
                state_max_abs=0.0,
            )
        )
        assert acoustic_ratio(traj, epsilon) == pytest.approx(2.0, rel=1e-15)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            acoustic_ratio(Trajectory(), 0.1)


class TestFitRate:
    def test_exact_quadratic_power_law(self):
        fit = fit_rate([(0.4, 0.16), (0.2, 0.04), (0.1, 0.01)])
        assert abs(fit.beta0_hat - 2.0) < 1e-10
        assert fit.r_squared == pytest.approx(1.0, abs=1e-12)

    def test_power_law_with_prefactor(self):
        pts = [(e, 5.0 * e**1.5) for e in (0.4, 0.2, 0.1, 0.05)]
        fit = fit_rate(pts)
        assert abs(fit.beta0_hat - 1.5) < 1e-10
        assert abs(fit.intercept - np.log(5.0)) < 1e-10

    def test_permutation_invariant(self):
        pts = [(0.4, 0.3), (0.2, 0.071), (0.1, 0.018)]
        a = fit_rate(pts)
        b = fit_rate(list(reversed(pts)))
        assert a.beta0_hat == b.beta0_hat
        assert a.r_squared == b.r_squared

    def test_too_few_points_rejected(self):
        with pytest.raises(ValueError):
            fit_rate([(0.4, 0.1), (0.2, 0.05)])

    def test_nonpositive_values_rejected(self):
        with pytest.raises(ValueError):
            fit_rate([(0.4, 0.1), (0.2, 0.0), (0.1, 0.01)])
        with pytest.raises(ValueError):
            fit_rate([(0.4, 0.1), (-0.2, 0.05), (0.1, 0.01)])
