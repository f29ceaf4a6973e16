"""Spectral grid operations against analytic and finite-difference oracles."""

import numpy as np
import pytest

from oblab.errors import ConfigError, StateError
from oblab.grid import (
    Field,
    GridSpec,
    SymTensorField,
    VectorField,
    coordinates,
    dealias,
    divergence,
    gradient,
    integrate,
    laplacian,
    leray_project,
    make_grid,
    sobolev_norm,
    spectral,
    spectral_derivative,
    tensor_divergence,
)

from oracles import (
    direct_weighted_sobolev,
    fd4_derivative,
    spectral_restrict,
    spectral_upsample,
)


def random_band_limited(grid, seed, max_mode=6):
    rng = np.random.default_rng(seed)
    f = Field(grid, rng.standard_normal(grid.shape))
    return dealias_to_band(f, max_mode)


def dealias_to_band(f, max_mode):
    sp = spectral(f.grid)
    keep = np.ones(f.grid.shape, dtype=bool)
    for am in sp.abs_modes:
        keep &= am <= max_mode
    return Field(f.grid, np.fft.ifftn(np.fft.fftn(f.values) * keep).real)


class TestMakeGrid:
    def test_2d_wavenumber_lattice(self):
        grid = make_grid(2, 64, 2 * np.pi)
        assert grid.num_points == 4096
        sp = spectral(grid)
        assert max(float(am.max()) for am in sp.abs_modes) == 32

    def test_3d_spacing(self):
        grid = make_grid(3, 16, 1.0)
        assert grid.num_points == 4096
        modes = np.fft.fftfreq(16, d=1.0 / 16)
        k = 2 * np.pi * modes / grid.box_length
        assert np.isclose(k[1] - k[0], 2 * np.pi)

    @pytest.mark.parametrize(
        "args",
        [(2, 63, 1.0), (2, 6, 1.0), (2, 64, 0.0), (2, 64, -1.0), (4, 64, 1.0), (1, 64, 1.0)],
    )
    def test_rejects_bad_specs(self, args):
        with pytest.raises(ConfigError):
            make_grid(*args)


class TestSpectralDerivative:
    def test_single_mode_exact(self):
        grid = make_grid(2, 64, 2 * np.pi)
        x, _ = coordinates(grid)
        f = Field(grid, np.sin(x))
        df = spectral_derivative(f, 0)
        assert np.max(np.abs(df.values - np.cos(x))) < 1e-12

    def test_box_length_scaling(self):
        grid = make_grid(2, 64, 3.0)
        x, _ = coordinates(grid)
        f = Field(grid, np.sin(2 * np.pi * x / 3.0))
        df = spectral_derivative(f, 0)
        expected = (2 * np.pi / 3.0) * np.cos(2 * np.pi * x / 3.0)
        assert np.max(np.abs(df.values - expected)) < 1e-12

    def test_constant_is_flat(self):
        grid = make_grid(2, 32, 2 * np.pi)
        df = spectral_derivative(Field.constant(grid, 3.7), 1)
        assert np.max(np.abs(df.values)) == 0.0

    def test_nyquist_mode_derivative_zeroed(self):
        grid = make_grid(2, 32, 2 * np.pi)
        x, _ = coordinates(grid)
        f = Field(grid, np.cos(16 * x))
        assert np.max(np.abs(spectral_derivative(f, 0).values)) < 1e-12

    def test_matches_fd4_at_fourth_order(self):
        # FD4 differences from the spectral result must shrink ~16x per
        # grid doubling on the same continuous band-limited field.
        errs = {}
        for n in (32, 64):
            grid = make_grid(2, n, 2 * np.pi)
            x, y = coordinates(grid)
            f = np.sin(3 * x) * np.cos(2 * y) + 0.5 * np.cos(4 * y + x)
            d_spec = spectral_derivative(Field(grid, f), 0).values
            d_fd = fd4_derivative(f, 0, grid.spacing)
            errs[n] = np.max(np.abs(d_spec - d_fd))
        assert errs[32] / errs[64] > 12.0

    def test_axis_out_of_range(self):
        grid = make_grid(2, 32, 1.0)
        with pytest.raises(ConfigError):
            spectral_derivative(Field.zeros(grid), 2)

    def test_linearity(self):
        grid = make_grid(2, 32, 2.0)
        f = random_band_limited(grid, 1)
        g = random_band_limited(grid, 2)
        combo = Field(grid, 2.5 * f.values - 1.25 * g.values)
        lhs = spectral_derivative(combo, 0).values
        rhs = 2.5 * spectral_derivative(f, 0).values - 1.25 * spectral_derivative(g, 0).values
        assert np.max(np.abs(lhs - rhs)) < 1e-12


class TestCompositeOperators:
    def test_gradient_of_constant(self):
        grid = make_grid(3, 16, 2 * np.pi)
        g = gradient(Field.constant(grid, 2.0))
        assert all(np.max(np.abs(c.values)) == 0.0 for c in g.components)

    def test_laplacian_eigenfunction(self):
        grid = make_grid(2, 64, 2 * np.pi)
        x, _ = coordinates(grid)
        f = Field(grid, np.sin(x))
        lap = divergence(gradient(f))
        assert np.max(np.abs(lap.values + np.sin(x))) < 1e-11

    def test_div_grad_equals_laplacian(self):
        grid = make_grid(2, 32, 2 * np.pi)
        f = random_band_limited(grid, 3)
        assert np.max(np.abs(divergence(gradient(f)).values - laplacian(f).values)) < 1e-11

    def test_tensor_divergence_constant(self):
        grid = make_grid(2, 32, 1.0)
        t = SymTensorField.from_arrays(
            grid, [np.full(grid.shape, v) for v in (1.0, -2.0, 3.0)]
        )
        div = tensor_divergence(t)
        assert all(np.max(np.abs(c.values)) == 0.0 for c in div.components)

    def test_tensor_divergence_matches_componentwise(self):
        grid = make_grid(2, 32, 2 * np.pi)
        slots = [random_band_limited(grid, s).values for s in (4, 5, 6)]
        t = SymTensorField.from_arrays(grid, slots)
        div = tensor_divergence(t)
        # row 0: d_x t00 + d_y t01
        row0 = (
            spectral_derivative(Field(grid, slots[0]), 0).values
            + spectral_derivative(Field(grid, slots[1]), 1).values
        )
        assert np.max(np.abs(div.components[0].values - row0)) < 1e-12

    def test_grid_mismatch_rejected(self):
        a = make_grid(2, 32, 1.0)
        b = make_grid(2, 32, 2.0)
        with pytest.raises(ConfigError):
            VectorField(a, (Field.zeros(a), Field.zeros(b)))


class TestDealias:
    def test_retained_band_unchanged(self):
        grid = make_grid(2, 64, 2 * np.pi)
        f = dealias_to_band(random_band_limited(grid, 7, max_mode=10), 10)
        assert np.max(np.abs(dealias(f).values - f.values)) < 1e-12

    def test_nyquist_mode_removed(self):
        grid = make_grid(2, 64, 2 * np.pi)
        x, _ = coordinates(grid)
        f = Field(grid, np.cos(32 * x))
        assert np.max(np.abs(dealias(f).values)) < 1e-12

    def test_product_matches_fine_grid_oracle(self):
        grid = make_grid(2, 64, 2 * np.pi)
        f = dealias(random_band_limited(grid, 8, max_mode=21))
        g = dealias(random_band_limited(grid, 9, max_mode=21))
        product = dealias(Field(grid, f.values * g.values))
        fine_product = spectral_upsample(f.values, 128) * spectral_upsample(
            g.values, 128
        )
        restricted = spectral_restrict(fine_product, 64)
        expected = dealias(Field(grid, restricted))
        assert np.max(np.abs(product.values - expected.values)) < 1e-12


class TestLerayProjection:
    def test_pure_gradient_killed(self):
        grid = make_grid(2, 64, 2 * np.pi)
        f = random_band_limited(grid, 10)
        f = Field(grid, f.values - f.values.mean())
        g = gradient(f)
        proj = leray_project(g)
        assert all(np.max(np.abs(c.values)) < 1e-12 for c in proj.components)

    def test_solenoidal_fixed_and_idempotent(self):
        grid = make_grid(2, 64, 2 * np.pi)
        psi = random_band_limited(grid, 11)
        w = VectorField(
            grid, (spectral_derivative(psi, 1), Field(grid, -spectral_derivative(psi, 0).values))
        )
        proj = leray_project(w)
        for c_p, c_w in zip(proj.components, w.components):
            assert np.max(np.abs(c_p.values - c_w.values)) < 1e-12
        again = leray_project(proj)
        for c_a, c_p in zip(again.components, proj.components):
            assert np.max(np.abs(c_a.values - c_p.values)) < 1e-13

    def test_helmholtz_decomposition(self):
        grid = make_grid(2, 64, 2 * np.pi)
        psi = random_band_limited(grid, 12)
        w = VectorField(
            grid, (spectral_derivative(psi, 1), Field(grid, -spectral_derivative(psi, 0).values))
        )
        f = random_band_limited(grid, 13)
        f = Field(grid, f.values - f.values.mean())
        gf = gradient(f)
        v = VectorField.from_arrays(
            grid, [a.values + b.values for a, b in zip(gf.components, w.components)]
        )
        proj = leray_project(v)
        for c_p, c_w in zip(proj.components, w.components):
            assert np.max(np.abs(c_p.values - c_w.values)) < 1e-11

    def test_helmholtz_3d(self):
        grid = make_grid(3, 16, 2 * np.pi)
        pots = [random_band_limited(grid, 20 + s, max_mode=4) for s in range(3)]
        grads = [gradient(p) for p in pots]
        w = VectorField.from_arrays(
            grid,
            [
                grads[2].components[1].values - grads[1].components[2].values,
                grads[0].components[2].values - grads[2].components[0].values,
                grads[1].components[0].values - grads[0].components[1].values,
            ],
        )
        f = random_band_limited(grid, 30, max_mode=4)
        f = Field(grid, f.values - f.values.mean())
        gf = gradient(f)
        v = VectorField.from_arrays(
            grid, [a.values + b.values for a, b in zip(gf.components, w.components)]
        )
        proj = leray_project(v)
        for c_p, c_w in zip(proj.components, w.components):
            assert np.max(np.abs(c_p.values - c_w.values)) < 1e-11

    def test_divergence_free_and_contractive_and_mean_preserving(self):
        grid = make_grid(2, 64, 2 * np.pi)
        rng = np.random.default_rng(14)
        v = VectorField.from_arrays(
            grid, [rng.standard_normal(grid.shape) + 0.3 for _ in range(2)]
        )
        proj = leray_project(v)
        assert np.max(np.abs(divergence(proj).values)) < 1e-12
        assert sobolev_norm(proj, 0) <= sobolev_norm(v, 0) * (1 + 1e-14)
        for c_p, c_v in zip(proj.components, v.components):
            assert abs(c_p.values.mean() - c_v.values.mean()) < 1e-14


class TestSobolevNorm:
    def test_constant_order_zero(self):
        grid = make_grid(2, 32, 2 * np.pi)
        volume = grid.box_length**2
        got = sobolev_norm(Field.constant(grid, -3.0), 0)
        assert abs(got - 3.0 * np.sqrt(volume)) < 1e-12

    def test_zero_field(self):
        grid = make_grid(3, 8, 1.0)
        for order in range(5):
            assert sobolev_norm(Field.zeros(grid), order) == 0.0

    def test_single_mode_h1_against_quadrature_oracle(self):
        grid = make_grid(2, 64, 2 * np.pi)
        x, _ = coordinates(grid)
        f = np.sin(x)
        cell = grid.cell_volume
        oracle = np.sqrt((f**2).sum() * cell + (np.cos(x) ** 2).sum() * cell)
        got = sobolev_norm(Field(grid, f), 1)
        assert abs(got - oracle) < 1e-12
        assert abs(got - 2 * np.pi) < 1e-10  # sqrt(2 pi^2 + 2 pi^2)

    def test_weighted_matches_direct_oracle(self):
        grid = make_grid(2, 32, 2 * np.pi)
        f = random_band_limited(grid, 15)
        weight = Field(grid, 1.5 + 0.5 * np.tanh(random_band_limited(grid, 16).values))
        got = sobolev_norm(f, 2, weight=weight)
        oracle = direct_weighted_sobolev(
            [f.values], [1], 2, grid.box_length, weight.values
        )
        assert abs(got - oracle) < 1e-12 * max(1.0, oracle)

    def test_unit_weight_equals_unweighted_exactly(self):
        grid = make_grid(2, 32, 2 * np.pi)
        f = random_band_limited(grid, 17)
        assert sobolev_norm(f, 3, weight=Field.constant(grid, 1.0)) == sobolev_norm(f, 3)

    def test_vector_and_tensor_multiplicities(self):
        grid = make_grid(2, 32, 2 * np.pi)
        a = random_band_limited(grid, 18).values
        b = random_band_limited(grid, 19).values
        c = random_band_limited(grid, 20).values
        t = SymTensorField.from_arrays(grid, [a, b, c])
        got = sobolev_norm(t, 0)
        oracle = direct_weighted_sobolev([a, b, c], [1, 2, 1], 0, grid.box_length)
        assert abs(got - oracle) < 1e-12 * max(1.0, oracle)

    def test_nonpositive_weight_rejected(self):
        grid = make_grid(2, 32, 1.0)
        f = Field.constant(grid, 1.0)
        bad = Field.constant(grid, 0.0)
        with pytest.raises(StateError):
            sobolev_norm(f, 0, weight=bad)

    def test_bad_order_rejected(self):
        grid = make_grid(2, 32, 1.0)
        with pytest.raises(ConfigError):
            sobolev_norm(Field.zeros(grid), 5)


class TestParseval:
    @pytest.mark.parametrize("dim,n", [(2, 64), (3, 16)])
    def test_parseval_identity(self, dim, n):
        grid = make_grid(dim, n, 2 * np.pi)
        rng = np.random.default_rng(21)
        f = rng.standard_normal(grid.shape)
        physical = (f**2).sum() * grid.cell_volume
        hat = np.fft.fftn(f)
        fourier = (np.abs(hat) ** 2).sum() / grid.num_points * grid.cell_volume
        assert abs(physical - fourier) < 1e-12 * physical


class TestIntegrate:
    def test_constant(self):
        grid = make_grid(2, 32, 2.0)
        assert abs(integrate(Field.constant(grid, 2.5)) - 2.5 * 4.0) < 1e-13

    def test_zero_mean_mode(self):
        grid = make_grid(2, 32, 2 * np.pi)
        x, _ = coordinates(grid)
        assert abs(integrate(Field(grid, np.sin(x)))) < 1e-12
