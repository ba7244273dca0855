import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import roots_legendre

from critns import (DyadicDecomposition, Grid, NormSeries,
                    SpectralScalarField, SpectralVectorField, besov_0_3_2,
                    besov_m1_inf_2, besov_m1_inf_inf, l2_norm, leray_project,
                    lebesgue_norm, sobolev_norm, taylor_green,
                    triple_bar_norm, w13_seminorm)
from critns.datagen import (oscillatory_profile, random_solenoidal, shear_flow,
                            single_mode_vector, stream_function_data)
from critns.norms import (NegativeOrderOnMeanfulField, besov_block_norm,
                          besov_m1_inf_inf_blocks, default_heat_grid,
                          geometric_grid, heat_flow_b032)

from conftest import taylor_green_samples


def mean_free_random(grid, seed):
    u = random_solenoidal(grid, seed, slope=-2.0, k_max=grid.n // 4,
                          amplitude=1.0)
    return u


class TestLebesgue:
    def test_constant(self, grid16):
        samples = np.zeros((3,) + grid16.physical_shape)
        samples[0] = 1.2
        c = SpectralVectorField.from_samples(grid16, samples)
        for p in (1.0, 2.0, 3.0):
            expected = 1.2 * (2 * np.pi) ** (3.0 / p)
            assert lebesgue_norm(c, p) == pytest.approx(expected, rel=1e-12)

    def test_sine_l2(self, grid32):
        x = grid32.meshgrid()[0]
        f = SpectralScalarField.from_samples(grid32, np.sin(x))
        assert lebesgue_norm(f, 2.0) == pytest.approx(np.sqrt(4 * np.pi ** 3),
                                                      rel=1e-12)

    def test_taylor_green_linf_against_dense_sampling(self, grid32):
        u = taylor_green(grid32, 1.0)
        coarse = lebesgue_norm(u, np.inf)
        fine = taylor_green_samples(4 * grid32.n, grid32.l, 1.0)
        dense = np.sqrt((fine ** 2).sum(axis=0)).max()
        assert coarse == pytest.approx(dense, abs=1e-3)

    def test_rejects_p_below_one(self, tg32):
        with pytest.raises(ValueError):
            lebesgue_norm(tg32, 0.5)


class TestSobolev:
    def test_single_coefficient_value(self, grid16):
        # one retained rfft coefficient of modulus a at |k| = 2 and its
        # implicit conjugate: the spectral sum carries weight 2 a^2
        a = 0.7
        u = single_mode_vector(grid16, (0, 0, 2), a)
        expected = np.sqrt(2.0) * a * 2.0 ** (-1.0) * grid16.l ** 1.5
        assert sobolev_norm(u, -1.0) == pytest.approx(expected, rel=1e-12)

    def test_s0_matches_plancherel(self, grid16):
        u = mean_free_random(grid16, 4)
        assert sobolev_norm(u, 0.0) == pytest.approx(lebesgue_norm(u, 2.0),
                                                     rel=1e-12)

    def test_interpolation_inequality_on_random_fields(self, grid16):
        for seed in range(100):
            u = mean_free_random(grid16, seed)
            lhs = sobolev_norm(u, 0.5) ** 2
            rhs = sobolev_norm(u, 1.0) * sobolev_norm(u, 0.0)
            assert lhs <= rhs * (1 + 1e-12)

    def test_interpolation_equality_on_single_mode(self, grid16):
        u = single_mode_vector(grid16, (2, 1, 0), 0.4)
        lhs = sobolev_norm(u, 0.5) ** 2
        rhs = sobolev_norm(u, 1.0) * sobolev_norm(u, 0.0)
        assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_rejects_meanful_negative_order(self, grid16):
        u = SpectralVectorField.from_samples(
            grid16, np.ones((3,) + grid16.physical_shape))
        with pytest.raises(NegativeOrderOnMeanfulField):
            sobolev_norm(u, -1.0)


class TestNormSeries:
    def test_validation(self):
        with pytest.raises(ValueError):
            NormSeries(np.array([0.0, 0.0]), np.array([1.0, 1.0]))
        with pytest.raises(ValueError):
            NormSeries(np.array([0.0, 1.0]), np.array([1.0, -1.0]))
        with pytest.raises(ValueError):
            NormSeries(np.array([]), np.array([]))

    def test_restrict_empty_window(self):
        s = NormSeries(np.array([1.0, 2.0]), np.array([1.0, 1.0]))
        with pytest.raises(ValueError):
            s.restrict(0.5)


class TestTripleBar:
    def test_constant_series(self):
        s = NormSeries(np.linspace(0.01, 2.0, 50), np.full(50, 3.0))
        assert triple_bar_norm(s, 0.125) == pytest.approx(3.0, rel=1e-12)

    def test_weight_cancels_inverse_power(self):
        t = np.geomspace(1e-4, 1.0, 100)
        s = NormSeries(t, t ** (-0.125))
        assert triple_bar_norm(s, 0.125) == pytest.approx(1.0, rel=1e-12)

    def test_gamma_range_enforced(self):
        s = NormSeries(np.array([0.5, 1.0]), np.array([1.0, 1.0]))
        for gamma in (0.0, 0.25, 0.3, -0.1):
            with pytest.raises(ValueError):
                triple_bar_norm(s, gamma)

    def test_monotone_in_horizon_and_homogeneous(self):
        t = np.geomspace(1e-3, 4.0, 60)
        vals = np.exp(-t) * (1 + np.sin(3 * t) ** 2)
        s = NormSeries(t, vals)
        n1 = triple_bar_norm(s, 0.125, 1.0)
        n2 = triple_bar_norm(s, 0.125, 4.0)
        assert n2 >= n1
        s2 = NormSeries(t, 5.0 * vals)
        assert triple_bar_norm(s2, 0.125, 4.0) == pytest.approx(5.0 * n2, rel=1e-12)


class TestDyadicDecomposition:
    def test_partition_of_unity(self, grid32):
        d = DyadicDecomposition.for_grid(grid32)
        total = sum(d.shell_multiplier(j) for j in d.shells)
        r = np.sqrt(grid32.k2)
        covered = (r >= 2.0 ** d.j_min) & (r <= 2.0 ** (d.j_max - 1))
        assert np.max(np.abs(total[covered] - 1.0)) <= 1e-10

    def test_shell_support_within_annulus(self, grid32):
        d = DyadicDecomposition.for_grid(grid32)
        r = np.sqrt(grid32.k2)
        for j in d.shells:
            mult = d.shell_multiplier(j)
            active = mult > 0
            if np.any(active):
                assert r[active].min() >= 0.75 * 2.0 ** j
                assert r[active].max() <= (8.0 / 3.0) * 2.0 ** j

    def test_coverage_error(self, grid32):
        d = DyadicDecomposition(grid32, j_min=0, j_max=1)
        u = single_mode_vector(grid32, (8, 0, 0), 1.0)
        with pytest.raises(ValueError, match="outside the decomposition"):
            besov_0_3_2(u, d)


class TestBesovHeat:
    def test_zero_field(self, grid16):
        assert besov_m1_inf_inf(SpectralVectorField.zero(grid16)).value == 0.0

    def test_single_mode_analytic_maximum(self, grid32):
        kappa, amp = 2.0, 0.6
        u = single_mode_vector(grid32, (0, 2, 0), amp)
        # physical amplitude is 2 amp; sup_t sqrt(t) A e^(-k^2 t) = A/(k sqrt(2e))
        expected = 2 * amp / (kappa * np.sqrt(2 * np.e))
        got = besov_m1_inf_inf(u, geometric_grid(1e-4, 50.0, 64)).value
        assert got == pytest.approx(expected, rel=1e-3)

    def test_inadequate_span_warns_in_metadata(self, grid16, tg32):
        u = taylor_green(grid16, 1.0)
        res = besov_m1_inf_inf(u, np.array([0.5, 1.0]))
        assert any("heat scale" in w for w in res.warnings)

    def test_block_variant_comparable(self, grid32):
        u = mean_free_random(grid32, 9)
        d = DyadicDecomposition.for_grid(grid32)
        heat = besov_m1_inf_inf(u).value
        blocks = besov_m1_inf_inf_blocks(u, d)
        assert 0.1 <= heat / blocks <= 10.0


class TestBesovBlocks:
    def test_zero(self, grid16):
        d = DyadicDecomposition.for_grid(grid16)
        z = SpectralVectorField.zero(grid16)
        assert besov_0_3_2(z, d) == 0.0
        assert besov_m1_inf_2(z, d) == 0.0

    def test_single_shell_equals_l3_norm(self, grid32):
        d = DyadicDecomposition.for_grid(grid32)
        u = single_mode_vector(grid32, (0, 4, 0), 0.8)   # |k| = 2^2 exactly
        assert besov_0_3_2(u, d) == pytest.approx(lebesgue_norm(u, 3.0),
                                                  rel=1e-8)

    def test_single_mode_m1_inf_2(self, grid32):
        d = DyadicDecomposition.for_grid(grid32)
        j, amp = 2, 0.5
        u = single_mode_vector(grid32, (2 ** j, 0, 0), amp)
        expected = 2.0 ** (-j) * 2 * amp           # physical amplitude 2 amp
        assert besov_m1_inf_2(u, d) == pytest.approx(expected, rel=1e-6)

    def test_truncation_monotonicity(self, grid32):
        d = DyadicDecomposition.for_grid(grid32)
        u = mean_free_random(grid32, 21)
        full = besov_m1_inf_2(u, d)
        mult = np.where(np.sqrt(grid32.k2) <= 4.0, 1.0, 0.0)
        truncated = u.with_coeffs(u.coeffs * mult, mean_free=True)
        assert besov_m1_inf_2(truncated, d) <= full * (1 + 1e-12)

    def test_heat_flow_form_comparable(self, grid32):
        # bracket frozen from a 20-field fine-time quadrature study
        d = DyadicDecomposition.for_grid(grid32)
        for seed in range(20):
            u = random_solenoidal(grid32, seed, slope=-2.0, k_max=8,
                                  amplitude=1.0)
            ratio = heat_flow_b032(u, points_per_decade=32) / besov_0_3_2(u, d)
            assert 0.65 <= ratio <= 0.76


class TestW13:
    def test_constant_is_zero(self, grid16):
        c = SpectralVectorField.from_samples(
            grid16, np.ones((3,) + grid16.physical_shape))
        assert w13_seminorm(c) <= 1e-13

    def test_shear_against_1d_quadrature(self, grid32):
        u = shear_flow(grid32, 1.0)
        # |grad u| = |cos x2|; 1D Gauss-Legendre oracle for int |cos|^3.
        # |cos|^3 is not band-limited, so the lattice integral differs from
        # the continuum value at the grid's quadrature order.
        x, w = roots_legendre(200)
        t = np.pi * (x + 1.0)                       # [0, 2 pi]
        integral_1d = np.pi * np.sum(w * np.abs(np.cos(t)) ** 3)
        expected = ((2 * np.pi) ** 2 * integral_1d) ** (1.0 / 3.0)
        assert w13_seminorm(u) == pytest.approx(expected, rel=1e-4)
        finer = shear_flow(Grid(64), 1.0)
        assert abs(w13_seminorm(finer) - expected) < abs(w13_seminorm(u) - expected)

    def test_homogeneous(self, grid16):
        u = taylor_green(grid16, 1.0)
        assert w13_seminorm(3.0 * u) == pytest.approx(3.0 * w13_seminorm(u),
                                                      rel=1e-12)


class TestNormAxioms:
    @given(st.floats(min_value=0.1, max_value=8.0),
           st.sampled_from([-1.0, 0.0, 0.5, 1.0]))
    @settings(max_examples=20, deadline=None)
    def test_homogeneity_degree_one(self, a, s):
        grid = Grid(16)
        u = random_solenoidal(grid, 123, slope=-2.0, k_max=4, amplitude=1.0)
        assert sobolev_norm(a * u, s) == pytest.approx(a * sobolev_norm(u, s),
                                                       rel=1e-11)

    def test_zero_only_on_zero_field(self, grid16):
        z = SpectralVectorField.zero(grid16)
        assert sobolev_norm(z, 1.0) == 0.0
        u = single_mode_vector(grid16, (1, 0, 0), 1e-8)
        assert sobolev_norm(u, 1.0) > 0.0


class TestEmbeddingChain:
    def test_ordering_constants_positive_and_stable(self, grid32):
        d = DyadicDecomposition.for_grid(grid32)
        ratios = []
        for seed, slope in ((1, -5.0 / 3.0), (2, -2.0), (3, -3.0)):
            u = random_solenoidal(grid32, seed, slope=slope, k_max=8,
                                  amplitude=1.0)
            h_half = sobolev_norm(u, 0.5)
            l3 = lebesgue_norm(u, 3.0)
            b_p = besov_block_norm(u, d, s=-0.5, p=6.0, q=np.inf)
            b_inf = besov_m1_inf_inf(u).value
            assert h_half >= l3 * 0.2 and l3 >= b_p * 0.2 and b_p >= b_inf * 0.2
            ratios.append((l3 / h_half, b_p / l3, b_inf / b_p))
        arr = np.array(ratios)
        assert np.all(arr > 0)
        # stability across the random families: within +-20 percent
        spread = arr.max(axis=0) / arr.min(axis=0)
        assert np.all(spread <= 1.5)
