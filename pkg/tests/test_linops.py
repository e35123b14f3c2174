"""Measurement-model tests: generators, mask, forward/adjoint, oracles."""

import numpy as np
import pytest

from mixamp import linops
from mixamp.exceptions import DimensionError, OracleScaleError, UnsupportedSizeError


class TestGaussianSensing:
    def test_deterministic_per_seed(self):
        a1 = linops.gen_gaussian_sensing(2, 4, seed=7)
        a2 = linops.gen_gaussian_sensing(2, 4, seed=7)
        assert np.array_equal(a1.entries, a2.entries)

    def test_different_seeds_differ(self):
        a1 = linops.gen_gaussian_sensing(8, 40, seed=0)
        a2 = linops.gen_gaussian_sensing(8, 40, seed=1)
        assert not np.array_equal(a1.entries, a2.entries)

    def test_sample_variance_near_one_over_m(self):
        m = 2867
        a = linops.gen_gaussian_sensing(64, m, seed=0)
        var = a.entries.var()
        assert 0.8 / m <= var <= 1.2 / m

    def test_mean_near_zero(self):
        a = linops.gen_gaussian_sensing(64, 2867, seed=0)
        assert abs(a.entries.mean()) < 3.0 / np.sqrt(2867 * 4096)

    @pytest.mark.parametrize("side,m", [(0, 1), (1, 1), (4, 0), (4, 17)])
    def test_dimension_errors(self, side, m):
        with pytest.raises(DimensionError):
            linops.gen_gaussian_sensing(side, m, seed=0)


class TestDctIdentity:
    def test_dct_orthonormal(self):
        for side in (4, 8, 32):
            a = linops.dct_sensing(side)
            gram = a.entries @ a.entries.T
            assert np.abs(gram - np.eye(side)).max() <= 1e-10

    def test_identity_kind(self):
        a = linops.identity_sensing(5)
        assert a.kind == "identity"
        assert np.array_equal(a.entries, np.eye(5))


class TestMask:
    def test_full_mask_when_m_equals_n(self):
        mask = linops.gen_mask(4, 16, seed=3)
        assert mask.m == 16
        assert mask.grid.all()

    def test_single_sample(self):
        mask = linops.gen_mask(4, 1, seed=5)
        assert mask.m == 1
        k, l = mask.indices[0]
        assert 0 <= k < 4 and 0 <= l < 4
        assert mask.contains(k, l)

    def test_cardinality_fig2_setup(self):
        mask = linops.gen_mask(128, 11469, seed=1)
        assert mask.m == 11469
        assert mask.grid.sum() == 11469

    def test_no_duplicates_and_sorted(self):
        mask = linops.gen_mask(16, 100, seed=9)
        flat = mask.indices[:, 0] * 16 + mask.indices[:, 1]
        assert len(np.unique(flat)) == 100

    def test_deterministic(self):
        m1 = linops.gen_mask(16, 50, seed=4)
        m2 = linops.gen_mask(16, 50, seed=4)
        assert np.array_equal(m1.indices, m2.indices)

    def test_too_many_samples(self):
        with pytest.raises(DimensionError):
            linops.gen_mask(4, 17, seed=0)


class TestMaskApply:
    def test_full_mask_is_identity(self):
        rng = np.random.default_rng(0)
        z = rng.standard_normal((8, 8))
        assert np.array_equal(linops.mask_apply(linops.full_mask(8), z), z)

    def test_idempotent(self):
        rng = np.random.default_rng(1)
        mask = linops.gen_mask(8, 30, seed=2)
        z = rng.standard_normal((8, 8))
        once = linops.mask_apply(mask, z)
        assert np.array_equal(linops.mask_apply(mask, once), once)

    def test_zero_in_zero_out(self):
        mask = linops.gen_mask(8, 30, seed=2)
        assert not linops.mask_apply(mask, np.zeros((8, 8))).any()

    def test_side_mismatch(self):
        mask = linops.gen_mask(8, 30, seed=2)
        with pytest.raises(DimensionError):
            linops.mask_apply(mask, np.zeros((4, 4)))


class TestForwardAdjoint:
    def test_identity_matrix_full_mask(self):
        rng = np.random.default_rng(3)
        x = rng.standard_normal((8, 8))
        out = linops.forward(linops.identity_sensing(8), x, linops.full_mask(8))
        assert np.allclose(out, x, atol=0)

    def test_zero_input(self):
        a = linops.gen_gaussian_sensing(8, 40, seed=0)
        mask = linops.gen_mask(8, 40, seed=1)
        assert not linops.forward(a, np.zeros((8, 8)), mask).any()

    def test_linearity(self):
        rng = np.random.default_rng(4)
        a = linops.gen_gaussian_sensing(8, 40, seed=2)
        mask = linops.gen_mask(8, 40, seed=3)
        for _ in range(20):
            x1 = rng.standard_normal((8, 8))
            x2 = rng.standard_normal((8, 8))
            alpha, beta = rng.standard_normal(2)
            lhs = linops.forward(a, alpha * x1 + beta * x2, mask)
            rhs = alpha * linops.forward(a, x1, mask) + beta * linops.forward(a, x2, mask)
            assert np.abs(lhs - rhs).max() <= 1e-10 * max(np.abs(rhs).max(), 1.0)

    def test_forward_output_lives_on_mask(self):
        rng = np.random.default_rng(5)
        a = linops.gen_gaussian_sensing(8, 20, seed=5)
        mask = linops.gen_mask(8, 20, seed=6)
        out = linops.forward(a, rng.standard_normal((8, 8)), mask)
        assert np.array_equal(linops.mask_apply(mask, out), out)
        assert not out[~mask.grid].any()

    def test_adjoint_identity_matrix(self):
        rng = np.random.default_rng(6)
        r = rng.standard_normal((8, 8))
        assert np.allclose(linops.adjoint(linops.identity_sensing(8), r), r, atol=0)

    def test_adjoint_zero(self):
        a = linops.gen_gaussian_sensing(8, 40, seed=7)
        assert not linops.adjoint(a, np.zeros((8, 8))).any()

    def test_adjoint_inner_product_identity(self):
        rng = np.random.default_rng(7)
        for seed in range(10):
            a = linops.gen_gaussian_sensing(12, 100, seed=seed)
            mask = linops.gen_mask(12, 100, seed=seed + 50)
            x = rng.standard_normal((12, 12))
            r = linops.mask_apply(mask, rng.standard_normal((12, 12)))
            lhs = float((linops.forward(a, x, mask) * r).sum())
            rhs = float((x * linops.adjoint(a, r)).sum())
            assert abs(lhs - rhs) <= 1e-10 * max(abs(rhs), 1.0)

    def test_side_mismatch(self):
        a = linops.gen_gaussian_sensing(8, 40, seed=0)
        with pytest.raises(DimensionError):
            linops.forward(a, np.zeros((4, 4)), linops.gen_mask(8, 10, seed=0))
        with pytest.raises(DimensionError):
            linops.forward(a, np.zeros((8, 8)), linops.gen_mask(4, 10, seed=0))


class TestKronOracle:
    def test_identity_full_mask_side2(self):
        a = linops.identity_sensing(2)
        xvec = np.array([1.0, 2.0, 3.0, 4.0])
        out = linops.kron_forward_oracle(a, xvec, np.arange(4))
        assert np.allclose(out, xvec, atol=0)

    def test_matches_forward_all_small_sides(self):
        # model equivalence on every supported oracle side
        for side in (2, 4, 8, 16):
            for seed in range(10):
                rng = np.random.default_rng(1000 * side + seed)
                m = max(1, int(0.7 * side * side))
                a = linops.gen_gaussian_sensing(side, m, seed=seed)
                mask = linops.gen_mask(side, m, seed=seed + 1)
                x = rng.standard_normal((side, side))
                y2d = linops.forward(a, x, mask)
                yvec = linops.kron_forward_oracle(
                    a, x.flatten(order="F"), mask.vec_indices()
                )
                scale = np.abs(yvec).max()
                assert np.abs(y2d.flatten(order="F") - yvec).max() <= 1e-12 * scale

    def test_oracle_scale_guard(self):
        a = linops.gen_gaussian_sensing(32, 100, seed=0)
        with pytest.raises(OracleScaleError):
            linops.kron_forward_oracle(a, np.zeros(32 * 32), np.arange(10))


class TestDctFastForward:
    def test_zero(self):
        mask = linops.gen_mask(8, 30, seed=0)
        assert not linops.dct_fast_forward(np.zeros((8, 8)), mask).any()

    def test_matches_explicit_dct(self):
        rng = np.random.default_rng(8)
        for side in (8, 32, 64):
            a = linops.dct_sensing(side)
            mask = linops.gen_mask(side, int(0.6 * side * side), seed=side)
            x = rng.standard_normal((side, side))
            fast = linops.dct_fast_forward(x, mask)
            explicit = linops.forward(a, x, mask)
            assert np.abs(fast - explicit).max() <= 1e-10

    def test_full_mask_side8(self):
        rng = np.random.default_rng(9)
        x = rng.standard_normal((8, 8))
        a = linops.dct_sensing(8)
        fast = linops.dct_fast_forward(x, linops.full_mask(8))
        assert np.abs(fast - a.entries @ x @ a.entries.T).max() <= 1e-10

    def test_non_power_of_two_rejected(self):
        with pytest.raises(UnsupportedSizeError):
            linops.dct_fast_forward(np.zeros((12, 12)), linops.full_mask(12))
