import numpy as np
import pytest

from warpdepth.curves import Curve, Grid, WarpingCurve, compose
from warpdepth.depth import (
    DepthMethod,
    band_depth,
    depth_median,
    mhi,
    mhi_scores,
    modified_band_depth,
    monotonized_depth_median,
    quantile_integrated_depth,
)
from warpdepth.simulation import exp_growth_inverse_values

from conftest import exp_warp
from oracles import (
    brute_band_depth,
    brute_mhi,
    brute_modified_band_depth,
    brute_quantile_integrated_depth,
)

CONSTANTS = np.array([[1.0] * 5, [2.0] * 5, [3.0] * 5])


class TestModifiedBandDepth:
    def test_constant_curves(self):
        assert np.allclose(modified_band_depth(CONSTANTS), [2 / 3, 1.0, 2 / 3])

    def test_identical_curves(self):
        sample = np.ones((4, 6))
        assert np.allclose(modified_band_depth(sample), 1.0)

    def test_matches_brute_force(self, rng):
        for _ in range(5):
            values = rng.normal(size=(4, 8))
            assert np.abs(
                modified_band_depth(values) - brute_modified_band_depth(values)
            ).max() < 1e-12

    def test_range(self, rng):
        values = rng.normal(size=(7, 12))
        d = modified_band_depth(values)
        assert np.all(d > 0) and np.all(d <= 1)

    def test_small_sample_rejected(self):
        with pytest.raises(ValueError):
            modified_band_depth(np.ones((1, 5)))


class TestBandDepth:
    def test_constant_curves(self):
        # the middle curve is inside every band; the extremes are inside the
        # two bands they span themselves
        assert np.allclose(band_depth(CONSTANTS), [2 / 3, 1.0, 2 / 3])

    def test_identical_curves(self):
        assert np.allclose(band_depth(np.ones((5, 4))), 1.0)

    def test_dominated_by_modified(self, rng):
        values = rng.normal(size=(6, 10))
        assert np.all(band_depth(values) <= modified_band_depth(values) + 1e-12)

    def test_matches_brute_force(self, rng):
        for _ in range(5):
            values = rng.normal(size=(5, 7))
            assert np.abs(band_depth(values) - brute_band_depth(values)).max() < 1e-12


class TestMhi:
    def test_constant_curves(self):
        assert np.allclose(mhi_scores(CONSTANTS), [1 / 3, 2 / 3, 1.0])

    def test_curve_above_sample(self, rng):
        values = rng.normal(size=(4, 6))
        top = values.max(axis=0) + 1.0
        assert mhi(values, top) == 1.0

    def test_singleton_sample(self):
        values = np.array([[1.0, 2.0, 3.0]])
        assert mhi(values, values[0]) == 1.0

    def test_pointwise_maximum_scores_one(self, rng):
        values = rng.normal(size=(5, 9))
        values[2] = values.max(axis=0)
        assert mhi_scores(values)[2] == 1.0

    def test_bounds_for_members(self, rng):
        values = rng.normal(size=(6, 11))
        s = mhi_scores(values)
        assert np.all(s >= 1 / 6) and np.all(s <= 1.0)

    def test_matches_brute_force(self, rng):
        values = rng.normal(size=(5, 8))
        for i in range(5):
            assert mhi(values, values[i]) == pytest.approx(
                brute_mhi(values, values[i]), abs=1e-15
            )


class TestQuantileIntegratedDepth:
    def test_full_fraction_equals_integrated(self, rng):
        values = rng.normal(size=(6, 10))
        qid = quantile_integrated_depth(values, fraction=1.0)
        assert np.allclose(qid, modified_band_depth(values), atol=1e-14)

    def test_identical_curves_equal_depths(self):
        d = quantile_integrated_depth(np.ones((4, 5)), fraction=0.5)
        assert np.allclose(d, d[0])

    def test_matches_brute_force(self, rng):
        values = rng.normal(size=(5, 11))
        for frac in (0.3, 0.7, 1.0):
            assert np.abs(
                quantile_integrated_depth(values, frac)
                - brute_quantile_integrated_depth(values, frac)
            ).max() < 1e-12

    def test_fraction_validation(self, rng):
        values = rng.normal(size=(4, 5))
        for bad in (0.0, 1.5, -0.2):
            with pytest.raises(ValueError):
                quantile_integrated_depth(values, fraction=bad)

    def test_halfspace_variant(self, rng):
        values = rng.normal(size=(6, 9))
        d = quantile_integrated_depth(values, 1.0, univariate="halfspace")
        assert np.all(d > 0) and np.all(d <= 1)


class TestMonotoneInvariance:
    TRANSFORMS = (np.exp, lambda x: x**3 + x, lambda x: 1 / (1 + np.exp(-x)))

    def test_depth_vectors_bitwise_invariant(self, rng):
        values = rng.normal(size=(8, 15))
        for g in self.TRANSFORMS:
            gv = g(values)
            assert np.array_equal(modified_band_depth(values), modified_band_depth(gv))
            assert np.array_equal(band_depth(values), band_depth(gv))
            assert np.array_equal(mhi_scores(values), mhi_scores(gv))
            assert np.array_equal(
                quantile_integrated_depth(values, 0.5),
                quantile_integrated_depth(gv, 0.5),
            )


class TestDepthMedian:
    def test_constant_curves(self):
        assert depth_median(CONSTANTS, "mbd") == 1

    def test_identical_curves_tie_rule(self):
        assert depth_median(np.ones((4, 5)), "mbd") == 0

    def test_warp_equivariance(self, grid, rng):
        # a strictly increasing template composed with warps ranks like the
        # warps themselves
        lam = Curve(grid, grid.t**3 + grid.t)
        warps = [exp_warp(grid, w) for w in rng.normal(0, 1, 12)]
        xs = np.stack([compose(lam, h).y for h in warps])
        hs = np.stack([h.y for h in warps])
        assert depth_median(xs, "mbd") == depth_median(hs, "mbd")

    def test_accepts_curve_lists(self, grid):
        curves = [Curve(grid, np.full(len(grid), v)) for v in (1.0, 2.0, 3.0)]
        assert depth_median(curves, DepthMethod("mbd")) == 1

    def test_unknown_method_rejected(self):
        with pytest.raises(ValueError):
            DepthMethod("unknown")


class TestMonotonizedDepthMedian:
    def test_strictly_increasing_sample_matches_plain(self, grid, rng):
        lam = Curve(grid, np.exp(grid.t))
        warps = [exp_warp(grid, w) for w in rng.normal(0, 1, 10)]
        xs = np.stack([compose(lam, h).y for h in warps])
        assert monotonized_depth_median(xs, "mbd") == depth_median(xs, "mbd")

    def test_identical_curves(self):
        sample = np.tile(np.linspace(0, 1, 8), (3, 1))
        assert monotonized_depth_median(sample, "mbd") == 0

    def test_recovers_center_for_nonmonotone_template(self, grid, rng):
        # bump template: plain depth median may be fooled, the monotonized
        # one ranks by the underlying warps
        lam = Curve(grid, np.sin(np.pi * grid.t))
        ws = np.sort(rng.normal(0, 1, 11))
        warps = [exp_warp(grid, w) for w in ws]
        xs = np.stack([compose(lam, h).y for h in warps])
        hs = np.stack([h.y for h in warps])
        assert monotonized_depth_median(xs, "mbd") == depth_median(hs, "mbd")
