import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from warpdepth.curves import (
    Curve,
    Grid,
    MultiSample,
    WarpingCurve,
    compose,
    impute_linear,
    invert,
    monotonize,
    moving_average,
    repair_warping,
    sup_normalize,
    unit_monotonize,
)
from warpdepth.errors import DataError, DegenerateCurveError, DomainError
from warpdepth.simulation import exp_growth_inverse_values, exp_growth_values, lambda_template

from conftest import exp_warp, smooth_curve


class TestGrid:
    def test_validation(self):
        with pytest.raises(ValueError):
            Grid([0.0, 1.0])  # K >= 2
        with pytest.raises(ValueError):
            Grid([0.0, 0.5, 0.4])
        g = Grid.uniform(0, 1, 10)
        assert len(g) == 11 and g.start == 0.0 and g.stop == 1.0

    def test_identity_warp(self, grid):
        ident = grid.identity()
        assert np.array_equal(ident.y, grid.t)


class TestEval:
    def test_identity_curve(self, grid):
        c = Curve(grid, grid.t)
        assert c(0.5) == 0.5

    def test_linearity_between_nodes(self):
        g = Grid([0.0, 0.5, 1.0])
        c = Curve(g, g.t)
        assert c(0.25) == pytest.approx(0.25)

    def test_quadratic_interpolation_error(self):
        g = Grid.uniform(0, 1, 100)
        c = Curve(g, g.t**2)
        assert c(0.5) == pytest.approx(0.25, abs=1e-4)

    def test_exact_at_nodes(self, grid, rng):
        c = smooth_curve(grid, rng)
        assert np.array_equal(c(grid.t), c.y)

    def test_domain_error(self, grid):
        c = Curve(grid, grid.t)
        with pytest.raises(DomainError):
            c(1.5)
        with pytest.raises(DomainError):
            c(-0.01)


class TestCompose:
    def test_identity_warp_is_noop(self, grid, rng):
        f = smooth_curve(grid, rng)
        assert np.allclose(compose(f, grid.identity()).y, f.y)

    def test_identity_curve_returns_warp(self, grid):
        h = exp_warp(grid, 1.0)
        ident = Curve(grid, grid.t)
        assert np.allclose(compose(ident, h).y, h.y)

    def test_square_after_sqrt_is_identity(self, grid):
        f = Curve(grid, grid.t**2)
        g = WarpingCurve(grid, np.sqrt(grid.t))
        out = compose(f, g)
        assert np.abs(out.y - grid.t).max() <= 1e-3

    def test_associativity_within_tolerance(self, grid, rng):
        f = smooth_curve(grid, rng)
        g = exp_warp(grid, 0.8)
        h = exp_warp(grid, -1.2)
        left = compose(compose(f, g), h)
        right = compose(f, compose(g, h))
        assert np.abs(left.y - right.y).max() <= 1e-2

    def test_requires_shared_grid(self, grid):
        other = Grid.uniform(0, 1, 50)
        with pytest.raises(ValueError):
            compose(Curve(grid, grid.t), other.identity())


class TestInvert:
    def test_identity(self, grid):
        assert np.allclose(invert(grid.identity()).y, grid.t)

    def test_square_inverse_value(self, grid):
        h = WarpingCurve(grid, grid.t**2)
        assert invert(h)(0.25) == pytest.approx(0.5, abs=1e-3)

    def test_round_trip_against_closed_form(self, grid):
        # h from the exponential warp family with w=1; its true inverse is
        # available in closed form as the oracle
        h = exp_warp(grid, 1.0)
        inv = invert(h)
        assert np.abs(inv.y - exp_growth_values(grid.t, 1.0)).max() <= 1e-3
        round_trip = compose(inv, h)
        assert np.abs(round_trip.y - grid.t).max() <= 5e-3

    def test_double_inversion(self, grid):
        h = exp_warp(grid, -1.5)
        assert np.abs(invert(invert(h)).y - h.y).max() <= 5e-3


class TestSupNormalize:
    def test_direct_division(self):
        g = Grid([0.0, 0.5, 1.0])
        out = sup_normalize(Curve(g, [2.0, 4.0, -1.0]))
        assert np.allclose(out.y, [0.5, 1.0, -0.25])

    def test_idempotent(self, grid, rng):
        c = sup_normalize(smooth_curve(grid, rng))
        assert np.array_equal(sup_normalize(c).y, c.y)

    def test_lambda_template_normalized(self, grid):
        vals = lambda_template(grid.t)
        out = sup_normalize(Curve(grid, vals))
        assert abs(np.abs(out.y).max() - 1.0) < 1e-12

    def test_zero_curve_rejected(self, grid):
        with pytest.raises(DegenerateCurveError):
            sup_normalize(Curve(grid, np.zeros(len(grid))))


class TestMonotonize:
    def test_increasing_curve_shifts_to_zero(self, grid):
        c = Curve(grid, grid.t**2 + 3.0)
        assert np.allclose(monotonize(c).y, c.y - c.y[0])

    def test_sine_total_variation(self, grid):
        c = Curve(grid, np.sin(2 * np.pi * grid.t))
        assert monotonize(c).y[-1] == pytest.approx(4.0, abs=2e-2)

    def test_output_non_decreasing_exactly(self, grid, rng):
        for _ in range(10):
            c = smooth_curve(grid, rng)
            assert np.all(np.diff(monotonize(c).y) >= 0)

    def test_warping_preservation(self):
        g = Grid.uniform(0, 1, 1000)
        c = Curve(g, lambda_template(g.t))
        h = exp_warp(g, 1.0)
        left = monotonize(compose(c, h))
        right = compose(monotonize(c), h)
        assert np.abs(left.y - right.y).max() <= 1e-2

    def test_flat_input_gives_zero(self, grid):
        c = Curve(grid, np.full(len(grid), 2.5))
        assert np.array_equal(monotonize(c).y, np.zeros(len(grid)))


class TestUnitMonotonize:
    def test_monotone_curve_becomes_its_affine_relabeling(self, grid):
        c = Curve(grid, grid.t**2)
        out = unit_monotonize(c)
        assert np.abs(out.y - grid.t**2).max() <= 1e-6

    def test_strictly_increasing_even_with_flats(self, grid):
        y = np.where(grid.t < 0.5, grid.t, 0.5) + np.where(grid.t > 0.7, grid.t - 0.7, 0.0)
        out = unit_monotonize(Curve(grid, y))
        assert np.all(np.diff(out.y) > 0)
        assert out.y[0] == grid.start and out.y[-1] == grid.stop

    def test_flat_curve_rejected(self, grid):
        with pytest.raises(DegenerateCurveError):
            unit_monotonize(Curve(grid, np.ones(len(grid))))


class TestMovingAverage:
    def test_constant_unchanged(self, grid):
        c = Curve(grid, np.full(len(grid), 3.0))
        assert np.allclose(moving_average(c, 15).y, c.y)

    def test_window_one_identity(self, grid, rng):
        c = smooth_curve(grid, rng)
        assert np.array_equal(moving_average(c, 1).y, c.y)

    def test_truncated_ends(self):
        g = Grid([0.0, 0.5, 1.0])
        out = moving_average(Curve(g, [0.0, 3.0, 0.0]), 3)
        assert np.allclose(out.y, [1.5, 1.0, 1.5])

    def test_even_window_rejected(self, grid, rng):
        with pytest.raises(ValueError):
            moving_average(smooth_curve(grid, rng), 4)
        with pytest.raises(ValueError):
            moving_average(smooth_curve(grid, rng), -3)


class TestImputeLinear:
    def test_single_gap(self):
        assert np.allclose(impute_linear([1.0, np.nan, 3.0]), [1.0, 2.0, 3.0])

    def test_no_gaps_unchanged(self):
        y = np.array([1.0, 5.0, 2.0])
        assert np.array_equal(impute_linear(y), y)

    def test_double_gap(self):
        assert np.allclose(impute_linear([0.0, np.nan, np.nan, 3.0]), [0.0, 1.0, 2.0, 3.0])

    def test_leading_gap_rejected(self):
        with pytest.raises(DataError):
            impute_linear([np.nan, 1.0, 2.0])
        with pytest.raises(DataError):
            impute_linear([1.0, 2.0, np.nan])


class TestWarpingCurve:
    def test_endpoint_enforcement(self, grid):
        y = np.linspace(0.1, 1.0, len(grid))
        with pytest.raises(ValueError):
            WarpingCurve(grid, y)

    def test_non_monotone_rejected(self, grid):
        y = grid.t.copy()
        y[40] = y[60]  # large inversion
        with pytest.raises(ValueError):
            WarpingCurve(grid, y)

    def test_rounding_noise_repaired(self, grid):
        y = grid.t.copy()
        y[50] = y[49]  # tie at rounding scale
        w = WarpingCurve(grid, y)
        assert np.all(np.diff(w.y) > 0)

    def test_clamping(self, grid):
        y = grid.t.copy()
        y[-1] = 1.0 + 1e-13
        w = WarpingCurve(grid, y)
        assert w.y[-1] == 1.0

    def test_repair_warping_projects_noise(self, grid, rng):
        y = grid.t + rng.normal(0, 1e-3, len(grid))
        y[0], y[-1] = 0.0, 1.0
        w = repair_warping(grid, y)
        assert np.all(np.diff(w.y) > 0)
        assert w.y[0] == 0.0 and w.y[-1] == 1.0
        assert np.abs(w.y - grid.t).max() < 5e-3


class TestMultiSample:
    def test_shape_validation(self, grid):
        with pytest.raises(ValueError):
            MultiSample(grid, np.zeros((2, len(grid))))
        ms = MultiSample(grid, np.random.default_rng(0).normal(size=(3, 2, len(grid))))
        assert ms.n == 3 and ms.p == 2
        assert ms.component(1).shape == (3, len(grid))

    def test_from_curves_requires_shared_grid(self, grid):
        other = Grid.uniform(0, 1, 50)
        with pytest.raises(ValueError):
            MultiSample.from_curves([[Curve(grid, grid.t), Curve(other, other.t)]])


@settings(max_examples=25, deadline=None)
@given(w=st.floats(-2.5, 2.5))
def test_exp_family_round_trip_property(w):
    t = np.linspace(0, 1, 101)
    fwd = exp_growth_inverse_values(t, w)
    back = exp_growth_values(fwd, w)
    assert np.abs(back - t).max() < 1e-12


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=3, max_size=30))
def test_sup_normalize_bounded(ys):
    ys = np.asarray(ys)
    if np.all(ys == 0):
        return
    g = Grid(np.linspace(0, 1, ys.size)) if ys.size >= 3 else None
    out = sup_normalize(Curve(g, ys))
    assert np.abs(out.y).max() == pytest.approx(1.0, abs=1e-15)
