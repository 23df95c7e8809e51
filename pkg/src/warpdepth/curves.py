"""Discretized curve arithmetic on a shared grid.

Curves are vectors of values sampled on a common strictly increasing grid.
Evaluation between nodes is piecewise linear throughout; composition and
inversion of monotone curves reduce to interpolation, so no spline machinery
is involved. All objects are immutable after construction and every
operation is a pure function, safe to call concurrently.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import isotonic_regression

from .errors import DataError, DegenerateCurveError, DomainError

__all__ = [
    "Grid",
    "Curve",
    "WarpingCurve",
    "MultiSample",
    "compose",
    "invert",
    "sup_normalize",
    "monotonize",
    "unit_monotonize",
    "moving_average",
    "impute_linear",
    "repair_warping",
]

# Relative scale below which monotonicity violations are treated as rounding
# noise and repaired instead of rejected.
_ROUNDING_TOL = 1e-12


class Grid:
    """Ordered sampling points ``t_0 < ... < t_K`` spanning ``[t_0, t_K]``."""

    __slots__ = ("t",)

    def __init__(self, t):
        t = np.array(t, dtype=float)
        if t.ndim != 1 or t.size < 3:
            raise ValueError("grid needs at least 3 points (K >= 2)")
        if not np.all(np.isfinite(t)):
            raise ValueError("grid points must be finite")
        if not np.all(np.diff(t) > 0):
            raise ValueError("grid points must be strictly increasing")
        t.flags.writeable = False
        self.t = t

    @classmethod
    def uniform(cls, start=0.0, stop=1.0, intervals=100):
        """Equispaced grid with ``intervals + 1`` points on ``[start, stop]``."""
        return cls(np.linspace(start, stop, intervals + 1))

    @property
    def start(self):
        return self.t[0]

    @property
    def stop(self):
        return self.t[-1]

    @property
    def intervals(self):
        return self.t.size - 1

    def __len__(self):
        return self.t.size

    def __eq__(self, other):
        return isinstance(other, Grid) and np.array_equal(self.t, other.t)

    def __repr__(self):
        return f"Grid({self.t.size} points on [{self.start:g}, {self.stop:g}])"

    def identity(self):
        """The identity warping on this grid."""
        return WarpingCurve(self, self.t)


class Curve:
    """One function sampled on a :class:`Grid`; values must be finite."""

    __slots__ = ("grid", "y")

    def __init__(self, grid, y):
        if not isinstance(grid, Grid):
            grid = Grid(grid)
        y = np.array(y, dtype=float)
        if y.shape != grid.t.shape:
            raise ValueError(f"values have shape {y.shape}, grid has {grid.t.shape}")
        if not np.all(np.isfinite(y)):
            raise ValueError("curve values must be finite")
        y.flags.writeable = False
        self.grid = grid
        self.y = y

    def __call__(self, t):
        """Piecewise-linear evaluation; exact at grid nodes.

        Raises
        ------
        DomainError
            If ``t`` falls outside the observation interval.
        """
        t = np.asarray(t, dtype=float)
        if np.any(t < self.grid.start) or np.any(t > self.grid.stop):
            raise DomainError(
                f"evaluation point outside [{self.grid.start:g}, {self.grid.stop:g}]"
            )
        out = np.interp(t, self.grid.t, self.y)
        return float(out) if out.ndim == 0 else out

    def __repr__(self):
        return f"{type(self).__name__}({self.grid!r})"


class WarpingCurve(Curve):
    """A strictly increasing curve fixing both endpoints of the interval.

    Values are clamped into the observation interval. Monotonicity
    violations below rounding scale (1e-12 relative) are repaired by
    nudging; anything larger is rejected.
    """

    __slots__ = ()

    def __init__(self, grid, y):
        if not isinstance(grid, Grid):
            grid = Grid(grid)
        start, stop = grid.start, grid.stop
        span = stop - start
        tol = _ROUNDING_TOL * span
        y = np.clip(np.asarray(y, dtype=float), start, stop)
        if abs(y[0] - start) > tol or abs(y[-1] - stop) > tol:
            raise ValueError("warping curve must fix both endpoints")
        y = y.copy()
        y[0], y[-1] = start, stop
        d = np.diff(y)
        if np.any(d <= 0):
            if d.min() < -tol:
                raise ValueError("warping curve must be strictly increasing")
            y = _nudge_strict(y)
        super().__init__(grid, y)


def _nudge_strict(y):
    """Break rounding-scale ties/inversions while keeping endpoints fixed."""
    y = np.maximum.accumulate(y)
    for k in range(1, y.size - 1):
        if y[k] <= y[k - 1]:
            y[k] = np.nextafter(y[k - 1], np.inf)
    if y[-1] <= y[-2]:
        for k in range(y.size - 2, 0, -1):
            if y[k] >= y[k + 1]:
                y[k] = np.nextafter(y[k + 1], -np.inf)
            else:
                break
    if np.any(np.diff(y) <= 0):
        raise ValueError("could not repair monotonicity at rounding scale")
    return y


class MultiSample:
    """An ``n x p`` panel of curves observed on one shared grid.

    Stored internally as an ``(n, p, len(grid))`` array; ``curve(i, j)``
    returns the typed view of a single cell.
    """

    __slots__ = ("grid", "values")

    def __init__(self, grid, values):
        if not isinstance(grid, Grid):
            grid = Grid(grid)
        values = np.array(values, dtype=float)
        if values.ndim != 3:
            raise ValueError("expected an (n, p, grid) array of values")
        if values.shape[2] != len(grid):
            raise ValueError(
                f"curves have {values.shape[2]} points, grid has {len(grid)}"
            )
        if values.shape[0] < 1 or values.shape[1] < 1:
            raise ValueError("panel must contain at least one curve")
        if not np.all(np.isfinite(values)):
            raise ValueError("panel values must be finite")
        values.flags.writeable = False
        self.grid = grid
        self.values = values

    @classmethod
    def from_curves(cls, curves):
        """Build from a nested ``n x p`` sequence of :class:`Curve`."""
        rows = []
        grid = None
        for row in curves:
            vals = []
            for c in row:
                if grid is None:
                    grid = c.grid
                elif c.grid != grid:
                    raise ValueError("all curves must share an identical grid")
                vals.append(c.y)
            rows.append(vals)
        return cls(grid, np.asarray(rows))

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def p(self):
        return self.values.shape[1]

    def curve(self, i, j):
        return Curve(self.grid, self.values[i, j])

    def component(self, j):
        """All curves of component ``j`` as an ``(n, grid)`` value matrix."""
        return self.values[:, j, :]

    def __repr__(self):
        return f"MultiSample(n={self.n}, p={self.p}, {self.grid!r})"


# ---------------------------------------------------------------------------
# Array-level kernels. These carry the numerics; the typed operations below
# are thin wrappers. Estimation code calls the kernels directly.
# ---------------------------------------------------------------------------


def compose_values(t, f_values, warp_values):
    """Values of ``f`` (sampled as ``f_values`` on ``t``) at ``warp_values``."""
    return np.interp(warp_values, t, f_values)


def invert_values(t, warp_values):
    """Sample the inverse of an increasing warp back onto the same grid."""
    return np.interp(t, warp_values, t)


def monotonize_values(values):
    """Cumulative total variation along the last axis (row-wise transform)."""
    values = np.asarray(values, dtype=float)
    steps = np.abs(np.diff(values, axis=-1))
    out = np.zeros_like(values)
    np.cumsum(steps, axis=-1, out=out[..., 1:])
    return out


def unit_monotonize_values(t, values, flat_eps=1e-8):
    """Monotonize one curve and rescale onto the interval as a strict warp.

    Flat segments of the cumulative-variation transform are broken by adding
    a ramp of slope ``flat_eps * (value range)`` before rescaling, so the
    result is strictly increasing whenever the input is not constant.

    Raises
    ------
    DegenerateCurveError
        If the input curve is constant.
    """
    values = np.asarray(values, dtype=float)
    tv = monotonize_values(values)
    value_range = values.max() - values.min()
    if value_range <= 0:
        raise DegenerateCurveError("cannot monotonize a constant curve")
    s = tv + (flat_eps * value_range) * (t - t[0])
    total = s[-1]
    start, stop = t[0], t[-1]
    return start + (stop - start) * (s / total)


def repair_warping_values(t, values, blend=1e-9):
    """Project near-monotone values onto a valid strict warping.

    Pool-adjacent-violators removes interpolation-noise inversions, the
    endpoints are pinned exactly, and a convex blend with the identity
    (weight ``blend``) turns any remaining flat run strictly increasing
    without moving the curve more than ``blend * interval length``.
    """
    start, stop = t[0], t[-1]
    y = np.clip(np.asarray(values, dtype=float), start, stop)
    if np.any(np.diff(y) < 0):
        y = isotonic_regression(y).x
    y[0], y[-1] = start, stop
    y = np.maximum.accumulate(y)
    return (1.0 - blend) * y + blend * t


# ---------------------------------------------------------------------------
# Typed operations.
# ---------------------------------------------------------------------------


def _require_shared_grid(a, b):
    if a.grid != b.grid:
        raise ValueError("curves combined in one operation must share a grid")


def compose(f, g):
    """Composition ``f`` after ``g``: sample ``f(g(t_k))`` on the grid.

    ``g`` must be a :class:`WarpingCurve`; the result is again a
    :class:`WarpingCurve` when ``f`` is one.
    """
    _require_shared_grid(f, g)
    if not isinstance(g, WarpingCurve):
        raise TypeError("inner function must be a WarpingCurve")
    vals = compose_values(f.grid.t, f.y, g.y)
    cls = WarpingCurve if isinstance(f, WarpingCurve) else Curve
    return cls(f.grid, vals)


def invert(h):
    """Piecewise-linear inverse of a warping, resampled onto the same grid."""
    if not isinstance(h, WarpingCurve):
        raise TypeError("only warping curves can be inverted")
    return WarpingCurve(h.grid, invert_values(h.grid.t, h.y))


def sup_normalize(c):
    """Divide by the sup norm so the maximum absolute value is exactly 1."""
    m = np.abs(c.y).max()
    if m == 0:
        raise DegenerateCurveError("cannot normalize an all-zero curve")
    return Curve(c.grid, c.y / m)


def monotonize(c):
    """Cumulative total-variation transform ``T``.

    ``T(c)(t)`` is the total variation of ``c`` on ``[t_0, t]``, computed as
    the cumulative sum of absolute increments. The output is non-decreasing
    for every input and strictly increasing whenever ``c`` has no flat
    segment; it commutes with warping: ``T(c ∘ h) = T(c) ∘ h``.
    """
    return Curve(c.grid, monotonize_values(c.y))


def unit_monotonize(c, flat_eps=1e-8):
    """Strictly increasing warp representing the monotonized shape of ``c``.

    Same transform as :func:`monotonize`, with flats broken and the range
    rescaled onto the observation interval. Total variation is invariant
    under warping, so the identity ``T(c ∘ h) = T(c) ∘ h`` is preserved.
    """
    return WarpingCurve(c.grid, unit_monotonize_values(c.grid.t, c.y, flat_eps))


def moving_average(c, window):
    """Centered moving mean with truncated (shrinking) windows at the ends."""
    vals = moving_average_values(c.y, window)
    return Curve(c.grid, vals)


def moving_average_values(values, window):
    if window < 1 or window % 2 == 0:
        raise ValueError("window must be a positive odd integer")
    values = np.asarray(values, dtype=float)
    if window > values.shape[-1]:
        raise ValueError("window exceeds the number of grid points")
    if window == 1:
        return values.copy()
    kernel = np.ones(window)
    counts = np.convolve(np.ones(values.shape[-1]), kernel, mode="same")
    if values.ndim == 1:
        return np.convolve(values, kernel, mode="same") / counts
    flat = values.reshape(-1, values.shape[-1])
    out = np.empty_like(flat)
    for k in range(flat.shape[0]):
        out[k] = np.convolve(flat[k], kernel, mode="same") / counts
    return out.reshape(values.shape)


def impute_linear(y, x=None):
    """Fill NaN gaps by the straight line between nearest present neighbors.

    Parameters
    ----------
    y : array-like
        Values with gaps marked as NaN. The first and last entries must be
        present.
    x : array-like, optional
        Abscissae of the values; defaults to the index, which matches the
        equispaced case.
    """
    y = np.array(y, dtype=float)
    present = np.isfinite(y)
    if present.all():
        return y
    if not present[0] or not present[-1]:
        raise DataError("leading or trailing gap cannot be imputed")
    if x is None:
        x = np.arange(y.size, dtype=float)
    else:
        x = np.asarray(x, dtype=float)
    y[~present] = np.interp(x[~present], x[present], y[present])
    return y


def repair_warping(grid, values, blend=1e-9):
    """Typed wrapper of :func:`repair_warping_values`."""
    if not isinstance(grid, Grid):
        grid = Grid(grid)
    return WarpingCurve(grid, repair_warping_values(grid.t, values, blend))
