"""Functional depth measures and depth-based medians.

All depths here are rank-based: they depend on the sample only through the
pointwise orderings of curve values at the grid nodes. As a consequence
every depth vector is exactly invariant under strictly monotone pointwise
transformations applied to the whole sample, which is what makes the depth
median usable as a registration-free template estimator.

Lebesgue measure on the domain is approximated by node-counting fractions
(the grids in this package are uniform by default), and pointwise ties
count as "inside the band" / "below the graph".
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .curves import Curve, MultiSample, monotonize_values

__all__ = [
    "DepthMethod",
    "band_depth",
    "modified_band_depth",
    "mhi",
    "mhi_scores",
    "quantile_integrated_depth",
    "depth_median",
    "monotonized_depth_median",
    "pointwise_simplicial_depth",
    "pointwise_halfspace_depth",
]


def sample_values(sample):
    """Coerce a sample of curves into an ``(n, m)`` value matrix.

    Accepts a 2-D array, a sequence of :class:`~warpdepth.curves.Curve`
    sharing one grid, or a :class:`~warpdepth.curves.MultiSample` with a
    single component.
    """
    if isinstance(sample, np.ndarray):
        if sample.ndim != 2:
            raise ValueError("expected an (n, m) array of curve values")
        return sample
    if isinstance(sample, MultiSample):
        if sample.p != 1:
            raise ValueError("pass one component at a time, e.g. sample.component(j)")
        return sample.component(0)
    rows = []
    grid = None
    for c in sample:
        if isinstance(c, Curve):
            if grid is None:
                grid = c.grid
            elif c.grid != grid:
                raise ValueError("sample curves must share an identical grid")
            rows.append(c.y)
        else:
            rows.append(np.asarray(c, dtype=float))
    return np.asarray(rows, dtype=float)


def _strict_counts(values):
    """Per node: how many sample values lie strictly below / above each one."""
    n = values.shape[0]
    r_min = rankdata(values, method="min", axis=0)
    r_max = rankdata(values, method="max", axis=0)
    below = r_min - 1.0
    above = n - r_max
    return below, above


def pointwise_simplicial_depth(values):
    """Univariate simplicial depth of each curve value at each node.

    The depth of ``x`` at a node is the fraction of sample pairs ``(j, k)``
    whose closed interval ``[min, max]`` contains ``x`` there. Averaging the
    rows over nodes gives the modified band depth.
    """
    values = sample_values(values)
    n = values.shape[0]
    if n < 2:
        raise ValueError("depth needs a sample of at least 2 curves")
    below, above = _strict_counts(values)
    pairs = 0.5 * n * (n - 1)
    outside = 0.5 * below * (below - 1) + 0.5 * above * (above - 1)
    return (pairs - outside) / pairs


def pointwise_halfspace_depth(values):
    """Univariate halfspace (Tukey) depth at each node: min tail fraction."""
    values = sample_values(values)
    n = values.shape[0]
    if n < 2:
        raise ValueError("depth needs a sample of at least 2 curves")
    below, above = _strict_counts(values)
    return np.minimum(n - above, n - below) / n


def modified_band_depth(sample):
    """Modified band depth with bands from all curve pairs (J = 2).

    For each curve, the average over pairs of the fraction of grid nodes at
    which the curve lies inside the pair's pointwise band. Values lie in
    (0, 1] for sample members.
    """
    return pointwise_simplicial_depth(sample).mean(axis=1)


def band_depth(sample):
    """Band depth (J = 2): fraction of pairs whose band contains the whole curve.

    A pair contains a curve when the curve stays inside the pair's pointwise
    band at every grid node; pairs that include the curve itself always do.
    """
    values = sample_values(sample)
    n = values.shape[0]
    if n < 2:
        raise ValueError("depth needs a sample of at least 2 curves")
    pairs = 0.5 * n * (n - 1)
    depths = np.empty(n)
    for i in range(n):
        strictly_below = (values < values[i]).astype(float)
        strictly_above = (values > values[i]).astype(float)
        # pair (j, k) fails to contain curve i iff both members are strictly
        # below it somewhere or strictly above it somewhere
        fail = (strictly_below @ strictly_below.T > 0) | (
            strictly_above @ strictly_above.T > 0
        )
        depths[i] = 1.0 - np.triu(fail, 1).sum() / pairs
    return depths


def mhi_scores(sample):
    """Modified hypograph index of every sample member within the sample.

    ``MHI(x) = (1/n) sum_i frac{t : x_i(t) <= x(t)}``; sample members score
    in ``[1/n, 1]`` and the pointwise maximum scores exactly 1.
    """
    values = sample_values(sample)
    n = values.shape[0]
    if n < 1:
        raise ValueError("empty sample")
    at_or_below = rankdata(values, method="max", axis=0)
    return at_or_below.mean(axis=1) / n


def mhi(sample, x):
    """Modified hypograph index of curve ``x`` with respect to ``sample``."""
    values = sample_values(sample)
    if values.shape[0] < 1:
        raise ValueError("empty sample")
    xv = x.y if isinstance(x, Curve) else np.asarray(x, dtype=float)
    return float((values <= xv).mean())


def quantile_integrated_depth(sample, fraction=1.0, univariate="simplicial"):
    """Quantile integrated depth over a rank-based univariate depth.

    For each curve, pointwise univariate depths are computed at every node
    and averaged over the nodes whose depth falls at or below the
    ``fraction``-quantile of that curve's pointwise depths. ``fraction=1``
    is the plain integrated depth; ``fraction -> 0`` approaches the infimal
    depth.
    """
    if not 0 < fraction <= 1:
        raise ValueError("fraction must lie in (0, 1]")
    if univariate == "simplicial":
        d = pointwise_simplicial_depth(sample)
    elif univariate == "halfspace":
        d = pointwise_halfspace_depth(sample)
    else:
        raise ValueError(f"unknown univariate depth {univariate!r}")
    q = np.quantile(d, fraction, axis=1, keepdims=True)
    mask = d <= q
    return (d * mask).sum(axis=1) / mask.sum(axis=1)


@dataclass(frozen=True)
class DepthMethod:
    """Identifier of a functional depth measure.

    Parameters
    ----------
    kind : {"mbd", "bd", "mhi", "qid"}
        Modified band depth, band depth, modified hypograph index, or
        quantile integrated depth.
    fraction : float
        Quantile fraction for ``kind="qid"``, in (0, 1].
    univariate : {"simplicial", "halfspace"}
        Univariate rank-based depth integrated by ``kind="qid"``.
    """

    kind: str = "mbd"
    fraction: float = 1.0
    univariate: str = "simplicial"

    def __post_init__(self):
        if self.kind not in ("mbd", "bd", "mhi", "qid"):
            raise ValueError(f"unknown depth method {self.kind!r}")
        if not 0 < self.fraction <= 1:
            raise ValueError("fraction must lie in (0, 1]")
        if self.univariate not in ("simplicial", "halfspace"):
            raise ValueError(f"unknown univariate depth {self.univariate!r}")

    def scores(self, sample):
        """Depth of every sample member, as an ``(n,)`` vector."""
        if self.kind == "mbd":
            return modified_band_depth(sample)
        if self.kind == "bd":
            return band_depth(sample)
        if self.kind == "mhi":
            return mhi_scores(sample)
        return quantile_integrated_depth(sample, self.fraction, self.univariate)


def as_depth_method(method):
    if isinstance(method, DepthMethod):
        return method
    if isinstance(method, str):
        return DepthMethod(kind=method)
    raise TypeError("method must be a DepthMethod or a method name")


def depth_median(sample, method="mbd"):
    """Index of a deepest curve; ties broken by the smallest index."""
    scores = as_depth_method(method).scores(sample)
    return int(np.argmax(scores))


def monotonized_depth_median(sample, method="mbd"):
    """Index of the curve whose monotonized transform is deepest.

    The sample is passed through the cumulative total-variation transform,
    each curve rescaled by its own total variation, and the depth median is
    taken there; the returned index refers to the original sample. The
    rescaled transform commutes with warping exactly like the raw one
    (total variation is warp-invariant) and in addition cancels per-curve
    scale factors and the accumulated discretization error of the variation
    sums, which otherwise perturb ranks between near-tied central curves.
    """
    values = sample_values(sample)
    tv = monotonize_values(values)
    totals = tv[:, -1].copy()
    totals[totals == 0] = 1.0  # constant curves stay identically zero
    return depth_median(tv / totals[:, None], method)
