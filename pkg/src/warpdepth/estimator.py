"""Depth-based estimation of the latent deformation model.

Observed curves are modeled as ``X_ij = a_ij * (lambda ∘ psi_j ∘ h_i)``:
a common amplitude function composed with a per-component distortion and a
per-individual time warp, scaled per curve. After sup-norm normalization
the scales drop out and every component is a univariate time-warping model
whose template ``gamma_j = lambda ∘ psi_j`` is estimated by a functional
depth median — no registration step is involved. Individual warps follow by
inverting the (monotonized) templates, the common amplitude is the depth
median of the pooled sample, and component distortions close the loop.

When curves are not monotone, all inversions run through the cumulative
total-variation transform ``T``, which commutes with warping
(``T(x ∘ h) = T(x) ∘ h``), so ``h`` can still be read off monotone objects.
"""

from __future__ import annotations

import warnings

import numpy as np
from sklearn.base import BaseEstimator

from .curves import (
    Grid,
    MultiSample,
    compose_values,
    invert_values,
    moving_average_values,
    repair_warping_values,
    unit_monotonize_values,
)
from .depth import DepthMethod, depth_median, modified_band_depth, monotonized_depth_median
from .errors import DegenerateCurveError

__all__ = [
    "LatentDeformationEstimator",
    "fit_ldm",
    "estimate_gamma",
    "estimate_h",
    "estimate_lambda",
    "estimate_psi",
    "reconstruct",
]


def as_panel(X, grid=None):
    """Validate input as an ``(n, p, m)`` panel plus its grid."""
    if isinstance(X, MultiSample):
        return X.grid, X.values
    values = np.asarray(X, dtype=float)
    if values.ndim != 3:
        raise ValueError("X must be a MultiSample or an (n, p, grid) array")
    if grid is None:
        grid = Grid.uniform(0.0, 1.0, values.shape[2] - 1)
    elif not isinstance(grid, Grid):
        grid = Grid(grid)
    if len(grid) != values.shape[2]:
        raise ValueError("grid length does not match the curves")
    if not np.all(np.isfinite(values)):
        raise ValueError("panel values must be finite")
    return grid, values


def _is_strictly_monotone(values):
    d = np.diff(values, axis=-1)
    per_curve_up = (d > 0).all(axis=-1)
    per_curve_down = (d < 0).all(axis=-1)
    return bool(np.all(per_curve_up | per_curve_down))


def _component_median(values, method, monotonize_first):
    if monotonize_first:
        return monotonized_depth_median(values, method)
    return depth_median(values, method)


def estimate_gamma(values, method, monotonize_first):
    """Per-component template estimates: the deepest curve of each component.

    Returns the ``(p, m)`` template matrix, the selected indices, and a
    boolean flag per component marking degenerate (all-identical) ones,
    which fall back to index 0.
    """
    n, p, _ = values.shape
    indices = np.zeros(p, dtype=int)
    degenerate = np.zeros(p, dtype=bool)
    for j in range(p):
        comp = values[:, j, :]
        if np.all(comp == comp[0]):
            degenerate[j] = True
            warnings.warn(f"component {j} has identical curves; using index 0")
            continue
        indices[j] = _component_median(comp, method, monotonize_first)
    gamma = values[indices, np.arange(p), :]
    return gamma, indices, degenerate


def estimate_h(t, values, gamma, aggregation="mean", trim_fraction=0.1, flat_eps=1e-8):
    """Individual warps from the templates, one per component, then aggregated.

    Component-wise warps are ``h_ij = T(gamma_j)^{-1} ∘ T(X_ij)`` computed on
    the unit-rescaled total-variation transforms; each is repaired to a valid
    warping (isotonic clipping of interpolation noise, exact endpoints).
    Aggregation over components is the pointwise mean by default, or a
    per-individual functional median / depth-trimmed mean. Components whose
    template is flat are skipped with a diagnostic.
    """
    n, p, m = values.shape
    h_cw = np.full((n, p, m), np.nan)
    skipped = np.zeros(p, dtype=bool)
    for j in range(p):
        try:
            u_gamma = unit_monotonize_values(t, gamma[j], flat_eps)
        except DegenerateCurveError:
            skipped[j] = True
            warnings.warn(f"component {j} template is flat; skipped in h estimation")
            continue
        for i in range(n):
            u_x = unit_monotonize_values(t, values[i, j], flat_eps)
            raw = np.interp(u_x, u_gamma, t)
            h_cw[i, j] = repair_warping_values(t, raw)
    valid = ~skipped
    if not valid.any():
        raise DegenerateCurveError("all component templates are flat")
    h = np.empty((n, m))
    for i in range(n):
        h[i] = repair_warping_values(t, _aggregate_warps(h_cw[i, valid], aggregation, trim_fraction))
    return h, h_cw, skipped


def _aggregate_warps(warps, aggregation, trim_fraction):
    if warps.shape[0] == 1:
        return warps[0]
    if aggregation == "mean":
        return warps.mean(axis=0)
    if aggregation == "median":
        return warps[int(np.argmax(modified_band_depth(warps)))]
    if aggregation == "trimmed":
        if not 0 <= trim_fraction < 0.5:
            raise ValueError("trim_fraction must lie in [0, 0.5)")
        drop = int(np.floor(trim_fraction * warps.shape[0]))
        if drop == 0:
            return warps.mean(axis=0)
        order = np.argsort(modified_band_depth(warps), kind="stable")
        return warps[order[drop:]].mean(axis=0)
    raise ValueError(f"unknown aggregation {aggregation!r}")


def estimate_lambda(values, method, monotonize_first, pool="pooled", rng=None):
    """Common amplitude estimate: depth median of the pooled curve sample.

    ``pool="pooled"`` ranks all ``n * p`` curves together (the default, with
    better small-sample behavior); ``pool="random"`` draws one component per
    individual, which keeps the pooled curves independent. Returns the
    selected values and its ``(individual, component)`` index.
    """
    n, p, m = values.shape
    if pool == "pooled":
        flat = values.reshape(n * p, m)
        idx = _component_median(flat, method, monotonize_first)
        index = (idx // p, idx % p)
    elif pool == "random":
        if rng is None:
            rng = np.random.default_rng(0)
        picks = rng.integers(0, p, size=n)
        flat = values[np.arange(n), picks]
        idx = _component_median(flat, method, monotonize_first)
        index = (idx, int(picks[idx]))
    else:
        raise ValueError(f"unknown pool {pool!r}")
    return flat[idx].copy(), index


def estimate_psi(t, lam, gamma, flat_eps=1e-8):
    """Component distortions ``psi_j = T(lambda)^{-1} ∘ T(gamma_j)``.

    Rows for flat templates are NaN (matching skipped components). A flat
    amplitude estimate is an error.
    """
    u_lambda = unit_monotonize_values(t, lam, flat_eps)
    psi = np.full((gamma.shape[0], t.size), np.nan)
    for j in range(gamma.shape[0]):
        try:
            u_gamma = unit_monotonize_values(t, gamma[j], flat_eps)
        except DegenerateCurveError:
            continue
        psi[j] = repair_warping_values(t, np.interp(u_gamma, u_lambda, t))
    return psi


def reconstruct(t, gamma, h):
    """Fitted curves ``x_hat[i, j] = gamma_j ∘ h_i`` on the grid."""
    n, m = h.shape
    p = gamma.shape[0]
    out = np.empty((n, p, m))
    for i in range(n):
        for j in range(p):
            out[i, j] = compose_values(t, gamma[j], h[i])
    return out


class LatentDeformationEstimator(BaseEstimator):
    """Registration-free estimator of all latent deformation components.

    Parameters
    ----------
    depth : {"mbd", "bd", "mhi", "qid"}, default="mbd"
        Functional depth used for all medians.
    qid_fraction : float, default=1.0
        Quantile fraction when ``depth="qid"``.
    qid_univariate : {"simplicial", "halfspace"}, default="simplicial"
        Univariate depth integrated when ``depth="qid"``.
    monotonize : {"auto", True, False}, default="auto"
        Whether depth medians are taken over the monotonized sample. "auto"
        enables it unless every observed curve is strictly monotone.
    lambda_pool : {"pooled", "random"}, default="pooled"
        Candidate pool for the common amplitude: every curve, or one
        randomly selected component per individual.
    h_aggregation : {"mean", "median", "trimmed"}, default="mean"
        How component-wise warp estimates are combined per individual.
    trim_fraction : float, default=0.1
        Fraction of lowest-depth warps dropped when ``h_aggregation="trimmed"``.
    smoothing_window : int, default=1
        Odd moving-average window applied before normalization; 1 disables.
    flat_eps : float, default=1e-8
        Relative ramp slope used to break flats before inverting monotonized
        curves.
    random_state : int, default=0
        Seed for the random component selection; fits are bitwise
        reproducible given the same seed.

    Attributes
    ----------
    grid_ : Grid
        Shared observation grid.
    lambda_ : ndarray of shape (m,)
        Common amplitude estimate (a normalized sample curve).
    gamma_ : ndarray of shape (p, m)
        Per-component template estimates.
    psi_ : ndarray of shape (p, m)
        Component distortion warps.
    h_ : ndarray of shape (n, m)
        Individual warp estimates.
    h_componentwise_ : ndarray of shape (n, p, m)
        Warp estimates per component, before aggregation.
    x_hat_ : ndarray of shape (n, p, m)
        Reconstructions ``gamma_j ∘ h_i`` on the normalized scale.
    lambda_index_ : tuple of int
        ``(individual, component)`` of the curve selected as ``lambda_``.
    gamma_indices_ : ndarray of shape (p,)
        Individual selected as template in each component.
    norms_ : ndarray of shape (n, p)
        Sup norms divided out of each (smoothed) observed curve.
    monotonized_ : bool
        Whether depth medians used the monotonized sample.
    degenerate_components_, skipped_components_ : ndarray of bool
        Diagnostics for all-identical and flat-template components.
    """

    def __init__(
        self,
        depth="mbd",
        qid_fraction=1.0,
        qid_univariate="simplicial",
        monotonize="auto",
        lambda_pool="pooled",
        h_aggregation="mean",
        trim_fraction=0.1,
        smoothing_window=1,
        flat_eps=1e-8,
        random_state=0,
    ):
        self.depth = depth
        self.qid_fraction = qid_fraction
        self.qid_univariate = qid_univariate
        self.monotonize = monotonize
        self.lambda_pool = lambda_pool
        self.h_aggregation = h_aggregation
        self.trim_fraction = trim_fraction
        self.smoothing_window = smoothing_window
        self.flat_eps = flat_eps
        self.random_state = random_state

    def _depth_method(self):
        return DepthMethod(
            kind=self.depth,
            fraction=self.qid_fraction,
            univariate=self.qid_univariate,
        )

    def _normalized(self, values):
        if self.smoothing_window != 1:
            values = moving_average_values(values, self.smoothing_window)
        norms = np.abs(values).max(axis=-1)
        if np.any(norms == 0):
            raise DegenerateCurveError("panel contains an all-zero curve")
        return values / norms[..., None], norms

    def fit(self, X, y=None, grid=None):
        """Estimate all model components from an observed panel.

        Parameters
        ----------
        X : MultiSample or ndarray of shape (n, p, m)
            Observed curves.
        y : ignored
            Present for scikit-learn API compatibility.
        grid : Grid or array-like, optional
            Required when ``X`` is a bare array on a non-unit interval.
        """
        grid, raw = as_panel(X, grid)
        n, p, _ = raw.shape
        if n < 2:
            raise ValueError("need at least 2 individuals")
        t = grid.t
        values, norms = self._normalized(raw)
        if self.monotonize == "auto":
            monotonize_first = not _is_strictly_monotone(values)
        else:
            monotonize_first = bool(self.monotonize)
        method = self._depth_method()
        rng = np.random.default_rng(self.random_state)

        gamma, gamma_idx, degenerate = estimate_gamma(values, method, monotonize_first)
        h, h_cw, skipped = estimate_h(
            t, values, gamma, self.h_aggregation, self.trim_fraction, self.flat_eps
        )
        lam, lam_idx = estimate_lambda(
            values, method, monotonize_first, self.lambda_pool, rng
        )
        psi = estimate_psi(t, lam, gamma, self.flat_eps)

        self.grid_ = grid
        self.n_, self.p_ = n, p
        self.norms_ = norms
        self.monotonized_ = monotonize_first
        self.lambda_ = lam
        self.lambda_index_ = lam_idx
        self.gamma_ = gamma
        self.gamma_indices_ = gamma_idx
        self.degenerate_components_ = degenerate
        self.skipped_components_ = skipped
        self.h_ = h
        self.h_componentwise_ = h_cw
        self.psi_ = psi
        self.x_hat_ = reconstruct(t, gamma, h)
        return self

    def transform(self, X, grid=None):
        """Register curves: warp them back by the estimated individual warps.

        Warps are estimated against the fitted templates, so this also works
        for individuals not seen during fit. Returns the aligned normalized
        panel ``X_ij ∘ h_i^{-1}`` as an ``(n, p, m)`` array.
        """
        if not hasattr(self, "gamma_"):
            raise RuntimeError("estimator is not fitted")
        grid, raw = as_panel(X, grid)
        if grid != self.grid_:
            raise ValueError("transform grid must match the fitted grid")
        t = grid.t
        values, _ = self._normalized(raw)
        h, _, _ = estimate_h(
            t, values, self.gamma_, self.h_aggregation, self.trim_fraction, self.flat_eps
        )
        aligned = np.empty_like(values)
        for i in range(values.shape[0]):
            h_inv = invert_values(t, h[i])
            for j in range(values.shape[1]):
                aligned[i, j] = compose_values(t, values[i, j], h_inv)
        return aligned


def fit_ldm(sample, grid=None, **params):
    """Fit the full pipeline and return the fitted estimator.

    Equivalent to ``LatentDeformationEstimator(**params).fit(sample, grid=grid)``.
    """
    return LatentDeformationEstimator(**params).fit(sample, grid=grid)
