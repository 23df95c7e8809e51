"""Synthetic data generation for the latent deformation model.

Samples follow ``X_ij(t_k) = A_ij * (lambda ∘ psi_j ∘ h_i ∘ r_ij)(t_k) + eps_ijk``
where the nuisance warps ``r_ij`` break the shared-individual-warp
assumption and ``eps`` is additive observation noise. Component distortions
and individual warps come in two flavors each: closed-form deterministic /
exponential-family warps, and rough random warps built by iterating a
random piecewise-linear map.

Randomness is driven by the counter-based Philox generator with one
substream per individual (and per component where needed), so enlarging
``n`` or ``p`` never perturbs the draws of existing cells.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import beta as _beta_dist

from .curves import Curve, Grid, MultiSample, WarpingCurve
from .errors import ConfigError

__all__ = [
    "SimConfig",
    "GroundTruth",
    "Metrics",
    "simulate",
    "metrics",
    "gen_lambda",
    "gen_contaminated_lambda",
    "gen_psi_setting1",
    "gen_iterated_warp",
    "gen_h_setting1",
    "gen_nuisance",
    "lambda_template",
    "contaminated_template",
]

# Fine-grid refinement factor for numerically tabulated warps and their
# inverses (keeps inversion error well below the metric resolution).
_REFINE = 10

# Substream labels for the counter-based generator.
_STREAMS = {"h": 0, "r": 1, "scale": 2, "noise": 3, "psi": 4, "outliers": 5}


def substream(seed, name, *key):
    """Philox generator for one named substream of a master seed."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(_STREAMS[name], *key))
    return np.random.Generator(np.random.Philox(ss))


# ---------------------------------------------------------------------------
# Templates
# ---------------------------------------------------------------------------


def lambda_template(x):
    """Unnormalized common amplitude: non-monotone with several features."""
    x = np.asarray(x, dtype=float)
    return 20.0 + 15.0 * x**2 - 5.0 * np.cos(4.0 * np.pi * x) + 3.0 * np.sin(np.pi * x**2)


def contaminated_template(x):
    """Unnormalized contaminating amplitude: a centered Gaussian bump on a ramp."""
    x = np.asarray(x, dtype=float)
    return x + np.exp(-25.0 * (x - 0.5) ** 2)


def gen_lambda(grid):
    """Normalized common amplitude sampled on the grid (sup norm exactly 1)."""
    vals = lambda_template(grid.t)
    return Curve(grid, vals / np.abs(vals).max())


def gen_contaminated_lambda(grid):
    """Normalized contaminating amplitude sampled on the grid."""
    vals = contaminated_template(grid.t)
    return Curve(grid, vals / np.abs(vals).max())


# ---------------------------------------------------------------------------
# Component distortions, setting 1: four deterministic Beta-CDF mixtures whose
# inverses average to the identity.
# ---------------------------------------------------------------------------


def _psi_setting1_callables(fine):
    def mix(a, b):
        return lambda x: 0.5 * _beta_dist.cdf(x, a, b) + 0.5 * np.asarray(x, dtype=float)

    f1, f2 = mix(2.0, 2.0), mix(2.0, 0.5)
    v1, v2 = f1(fine), f2(fine)
    inv1_tab, inv2_tab = np.interp(fine, v1, fine), np.interp(fine, v2, fine)
    # mirrored inverses: psi_{j}^{-1} = 2t - psi_{j-2}^{-1}
    q3, q4 = 2.0 * fine - inv1_tab, 2.0 * fine - inv2_tab
    funcs = [
        f1,
        f2,
        lambda x: np.interp(x, q3, fine),
        lambda x: np.interp(x, q4, fine),
    ]
    invs = [
        lambda x: np.interp(x, v1, fine),
        lambda x: np.interp(x, v2, fine),
        lambda x: np.interp(x, fine, q3),
        lambda x: np.interp(x, fine, q4),
    ]
    return funcs, invs


def gen_psi_setting1(grid):
    """The four deterministic component distortions on ``[0, 1]``."""
    fine = np.linspace(0.0, 1.0, _REFINE * grid.intervals + 1)
    funcs, _ = _psi_setting1_callables(fine)
    return [WarpingCurve(grid, f(grid.t)) for f in funcs]


# ---------------------------------------------------------------------------
# Iterated random warps (component setting 2 and individual setting 2).
# ---------------------------------------------------------------------------


def _iterated_warp_draws(rng, eps_w, iterations):
    u = rng.uniform(10.0 * eps_w, 1.0 - 10.0 * eps_w, size=iterations)
    v = u + rng.uniform(-eps_w, eps_w, size=iterations)
    return u, v


def iterated_warp_values(x, eps_w, iterations, rng):
    """Evaluate an iterated piecewise-linear random warp exactly at ``x``.

    Each iteration composes a random two-piece linear bijection of ``[0, 1]``
    with breakpoint ``(u, v)``, ``u ~ U(10*eps_w, 1 - 10*eps_w)`` and
    ``v ~ U(u - eps_w, u + eps_w)``; every such map has conditional mean
    equal to the identity, so the iterate does too. Values are propagated
    through the closed-form maps, so there is no grid-composition drift.
    """
    if not 10.0 * eps_w < 0.5:
        raise ConfigError("need 10 * eps_w < 0.5")
    u, v = _iterated_warp_draws(rng, eps_w, iterations)
    vals = np.array(x, dtype=float)
    for um, vm in zip(u, v):
        vals = np.where(
            vals <= um,
            (vm / um) * vals,
            ((1.0 - vm) * vals + (vm - um)) / (1.0 - um),
        )
    vals = np.clip(vals, 0.0, 1.0)
    x = np.asarray(x, dtype=float)
    vals[x == 0.0] = 0.0
    vals[x == 1.0] = 1.0
    return vals


def _iterated_warp_batch(x, eps_w, iterations, rngs):
    """Stack of iterated warps evaluated at shared points, one rng each."""
    draws = [_iterated_warp_draws(rng, eps_w, iterations) for rng in rngs]
    u = np.stack([d[0] for d in draws], axis=1)[:, :, None]
    v = np.stack([d[1] for d in draws], axis=1)[:, :, None]
    vals = np.broadcast_to(np.asarray(x, dtype=float), (len(rngs), x.size)).copy()
    for m in range(iterations):
        um, vm = u[m], v[m]
        vals = np.where(
            vals <= um,
            (vm / um) * vals,
            ((1.0 - vm) * vals + (vm - um)) / (1.0 - um),
        )
    vals = np.clip(vals, 0.0, 1.0)
    vals[:, x == 0.0] = 0.0
    vals[:, x == 1.0] = 1.0
    return vals


def gen_iterated_warp(grid, eps_w, iterations, rng):
    """One iterated random warp sampled on the grid."""
    if not (grid.start == 0.0 and grid.stop == 1.0):
        raise ConfigError("iterated warps are defined on [0, 1]")
    return WarpingCurve(grid, iterated_warp_values(grid.t, eps_w, iterations, rng))


# ---------------------------------------------------------------------------
# Exponential-family warps (individual setting 1 and nuisance distortions).
# ---------------------------------------------------------------------------


def exp_growth_values(x, w):
    """The inverse-warp family ``(exp(x w) - 1) / (exp(w) - 1)``; identity at w=0."""
    x = np.asarray(x, dtype=float)
    if abs(w) < 1e-12:
        return x.copy()
    return np.expm1(x * w) / np.expm1(w)


def exp_growth_inverse_values(s, w):
    """Closed-form inverse of :func:`exp_growth_values`."""
    s = np.asarray(s, dtype=float)
    if abs(w) < 1e-12:
        return s.copy()
    return np.log1p(s * np.expm1(w)) / w


def gen_h_setting1(grid, sigma_w, rng, n):
    """Individual warps whose inverses are exponential-growth curves.

    ``h_i^{-1}(t) = (exp(t w_i) - 1) / (exp(w_i) - 1)`` with
    ``w_i ~ N(0, sigma_w^2)``; the forward warp is evaluated in closed form.
    """
    ws = rng.normal(0.0, sigma_w, size=n)
    return [WarpingCurve(grid, exp_growth_inverse_values(grid.t, w)) for w in ws]


def gen_nuisance(grid, sigma_d, rng, n, p):
    """Per-cell nuisance warps from the same exponential family."""
    ds = rng.normal(0.0, sigma_d, size=(n, p))
    return [
        [WarpingCurve(grid, exp_growth_inverse_values(grid.t, ds[i, j])) for j in range(p)]
        for i in range(n)
    ]


# ---------------------------------------------------------------------------
# Full simulation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SimConfig:
    """Configuration of one simulated scenario.

    ``sigma_w`` drives individual warps under ``h_setting=1`` and ``eps_w``
    under ``h_setting=2``; the inactive parameter is ignored. ``eps_w_psi``
    and ``iterations`` control the random component distortions of
    ``psi_setting=2``.
    """

    n: int = 50
    p: int = 4
    intervals: int = 101
    psi_setting: int = 1
    h_setting: int = 1
    sigma_w: float = 0.5
    eps_w: float = 0.005
    sigma_d: float = 0.0
    sigma_e: float = 0.0
    contamination: float = 0.0
    iterations: int = 2500
    eps_w_psi: float = 0.005
    seed: int = 0

    def __post_init__(self):
        if self.intervals < 2:
            raise ConfigError("need at least 2 grid intervals")
        if self.n < 2:
            raise ConfigError("need at least 2 individuals")
        if self.psi_setting not in (1, 2):
            raise ConfigError("psi_setting must be 1 or 2")
        if self.h_setting not in (1, 2):
            raise ConfigError("h_setting must be 1 or 2")
        if self.psi_setting == 1 and self.p != 4:
            raise ConfigError("psi_setting 1 defines exactly 4 components")
        if self.p < 1:
            raise ConfigError("need at least one component")
        if not 0.0 <= self.contamination < 0.5:
            raise ConfigError("contamination must lie in [0, 0.5)")
        for name in ("sigma_w", "sigma_d", "sigma_e"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be nonnegative")


@dataclass(frozen=True)
class GroundTruth:
    """Everything the generator knows: templates, warps, scales, outliers."""

    grid: Grid
    lambda_values: np.ndarray
    contaminated_lambda_values: np.ndarray | None
    gamma: np.ndarray  # (p, m) component templates lambda ∘ psi_j
    psi: np.ndarray  # (p, m) component distortions
    h: np.ndarray  # (n, m) individual warps
    r: np.ndarray  # (n, p, m) nuisance warps
    scales: np.ndarray  # (n, p)
    outlier_mask: np.ndarray  # (n,) bool

    def h_curves(self):
        return [WarpingCurve(self.grid, row) for row in self.h]

    def psi_curves(self):
        return [WarpingCurve(self.grid, row) for row in self.psi]


def simulate(cfg):
    """Draw one sample from the configured scenario.

    Returns ``(sample, truth)`` where ``sample`` is the observed
    :class:`MultiSample` and ``truth`` the :class:`GroundTruth` behind it.
    Deterministic given ``cfg.seed``.
    """
    grid = Grid.uniform(0.0, 1.0, cfg.intervals)
    t = grid.t
    n, p = cfg.n, cfg.p
    fine = np.linspace(0.0, 1.0, _REFINE * cfg.intervals + 1)

    sup = np.abs(lambda_template(t)).max()
    lam_values = lambda_template(t) / sup

    contaminated = cfg.contamination > 0
    if contaminated:
        sup_c = np.abs(contaminated_template(t)).max()
        lam_c_values = contaminated_template(t) / sup_c
    else:
        lam_c_values = None

    # component distortions: callables usable at arbitrary points
    if cfg.psi_setting == 1:
        psi_funcs, _ = _psi_setting1_callables(fine)
    else:
        rngs = [substream(cfg.seed, "psi", j) for j in range(p)]
        tables = _iterated_warp_batch(fine, cfg.eps_w_psi, cfg.iterations, rngs)
        # the iterate is the inverse distortion, so the forward map swaps axes
        psi_funcs = [
            (lambda x, tab=tables[j]: np.interp(x, tab, fine)) for j in range(p)
        ]
    psi_values = np.stack([f(t) for f in psi_funcs])

    # individual warps
    if cfg.h_setting == 1:
        ws = np.array([substream(cfg.seed, "h", i).normal(0.0, cfg.sigma_w) for i in range(n)])
        h_funcs = [
            (lambda x, w=ws[i]: exp_growth_inverse_values(x, w)) for i in range(n)
        ]
    else:
        rngs = [substream(cfg.seed, "h", i) for i in range(n)]
        tables = _iterated_warp_batch(fine, cfg.eps_w, cfg.iterations, rngs)
        h_funcs = [
            (lambda x, tab=tables[i]: np.interp(x, tab, fine)) for i in range(n)
        ]
    h_values = np.stack([f(t) for f in h_funcs])

    # outlier assignment
    mask = np.zeros(n, dtype=bool)
    if contaminated:
        k = int(round(cfg.contamination * n))
        picks = substream(cfg.seed, "outliers").choice(n, size=k, replace=False)
        mask[picks] = True

    gamma = np.stack([lambda_template(f(t)) / sup for f in psi_funcs])

    values = np.empty((n, p, len(grid)))
    r_values = np.empty((n, p, len(grid)))
    scales = np.empty((n, p))
    for i in range(n):
        ds = substream(cfg.seed, "r", i).normal(0.0, cfg.sigma_d, size=p)
        scales_i = substream(cfg.seed, "scale", i).normal(100.0, 2.0, size=p)
        noise_i = (
            substream(cfg.seed, "noise", i).normal(0.0, cfg.sigma_e, size=(p, len(grid)))
            if cfg.sigma_e > 0
            else np.zeros((p, len(grid)))
        )
        for j in range(p):
            inner = exp_growth_inverse_values(t, ds[j]) if cfg.sigma_d > 0 else t
            r_values[i, j] = inner
            warped = psi_funcs[j](h_funcs[i](inner))
            if mask[i]:
                base = contaminated_template(warped) / sup_c
            else:
                base = lambda_template(warped) / sup
            values[i, j] = scales_i[j] * base + noise_i[j]
        scales[i] = scales_i

    sample = MultiSample(grid, values)
    truth = GroundTruth(
        grid=grid,
        lambda_values=lam_values,
        contaminated_lambda_values=lam_c_values,
        gamma=gamma,
        psi=psi_values,
        h=h_values,
        r=r_values,
        scales=scales,
        outlier_mask=mask,
    )
    return sample, truth


# ---------------------------------------------------------------------------
# Error metrics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Metrics:
    """Integrated squared errors of a fitted model against the truth."""

    lise: float
    hmise: float
    xmise: float


def metrics(estimate, truth, sample):
    """LISE / HMISE / XMISE of a fit, integrated by the trapezoid rule.

    ``estimate`` is anything exposing ``lambda_``, ``h_`` and ``x_hat_``
    (e.g. a fitted :class:`~warpdepth.estimator.LatentDeformationEstimator`).
    LISE always compares against the clean amplitude. Under contamination
    the flagged outliers are excluded from HMISE and XMISE, whose warps and
    curves follow a different template. Reconstructions are rescaled by each
    observed curve's sup norm before XMISE is taken, so it is measured on
    the original data scale.
    """
    t = truth.grid.t
    if sample.grid != truth.grid:
        raise ValueError("sample and truth grids differ")
    lise = float(np.trapezoid((estimate.lambda_ - truth.lambda_values) ** 2, t))
    keep = ~truth.outlier_mask
    hmise = float(
        np.trapezoid((estimate.h_[keep] - truth.h[keep]) ** 2, t, axis=-1).mean()
    )
    norms = np.abs(sample.values).max(axis=-1)
    x_hat = estimate.x_hat_ * norms[..., None]
    xmise = float(
        np.trapezoid((x_hat[keep] - sample.values[keep]) ** 2, t, axis=-1).mean()
    )
    return Metrics(lise=lise, hmise=hmise, xmise=xmise)
