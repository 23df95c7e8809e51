"""Warping Hypograph Ranking Agreement diagnostic.

Under the latent deformation model each individual shows the same time
distortion in every component, so the per-component warp estimates of one
individual should occupy the same rank everywhere. Ranking warps by their
modified hypograph index within each component and scattering the indices
against each other makes violations of that assumption visible; the average
pairwise correlation summarizes the agreement when there are many
components.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import pearsonr, spearmanr

from .depth import mhi_scores

__all__ = ["WhyraResult", "whyra", "export_whyra"]


@dataclass(frozen=True)
class WhyraResult:
    """Ranking-agreement summary of component-wise warp estimates."""

    mhi_matrix: np.ndarray  # (n, p) MHI of each warp within its component
    pairs: dict = field(repr=False)  # (j, k) -> (n, 2) scatter points
    correlations: dict = field(repr=False)  # (j, k) -> r or nan when skipped
    avg_correlation: float
    skipped_pairs: int
    method: str


def _as_warp_array(h_componentwise):
    arr = np.asarray(h_componentwise, dtype=float)
    if arr.ndim != 3:
        raise ValueError("expected (n, p, grid) warp estimates")
    return arr


def whyra(h_componentwise, method="pearson"):
    """Rank agreement of per-component warp estimates.

    Parameters
    ----------
    h_componentwise : ndarray of shape (n, p, m)
        Warp estimates per individual and component, e.g. the
        ``h_componentwise_`` attribute of a fitted estimator.
    method : {"pearson", "spearman"}
        Correlation flavor for the summary. MHI values are already
        rank-like, so Spearman is offered as an alternative.

    Notes
    -----
    A component column with zero variance (all warps identical) carries no
    ranking information: pairs of two degenerate columns count as perfect
    agreement, pairs with exactly one degenerate column are skipped and
    reported in ``skipped_pairs``.
    """
    warps = _as_warp_array(h_componentwise)
    n, p, _ = warps.shape
    if p < 2:
        raise ValueError("need at least 2 components to compare rankings")
    if method not in ("pearson", "spearman"):
        raise ValueError(f"unknown correlation method {method!r}")
    corr = pearsonr if method == "pearson" else spearmanr

    mhi_matrix = np.column_stack([mhi_scores(warps[:, j, :]) for j in range(p)])
    degenerate = mhi_matrix.std(axis=0) == 0

    pairs = {}
    correlations = {}
    used = []
    skipped = 0
    for j in range(p):
        for k in range(j + 1, p):
            pairs[(j, k)] = np.column_stack([mhi_matrix[:, j], mhi_matrix[:, k]])
            if degenerate[j] and degenerate[k]:
                correlations[(j, k)] = 1.0
                used.append(1.0)
            elif degenerate[j] or degenerate[k]:
                correlations[(j, k)] = float("nan")
                skipped += 1
            else:
                r = float(corr(mhi_matrix[:, j], mhi_matrix[:, k]).statistic)
                correlations[(j, k)] = r
                used.append(r)
    avg = float(np.mean(used)) if used else float("nan")
    return WhyraResult(
        mhi_matrix=mhi_matrix,
        pairs=pairs,
        correlations=correlations,
        avg_correlation=avg,
        skipped_pairs=skipped,
        method=method,
    )


def export_whyra(result, out_dir, svg=True):
    """Write the diagnostic to ``out_dir``: MHI table, pair table, scatter SVG.

    Returns the list of written paths. I/O failures surface with the
    offending path in the message.
    """
    os.makedirs(out_dir, exist_ok=True)
    written = []
    n, p = result.mhi_matrix.shape

    mhi_path = os.path.join(out_dir, "mhi.csv")
    try:
        with open(mhi_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["individual", "component", "mhi"])
            for i in range(n):
                for j in range(p):
                    writer.writerow([i, j, repr(result.mhi_matrix[i, j])])
    except OSError as exc:
        raise OSError(f"failed writing {mhi_path}: {exc}") from exc
    written.append(mhi_path)

    pairs_path = os.path.join(out_dir, "pairs.csv")
    try:
        with open(pairs_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["component_a", "component_b", "individual", "mhi_a", "mhi_b"])
            for (j, k), pts in result.pairs.items():
                for i in range(n):
                    writer.writerow([j, k, i, repr(pts[i, 0]), repr(pts[i, 1])])
    except OSError as exc:
        raise OSError(f"failed writing {pairs_path}: {exc}") from exc
    written.append(pairs_path)

    if svg:
        written.append(_scatter_matrix_svg(result, os.path.join(out_dir, "whyra.svg")))
    return written


def _scatter_matrix_svg(result, path):
    import matplotlib

    matplotlib.use("Agg", force=False)
    import matplotlib.pyplot as plt

    n, p = result.mhi_matrix.shape
    color = result.mhi_matrix[:, 0]
    fig, axes = plt.subplots(p - 1, p - 1, figsize=(2.2 * (p - 1), 2.2 * (p - 1)), squeeze=False)
    for j in range(p - 1):
        for k in range(1, p):
            ax = axes[k - 1][j]
            if k <= j:
                ax.axis("off")
                continue
            pts = result.pairs[(j, k)]
            ax.scatter(pts[:, 0], pts[:, 1], c=color, cmap="viridis", s=12)
            ax.plot([0, 1], [0, 1], lw=0.5, color="gray")
            ax.set_xlim(0, 1)
            ax.set_ylim(0, 1)
            ax.set_xlabel(f"MHI comp {j}", fontsize=7)
            ax.set_ylabel(f"MHI comp {k}", fontsize=7)
            ax.tick_params(labelsize=6)
    fig.tight_layout()
    try:
        fig.savefig(path, format="svg")
    except OSError as exc:
        raise OSError(f"failed writing {path}: {exc}") from exc
    finally:
        plt.close(fig)
    return path
