"""Depth-based, registration-free estimation for multivariate functional data.

Observed curve panels are modeled as warped versions of one common
amplitude function: each component carries its own time distortion and each
individual its own warp. Every model element is estimated through
functional depth medians, which avoids curve registration entirely and is
robust to outlying trajectories.
"""

__version__ = "0.1.0"

from .curves import (
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
from .depth import (
    DepthMethod,
    band_depth,
    depth_median,
    mhi,
    mhi_scores,
    modified_band_depth,
    monotonized_depth_median,
    quantile_integrated_depth,
)
from .errors import (
    ConfigError,
    DataError,
    DegenerateCurveError,
    DomainError,
    WarpdepthError,
)
from .estimator import LatentDeformationEstimator, fit_ldm
from .simulation import (
    GroundTruth,
    Metrics,
    SimConfig,
    gen_contaminated_lambda,
    gen_h_setting1,
    gen_iterated_warp,
    gen_lambda,
    gen_nuisance,
    gen_psi_setting1,
    metrics,
    simulate,
)
from .benchmark import benchmark
from .whyra import WhyraResult, export_whyra, whyra
from .panel import load_panel, save_panel

__all__ = [
    "Curve",
    "Grid",
    "MultiSample",
    "WarpingCurve",
    "compose",
    "invert",
    "monotonize",
    "unit_monotonize",
    "sup_normalize",
    "moving_average",
    "impute_linear",
    "repair_warping",
    "DepthMethod",
    "band_depth",
    "modified_band_depth",
    "mhi",
    "mhi_scores",
    "quantile_integrated_depth",
    "depth_median",
    "monotonized_depth_median",
    "LatentDeformationEstimator",
    "fit_ldm",
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
    "benchmark",
    "whyra",
    "WhyraResult",
    "export_whyra",
    "load_panel",
    "save_panel",
    "WarpdepthError",
    "ConfigError",
    "DataError",
    "DegenerateCurveError",
    "DomainError",
]
