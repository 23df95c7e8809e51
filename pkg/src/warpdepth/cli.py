"""Command-line front end: simulate, estimate, benchmark, whyra.

Exit codes: 0 success, 2 usage or configuration error, 3 data error,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import platform
import sys

import numpy as np

from . import __version__
from .errors import ConfigError, DataError, DegenerateCurveError, DomainError
from .panel import (
    estimator_params_from_mapping,
    expand_config_grid,
    load_panel,
    parse_config_file,
    save_curve_table,
    save_panel,
    sim_config_from_mapping,
    split_config,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4


def build_parser():
    parser = argparse.ArgumentParser(
        prog="warpdepth",
        description="Depth-based estimation for multivariate functional data "
        "with separable time warping.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="generate a synthetic panel")
    sim.add_argument("--config", required=True, help="flat key=value scenario file")
    sim.add_argument("--out", required=True, help="output directory")
    sim.add_argument("--seed", type=int, default=None, help="override the scenario seed")

    est = sub.add_parser("estimate", help="fit the deformation model to a panel")
    est.add_argument("--data", required=True, help="panel CSV file")
    est.add_argument("--out", required=True, help="output directory")
    est.add_argument("--impute", action="store_true", help="fill missing cells linearly")
    est.add_argument("--smooth", type=int, default=1, metavar="W", help="odd moving-average window")
    est.add_argument("--config", default=None, help="optional estimator config file")
    est.add_argument("--depth", default=None, choices=["mbd", "bd", "mhi", "qid"])
    est.add_argument("--lambda-pool", default=None, choices=["pooled", "random"])
    est.add_argument("--h-aggregation", default=None, choices=["mean", "median", "trimmed"])
    est.add_argument("--seed", type=int, default=None, help="seed for random selections (default 0)")

    ben = sub.add_parser("benchmark", help="Monte Carlo benchmark over a config grid")
    ben.add_argument("--config", required=True, help="scenario grid file (commas make grids)")
    ben.add_argument("--runs", type=int, required=True, help="simulation runs per scenario")
    ben.add_argument("--jobs", type=int, default=1, help="parallel workers")
    ben.add_argument("--out", default="benchmark.csv", help="output CSV path")
    ben.add_argument("--dry-run", action="store_true", help="print the expanded grid and exit")

    why = sub.add_parser("whyra", help="warping rank-agreement diagnostic")
    why.add_argument("--h-dir", required=True, help="directory holding h_componentwise.csv")
    why.add_argument("--out", required=True, help="output directory")
    why.add_argument("--correlation", default="pearson", choices=["pearson", "spearman"])
    why.add_argument("--no-svg", action="store_true", help="skip the scatter-matrix SVG")

    return parser


def _versions():
    import scipy
    import sklearn

    return {
        "warpdepth": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "scikit-learn": sklearn.__version__,
        "python": platform.python_version(),
    }


def _write_manifest(out_dir, command, config):
    path = os.path.join(out_dir, "manifest.json")
    with open(path, "w") as fh:
        json.dump({"command": command, "config": config, "versions": _versions()}, fh, indent=2)
    return path


def _cmd_simulate(args):
    from dataclasses import asdict, replace

    from .simulation import simulate

    sim_keys, est_keys = split_config(parse_config_file(args.config))
    if est_keys:
        raise ConfigError("simulate config must not contain estimator keys")
    cfg = sim_config_from_mapping(sim_keys)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    sample, truth = simulate(cfg)

    os.makedirs(args.out, exist_ok=True)
    save_panel(sample, os.path.join(args.out, "panel.csv"))
    grid = truth.grid
    save_curve_table(
        os.path.join(args.out, "truth_lambda.csv"), grid, {"lambda": truth.lambda_values}
    )
    save_curve_table(
        os.path.join(args.out, "truth_gamma.csv"),
        grid,
        {f"c{j + 1}": truth.gamma[j] for j in range(cfg.p)},
    )
    save_curve_table(
        os.path.join(args.out, "truth_psi.csv"),
        grid,
        {f"c{j + 1}": truth.psi[j] for j in range(cfg.p)},
    )
    save_curve_table(
        os.path.join(args.out, "truth_h.csv"),
        grid,
        {f"i{i + 1}": truth.h[i] for i in range(cfg.n)},
    )
    with open(os.path.join(args.out, "outliers.csv"), "w") as fh:
        fh.write("individual,outlier\n")
        for i, flag in enumerate(truth.outlier_mask):
            fh.write(f"{i + 1},{int(flag)}\n")
    _write_manifest(args.out, "simulate", asdict(cfg))
    print(f"wrote simulated panel (n={cfg.n}, p={cfg.p}) to {args.out}")
    return EXIT_OK


def _cmd_estimate(args):
    from .estimator import LatentDeformationEstimator

    params = {}
    if args.config:
        sim_keys, est_keys = split_config(parse_config_file(args.config))
        if sim_keys:
            raise ConfigError("estimate config must not contain simulation keys")
        params.update(estimator_params_from_mapping(est_keys))
    if args.depth:
        params["depth"] = args.depth
    if args.lambda_pool:
        params["lambda_pool"] = args.lambda_pool
    if args.h_aggregation:
        params["h_aggregation"] = args.h_aggregation
    params["random_state"] = args.seed if args.seed is not None else params.get("random_state", 0)

    sample = load_panel(args.data, impute=args.impute, smooth_window=args.smooth)
    est = LatentDeformationEstimator(**params).fit(sample)

    os.makedirs(args.out, exist_ok=True)
    grid = est.grid_
    save_curve_table(os.path.join(args.out, "lambda.csv"), grid, {"lambda": est.lambda_})
    save_curve_table(
        os.path.join(args.out, "gamma.csv"),
        grid,
        {f"c{j + 1}": est.gamma_[j] for j in range(est.p_)},
    )
    save_curve_table(
        os.path.join(args.out, "psi.csv"),
        grid,
        {f"c{j + 1}": est.psi_[j] for j in range(est.p_)},
    )
    save_curve_table(
        os.path.join(args.out, "h.csv"), grid, {f"i{i + 1}": est.h_[i] for i in range(est.n_)}
    )
    save_curve_table(
        os.path.join(args.out, "h_componentwise.csv"),
        grid,
        {
            f"i{i + 1}_c{j + 1}": est.h_componentwise_[i, j]
            for i in range(est.n_)
            for j in range(est.p_)
        },
    )
    save_curve_table(
        os.path.join(args.out, "xhat.csv"),
        grid,
        {
            f"i{i + 1}_c{j + 1}": est.x_hat_[i, j]
            for i in range(est.n_)
            for j in range(est.p_)
        },
    )
    manifest_cfg = dict(params)
    manifest_cfg.update(
        {"data": os.path.abspath(args.data), "impute": args.impute, "smooth": args.smooth}
    )
    _write_manifest(args.out, "estimate", manifest_cfg)
    print(
        f"fitted n={est.n_}, p={est.p_}; common amplitude from individual "
        f"{est.lambda_index_[0] + 1}, component {est.lambda_index_[1] + 1}"
    )
    return EXIT_OK


def _cmd_benchmark(args):
    from .benchmark import benchmark, write_benchmark_csv

    sim_keys, est_keys = split_config(parse_config_file(args.config))
    configs = expand_config_grid(sim_keys)
    est_params = estimator_params_from_mapping(est_keys)
    if args.dry_run:
        print(f"{len(configs)} configuration(s):")
        for cfg in configs:
            print(f"  {cfg}")
        return EXIT_OK
    rows = benchmark(configs, args.runs, est_params, jobs=args.jobs)
    write_benchmark_csv(rows, args.out)
    print(f"wrote {len(rows)} rows to {args.out}")
    for row in rows:
        print(
            f"psi={row['psi_setting']} h={row['h_setting']} warp={row['sigma_or_eps']} "
            f"sigma_D={row['sigma_D']} sigma_E={row['sigma_E']} c={row['c']} "
            f"n={row['n']} p={row['p']}  {row['metric']}: "
            f"{row['mean']:.6g} ({row['sd']:.3g})  [{row['seconds_mean']:.3f}s/fit]"
        )
    return EXIT_OK


def _cmd_whyra(args):
    from .whyra import export_whyra, whyra

    path = os.path.join(args.h_dir, "h_componentwise.csv")
    if not os.path.exists(path):
        raise DataError(f"{path}: not found")
    warps = load_panel(path).values
    result = whyra(warps, method=args.correlation)
    written = export_whyra(result, args.out, svg=not args.no_svg)
    print(f"average correlation over pairs: {result.avg_correlation:.4f}")
    if result.skipped_pairs:
        print(f"skipped {result.skipped_pairs} degenerate pair(s)")
    for w in written:
        print(f"wrote {w}")
    return EXIT_OK


_COMMANDS = {
    "simulate": _cmd_simulate,
    "estimate": _cmd_estimate,
    "benchmark": _cmd_benchmark,
    "whyra": _cmd_whyra,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (DegenerateCurveError, DomainError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
