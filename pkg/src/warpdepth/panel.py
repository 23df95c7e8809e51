"""CSV ingestion and emission for curve panels, plus flat config files.

A panel file is a wide CSV: the first column is time (strictly increasing)
and every remaining column holds one (individual, component) curve, named
``i<idx>_c<idx>`` with 1-based indices forming a complete rectangle. Cells
may be empty, in which case loading can impute them linearly.

Floats are written with ``repr`` (shortest round-trip form, so files reload
bitwise-equal) unless the ``WARPDEPTH_PRECISION`` environment variable sets
an explicit number of significant digits.
"""

from __future__ import annotations

import csv
import itertools
import os
import re

import numpy as np

from .curves import Grid, MultiSample, impute_linear, moving_average_values
from .errors import ConfigError, DataError

__all__ = [
    "load_panel",
    "save_panel",
    "save_curve_table",
    "load_curve_table",
    "parse_config_file",
    "sim_config_from_mapping",
    "expand_config_grid",
    "estimator_params_from_mapping",
]

_CELL_RE = re.compile(r"^i(\d+)_c(\d+)$")

PRECISION_ENV = "WARPDEPTH_PRECISION"


def _fmt(x):
    digits = os.environ.get(PRECISION_ENV)
    if digits:
        return f"%.{int(digits)}g" % x
    return repr(float(x))


def save_panel(sample, path):
    """Write a :class:`MultiSample` as a wide panel CSV."""
    n, p = sample.n, sample.p
    header = ["time"] + [f"i{i + 1}_c{j + 1}" for i in range(n) for j in range(p)]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for k, t in enumerate(sample.grid.t):
            row = [_fmt(t)]
            row += [_fmt(sample.values[i, j, k]) for i in range(n) for j in range(p)]
            writer.writerow(row)


def load_panel(path, impute=False, smooth_window=1):
    """Read a panel CSV into a :class:`MultiSample`.

    Imputation (when requested) runs before smoothing. Structural problems
    raise :class:`DataError` with the offending row or column named.
    """
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise DataError(f"{path}: empty file") from None
            rows = list(reader)
    except OSError as exc:
        raise DataError(f"{path}: {exc.strerror or exc}") from None
    if len(header) < 2:
        raise DataError(f"{path}: need a time column and at least one curve column")

    cells = {}
    for col, name in enumerate(header[1:], start=1):
        m = _CELL_RE.match(name.strip())
        if not m:
            raise DataError(f"{path}: column {col + 1} has unparseable header {name!r}")
        key = (int(m.group(1)), int(m.group(2)))
        if key in cells:
            raise DataError(f"{path}: duplicate column for individual/component {key}")
        cells[key] = col
    n = max(i for i, _ in cells)
    p = max(j for _, j in cells)
    expected = set(itertools.product(range(1, n + 1), range(1, p + 1)))
    missing = expected - set(cells)
    if missing:
        i, j = sorted(missing)[0]
        raise DataError(f"{path}: incomplete rectangle, missing column i{i}_c{j}")

    m_rows = len(rows)
    times = np.empty(m_rows)
    data = np.empty((n, p, m_rows))
    for k, row in enumerate(rows):
        if len(row) != len(header):
            raise DataError(f"{path}: row {k + 2} has {len(row)} fields, expected {len(header)}")
        try:
            times[k] = float(row[0])
        except ValueError:
            raise DataError(f"{path}: row {k + 2} has unparseable time {row[0]!r}") from None
        for (i, j), col in cells.items():
            cell = row[col].strip()
            if cell == "" or cell.lower() == "nan":
                data[i - 1, j - 1, k] = np.nan
                continue
            try:
                data[i - 1, j - 1, k] = float(cell)
            except ValueError:
                raise DataError(
                    f"{path}: row {k + 2}, column {header[col]!r} has unparseable cell {cell!r}"
                ) from None
    if np.any(np.diff(times) <= 0):
        k = int(np.flatnonzero(np.diff(times) <= 0)[0])
        raise DataError(f"{path}: time column not strictly increasing at row {k + 3}")

    if impute:
        for i in range(n):
            for j in range(p):
                try:
                    data[i, j] = impute_linear(data[i, j], times)
                except DataError as exc:
                    raise DataError(f"{path}: column i{i + 1}_c{j + 1}: {exc}") from None
    elif np.isnan(data).any():
        raise DataError(f"{path}: panel has missing cells; pass impute to fill them")

    if smooth_window != 1:
        data = moving_average_values(data, smooth_window)
    return MultiSample(Grid(times), data)


def save_curve_table(path, grid, columns):
    """Write named curves sharing one grid as a wide CSV (time first)."""
    names = list(columns)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["time"] + names)
        for k, t in enumerate(grid.t):
            writer.writerow([_fmt(t)] + [_fmt(columns[name][k]) for name in names])


def load_curve_table(path):
    """Read a wide curve CSV back into ``(times, {name: values})``."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = list(reader)
    times = np.array([float(r[0]) for r in rows])
    columns = {
        name: np.array([float(r[c]) for r in rows])
        for c, name in enumerate(header)
        if c > 0
    }
    return times, columns


# ---------------------------------------------------------------------------
# Flat key-value configuration files
# ---------------------------------------------------------------------------


def _parse_scalar(text):
    text = text.strip()
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def parse_config_file(path):
    """Parse ``key = value`` lines; '#' starts a comment, commas make lists."""
    out = {}
    try:
        fh = open(path)
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror or exc}") from None
    with fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = line.partition("=")
            key = key.strip()
            if not key:
                raise ConfigError(f"{path}:{lineno}: empty key")
            if "," in value:
                out[key] = [_parse_scalar(v) for v in value.split(",")]
            else:
                out[key] = _parse_scalar(value)
    return out


_SIM_ALIASES = {"k": "intervals", "c": "contamination"}
_SIM_FIELDS = (
    "n",
    "p",
    "intervals",
    "psi_setting",
    "h_setting",
    "sigma_w",
    "eps_w",
    "sigma_d",
    "sigma_e",
    "contamination",
    "iterations",
    "eps_w_psi",
    "seed",
)
_EST_FIELDS = (
    "depth",
    "qid_fraction",
    "qid_univariate",
    "monotonize",
    "lambda_pool",
    "h_aggregation",
    "trim_fraction",
    "smoothing_window",
    "flat_eps",
    "random_state",
)


def split_config(mapping):
    """Split a flat mapping into simulation and estimator key groups."""
    sim, est = {}, {}
    for key, value in mapping.items():
        canonical = _SIM_ALIASES.get(key.lower(), key.lower())
        if canonical in _SIM_FIELDS:
            sim[canonical] = value
        elif canonical in _EST_FIELDS:
            est[canonical] = value
        else:
            raise ConfigError(f"unknown configuration key {key!r}")
    return sim, est


def sim_config_from_mapping(sim):
    from .simulation import SimConfig

    lists = {k: v for k, v in sim.items() if isinstance(v, list)}
    if lists:
        raise ConfigError(
            f"list values ({', '.join(lists)}) are only allowed in benchmark grids"
        )
    return SimConfig(**sim)


def expand_config_grid(sim):
    """Cartesian product of list-valued simulation fields, in field order."""
    from .simulation import SimConfig

    grid_keys = [k for k in _SIM_FIELDS if isinstance(sim.get(k), list)]
    fixed = {k: v for k, v in sim.items() if k not in grid_keys}
    if not grid_keys:
        return [SimConfig(**fixed)]
    combos = itertools.product(*(sim[k] for k in grid_keys))
    return [SimConfig(**fixed, **dict(zip(grid_keys, combo))) for combo in combos]


def estimator_params_from_mapping(est):
    for key, value in est.items():
        if isinstance(value, list):
            raise ConfigError(f"estimator key {key!r} cannot be a grid")
    return dict(est)
