"""Read harness CSVs and render the two figure styles.

Convergence panels show relative error versus rule exactness degree on a
log scale, with the exact-values baseline as a grey dotted curve and
degree-independent methods (the least-squares weights) as horizontal
lines.  Pointwise panels show per-test-point errors as circles and
estimates as asterisks with their means as solid/dashed lines.

No numbers are computed here beyond what the CSVs already carry.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

CONVERGENCE_COLUMNS = {"method", "degree", "relative_error"}
POINTWISE_COLUMNS = {"index", "error", "estimate", "mean_error", "mean_estimate"}

GREY_DOTTED = {"color": "0.5", "linestyle": ":", "marker": ""}
DEFAULT_BASELINES = ("lscf",)


class SchemaError(Exception):
    """A CSV is missing columns the plot needs."""


@dataclass
class FigureSpec:
    """What to read, where to render, and how each method is styled."""

    csv_paths: Sequence[str]
    out_path: str
    log_y: bool = True
    styles: dict = field(default_factory=dict)
    baselines: Sequence[str] = DEFAULT_BASELINES


def _read_rows(path) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise SchemaError(f"{path}: empty file")
        rows = list(reader)
    return rows


def _series(paths: Sequence[str]) -> dict[str, list[tuple[int, float]]]:
    series: dict[str, list[tuple[int, float]]] = {}
    for path in paths:
        rows = _read_rows(path)
        if rows and not CONVERGENCE_COLUMNS <= rows[0].keys():
            missing = CONVERGENCE_COLUMNS - rows[0].keys()
            raise SchemaError(f"{path}: missing columns {sorted(missing)}")
        for row in rows:
            if row.get("relative_error", "") == "":
                continue
            series.setdefault(row["method"], []).append(
                (int(row["degree"]), float(row["relative_error"])))
    for points in series.values():
        points.sort()
    return series


def plot_convergence(spec: FigureSpec):
    """One panel of relative error versus exactness degree.

    Returns the matplotlib figure after saving it to ``spec.out_path``.
    """
    series = _series(spec.csv_paths)
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    for method, points in series.items():
        degrees = [d for d, _ in points]
        errors = [e for _, e in points]
        style = dict(spec.styles.get(method, {}))
        if method == "exactf":
            base = dict(GREY_DOTTED)
            base.update(style)
            ax.plot(degrees, errors, label=method, **base)
        elif method in spec.baselines:
            level = errors[0]
            ax.axhline(level, label=method, **({"linestyle": "-"} | style))
        else:
            base = {"marker": "o", "linestyle": "-"}
            base.update(style)
            ax.plot(degrees, errors, label=method, **base)
    if spec.log_y:
        ax.set_yscale("log")
    ax.set_xlabel("exactness degree")
    ax.set_ylabel("relative error")
    ax.legend()
    fig.tight_layout()
    fig.savefig(spec.out_path)
    return fig


def plot_pointwise(csv_path: str, out_path: str, log_y: bool = True):
    """Circles for errors, asterisks for estimates, solid/dashed mean lines.

    Test points arrive already ordered by distance from the boundary; the
    x axis is their index.  Returns the saved figure.
    """
    rows = _read_rows(csv_path)
    if rows and not POINTWISE_COLUMNS <= rows[0].keys():
        missing = POINTWISE_COLUMNS - rows[0].keys()
        raise SchemaError(f"{csv_path}: missing columns {sorted(missing)}")
    idx = [int(r["index"]) for r in rows]
    errors = [float(r["error"]) for r in rows]
    has_estimates = all(r.get("estimate", "") != "" for r in rows) and rows
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    ax.plot(idx, errors, linestyle="", marker="o", fillstyle="none",
            label="error")
    if has_estimates:
        estimates = [float(r["estimate"]) for r in rows]
        ax.plot(idx, estimates, linestyle="", marker="*", label="estimate")
        mean_estimate = float(rows[0]["mean_estimate"])
        ax.axhline(mean_estimate, linestyle="--", label="mean estimate")
    mean_error = float(rows[0]["mean_error"]) if rows else None
    if mean_error is not None:
        ax.axhline(mean_error, linestyle="-", label="mean error")
    if log_y:
        ax.set_yscale("log")
    ax.set_xlabel("test point (ordered by distance from boundary)")
    ax.set_ylabel("pointwise error")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path)
    return fig
