"""Error-bar line plots from sweep result CSVs.

Each figure shows sum SE (or another y column) versus the sweep value, with
one series per (private_scheme, common_scheme) pair and +-1 standard error
bars.  The input CSV is never modified.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


class SchemaError(Exception):
    """A referenced column is missing from the CSV header."""


class NoDataError(Exception):
    """The CSV parsed but contains no data rows."""


@dataclass(frozen=True)
class FigureSpec:
    csv_path: str
    x_column: str
    out_path: str
    y_column: str = "sum_se"
    err_column: str = "stderr"
    series_columns: tuple = ("private_scheme", "common_scheme")
    x_label: str = ""
    y_label: str = "Sum SE (bit/s/Hz)"
    title: str = ""
    extra_series_columns: tuple = field(default=())


def load_rows(csv_path):
    """Read the CSV into (header, list of dict rows); empty body is an error."""
    with open(csv_path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        rows = list(reader)
    if not rows:
        raise NoDataError("no data rows")
    return header, rows


def _require_columns(header, columns):
    for col in columns:
        if col not in header:
            raise SchemaError(f"missing column {col!r}")


def _as_x(raw):
    """Numeric x where possible; 'mode:value' velocity labels use the value."""
    try:
        return float(raw)
    except ValueError:
        pass
    _, _, tail = raw.partition(":")
    try:
        return float(tail)
    except ValueError:
        return raw


def render(spec: FigureSpec):
    """Write the figure for `spec`; returns the series labels drawn."""
    header, rows = load_rows(spec.csv_path)
    group_cols = tuple(spec.series_columns) + tuple(spec.extra_series_columns)
    _require_columns(header, (spec.x_column, spec.y_column, spec.err_column) + group_cols)

    series = {}
    for row in rows:
        if row.get("error"):
            continue  # failed sweep points carry no y value
        key = ":".join(row[c] for c in group_cols)
        series.setdefault(key, []).append(
            (_as_x(row[spec.x_column]), float(row[spec.y_column]), float(row[spec.err_column]))
        )
    if not series:
        raise NoDataError("no data rows")

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for label in sorted(series):
        pts = sorted(series[label])
        x = [p[0] for p in pts]
        y = [p[1] for p in pts]
        err = [p[2] for p in pts]
        ax.errorbar(x, y, yerr=err, marker="o", capsize=3, label=label)
    ax.set_xlabel(spec.x_label or spec.x_column)
    ax.set_ylabel(spec.y_label)
    if spec.title:
        ax.set_title(spec.title)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(spec.out_path, dpi=150)
    plt.close(fig)
    return sorted(series)


def run_script(argv, default_x="sweep_value", x_label="", title=""):
    """Shared argparse front end for the per-sweep scripts; returns exit code."""
    import argparse

    ap = argparse.ArgumentParser()
    ap.add_argument("--in", dest="csv_in", required=True, help="sweep CSV path")
    ap.add_argument("--out", required=True, help="output image path")
    ap.add_argument("--x", default=default_x, help="x column name")
    ap.add_argument("--y", default="sum_se", help="y column name")
    ap.add_argument("--err", default="stderr", help="error-bar column name")
    ap.add_argument("--xlabel", default=x_label)
    ap.add_argument("--ylabel", default="Sum SE (bit/s/Hz)")
    ap.add_argument("--title", default=title)
    args = ap.parse_args(argv)
    spec = FigureSpec(
        csv_path=args.csv_in,
        x_column=args.x,
        out_path=args.out,
        y_column=args.y,
        err_column=args.err,
        x_label=args.xlabel,
        y_label=args.ylabel,
        title=args.title,
    )
    try:
        labels = render(spec)
    except SchemaError as exc:
        print(f"schema error: {exc}")
        return 2
    except NoDataError as exc:
        print(str(exc))
        return 1
    print(f"wrote {args.out} with {len(labels)} series")
    return 0
