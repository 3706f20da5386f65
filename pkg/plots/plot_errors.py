"""Render error-decay figures from simulation CSV logs.

Reads the simulator's CSV format (t plus named columns such as err_R,
err_W, defect) and draws the selected columns against time, log-scale by
default so exponential decay reads as a line. Batch use only:

    python plot_errors.py run.csv --output run.png
    python plot_errors.py run.csv --columns err_R,err_W,defect --yscale linear
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


@dataclass
class FigureSpec:
    csv_path: str
    columns: list[str] = field(default_factory=lambda: ["err_R", "err_W"])
    yscale: str = "log"
    title: str = ""
    output: str = "errors.png"


class PlotDataError(ValueError):
    """CSV is missing a requested column or has no data rows."""


def load_csv(path: str) -> tuple[list[str], np.ndarray]:
    """Read the simulator CSV; returns (column names, rows)."""
    with open(path) as handle:
        header = handle.readline().strip()
        has_rows = bool(handle.readline().strip())
    names = header.split(",")
    if not has_rows:
        raise PlotDataError(f"{path}: no data rows")
    data = np.genfromtxt(path, delimiter=",", skip_header=1)
    if data.ndim == 1:
        data = data.reshape(1, -1)
    return names, data


def render_figure(spec: FigureSpec):
    """Build the figure; raw values are plotted with no resampling."""
    names, data = load_csv(spec.csv_path)
    if "t" not in names:
        raise PlotDataError(f"{spec.csv_path}: missing column 't'")
    for column in spec.columns:
        if column not in names:
            raise PlotDataError(f"{spec.csv_path}: missing column '{column}'")
    t = data[:, names.index("t")]
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for column in spec.columns:
        ax.plot(t, data[:, names.index(column)], label=column, linewidth=1.2)
    ax.set_yscale(spec.yscale)
    ax.set_xlabel("t [s]")
    ax.set_ylabel("error magnitude")
    if spec.title:
        ax.set_title(spec.title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    return fig


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("csv", help="simulation CSV log")
    parser.add_argument(
        "--columns",
        default="err_R,err_W",
        help="comma-separated column names to plot (default err_R,err_W)",
    )
    parser.add_argument("--yscale", choices=("log", "linear"), default="log")
    parser.add_argument("--title", default="")
    parser.add_argument("--output", default="errors.png", help="PNG path to write")
    args = parser.parse_args(argv)
    spec = FigureSpec(
        csv_path=args.csv,
        columns=[c.strip() for c in args.columns.split(",") if c.strip()],
        yscale=args.yscale,
        title=args.title,
        output=args.output,
    )
    try:
        fig = render_figure(spec)
    except (PlotDataError, OSError) as exc:
        print(exc, file=sys.stderr)
        return 2
    fig.savefig(spec.output, dpi=120)
    plt.close(fig)
    print(f"wrote {spec.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
