"""Render the six experiment figures from their CSVs.

Each figure is a pure function of its input CSV: the file is parsed
(ignoring ``#`` config comments), grouped into labelled data series, and
drawn as a fixed-size two-panel PNG.

Figure ids
----------
1  mean-mismatch sweep   (normalized ESS curves | ESS-hat/ESS ratio)
2  variance-mismatch sweep (same panels, sigma_q on the x axis)
3  rare-event sweep      (estimator variance | relative root MSE), stacked
4  MIS scenario 1        (per-scheme normalized ESS curves | ratio)
5  MIS scenario 2
6  MIS scenario 3
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

FIGURE_IDS = (1, 2, 3, 4, 5, 6)

#: columns each figure needs from its CSV
REQUIRED_COLUMNS = {
    1: ("n", "mu_q", "ess_over_n", "ess_hat_over_n", "ratio_hat_to_true"),
    2: ("n", "sigma_q", "ess_over_n", "ess_hat_over_n", "ratio_hat_to_true"),
    3: ("n", "alpha", "var_snis", "var_analytic", "rrmse"),
    4: ("scheme", "n", "ess_over_n", "ess_hat_over_n", "ratio_hat_to_true"),
    5: ("scheme", "n", "ess_over_n", "ess_hat_over_n", "ratio_hat_to_true"),
    6: ("scheme", "n", "ess_over_n", "ess_hat_over_n", "ratio_hat_to_true"),
}

TITLES = {
    1: "Proposal mean mismatch",
    2: "Proposal variance mismatch",
    3: "Rare-event estimation, perfect proposal",
    4: "MIS scenario 1 (no mismatch)",
    5: "MIS scenario 2 (mild mismatch)",
    6: "MIS scenario 3 (large mismatch)",
}

FIGSIZE = (10.0, 4.0)
FIGSIZE_STACKED = (6.5, 6.0)
DPI = 150


class SchemaError(ValueError):
    """The input CSV lacks a column the figure needs."""

    def __init__(self, column: str, path):
        super().__init__(f"missing column {column!r} in {path}")
        self.column = column


@dataclass(frozen=True)
class FigureSpec:
    """One rendering job: which figure, from which CSV, to which image."""

    figure_id: int
    input_csv: str | Path
    output_png: str | Path
    title: str | None = None

    def __post_init__(self) -> None:
        if self.figure_id not in FIGURE_IDS:
            raise ValueError(f"figure id must be in {FIGURE_IDS}, got {self.figure_id}")


def load_table(spec: FigureSpec) -> pd.DataFrame:
    """Read the CSV (skipping '#' comments) and check the figure's schema."""
    table = pd.read_csv(spec.input_csv, comment="#")
    for column in REQUIRED_COLUMNS[spec.figure_id]:
        if column not in table.columns:
            raise SchemaError(column, spec.input_csv)
    return table


def figure_payload(spec: FigureSpec) -> dict:
    """The labelled data series the figure will draw, as plain arrays.

    Rendering is a pure function of the CSV; this is the testable core.
    Keys: ``x_label`` plus ``left``/``right`` lists of
    (label, x, y, linestyle) tuples.
    """
    table = load_table(spec)
    fid = spec.figure_id
    if fid in (1, 2):
        x_col = "mu_q" if fid == 1 else "sigma_q"
        groups = [(f"N={int(n)}", sub) for n, sub in table.groupby("n")]
    elif fid == 3:
        x_col = "alpha"
        groups = [(f"N={int(n)}", sub) for n, sub in table.groupby("n")]
    else:
        x_col = "n"
        groups = [(str(s), sub) for s, sub in table.groupby("scheme")]

    left, right = [], []
    for label, sub in groups:
        sub = sub.sort_values(x_col)
        x = sub[x_col].to_numpy()
        if fid == 3:
            left.append((f"{label} replicated", x, sub["var_snis"].to_numpy(), "-"))
            left.append((f"{label} analytic", x, sub["var_analytic"].to_numpy(), "--"))
            right.append((label, x, sub["rrmse"].to_numpy(), "-"))
        else:
            left.append((f"{label} ESS/N", x, sub["ess_over_n"].to_numpy(), "-"))
            left.append((f"{label} ESS-hat/N", x, sub["ess_hat_over_n"].to_numpy(), "--"))
            right.append((label, x, sub["ratio_hat_to_true"].to_numpy(), "-"))
    return {"x_label": x_col, "left": left, "right": right}


def render(spec: FigureSpec) -> Path:
    """Draw the figure and write it as a PNG; returns the output path."""
    payload = figure_payload(spec)
    fid = spec.figure_id
    stacked = fid == 3
    fig, (ax_left, ax_right) = plt.subplots(
        2 if stacked else 1, 1 if stacked else 2,
        figsize=FIGSIZE_STACKED if stacked else FIGSIZE,
    )

    for label, x, y, style in payload["left"]:
        ax_left.plot(x, y, style, label=label)
    for label, x, y, style in payload["right"]:
        ax_right.plot(x, y, style, label=label)

    if stacked:
        ax_left.set_ylabel("estimator variance")
        ax_left.set_yscale("log")
        ax_right.set_ylabel("RRMSE")
        ax_right.set_yscale("log")
    else:
        ax_left.set_ylabel("normalized ESS")
        ax_right.set_ylabel("ESS-hat / ESS")
        ax_right.axhline(1.0, color="black", linewidth=0.8)
        if fid >= 4:
            ax_left.set_xscale("log", base=2)
            ax_right.set_xscale("log", base=2)

    for ax in (ax_left, ax_right):
        ax.set_xlabel(payload["x_label"])
        ax.legend(fontsize=8)
    fig.suptitle(spec.title or TITLES[fid])
    fig.tight_layout()

    out = Path(spec.output_png)
    fig.savefig(out, dpi=DPI)
    plt.close(fig)
    return out
