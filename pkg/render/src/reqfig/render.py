"""Turn sweep CSVs into figures: profiles, gate panels, deviation heatmaps.

This package reads only the documented CSV schemas; it never runs a
simulation.  Headers must match a kind's schema exactly, so a file fed
to the wrong plot kind fails fast instead of rendering nonsense.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["PlotJob", "SchemaError", "load_table", "render", "main"]

KIND_PROFILE = "profile"
KIND_PANELS = "cnot-panels"
KIND_HEATMAP = "heatmap"

PROFILE_COLUMNS = ("detuning_mhz", "p_excited")
PANEL_COLUMNS = (
    "detuning_mhz",
    "p00",
    "p01",
    "p10",
    "p11",
    "leak_e",
    "phase01_deg",
    "phase10_deg",
    "phase11_deg",
)
HEATMAP_COLUMNS = ("dc_mhz", "dt_mhz") + PANEL_COLUMNS[1:]

_SCHEMAS = {
    KIND_PROFILE: PROFILE_COLUMNS,
    KIND_PANELS: PANEL_COLUMNS,
    KIND_HEATMAP: HEATMAP_COLUMNS,
}

POPULATION_LABELS = ("p00", "p01", "p10", "p11")

CHANNEL_EDGE_MHZ = 0.5
HOLE_EDGE_MHZ = 5.0


class SchemaError(Exception):
    """CSV header or contents do not match the declared kind."""


@dataclass(frozen=True)
class PlotJob:
    """One rendering request."""

    input_csv: str
    kind: str
    output: str
    x_range: tuple[float, float] | None = None
    annotations: bool = True

    def __post_init__(self) -> None:
        if self.kind not in _SCHEMAS:
            raise ValueError(f"kind must be one of {', '.join(_SCHEMAS)}; got {self.kind!r}")


def load_table(path: str, kind: str) -> dict[str, np.ndarray]:
    """Read a CSV whose header matches the kind's schema exactly."""
    expected = _SCHEMAS[kind]
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = tuple(next(reader))
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        if header != expected:
            raise SchemaError(
                f"{path}: header {','.join(header)} does not match the "
                f"{kind} schema {','.join(expected)}"
            )
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(expected):
                raise SchemaError(f"{path}:{lineno}: expected {len(expected)} fields")
            try:
                rows.append([float(v) for v in row])
            except ValueError as exc:
                raise SchemaError(f"{path}:{lineno}: {exc}") from None
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    data = np.array(rows)
    return {name: data[:, i] for i, name in enumerate(expected)}


def _guides(ax, table_x: np.ndarray) -> None:
    lo, hi = float(np.min(table_x)), float(np.max(table_x))
    for edge in (CHANNEL_EDGE_MHZ, HOLE_EDGE_MHZ):
        for x in (-edge, edge):
            if lo <= x <= hi:
                ax.axvline(x, linestyle=":", color="gray", linewidth=0.8)


def _render_profile(job: PlotJob, table: dict[str, np.ndarray]) -> plt.Figure:
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(table["detuning_mhz"], table["p_excited"], color="tab:blue")
    if job.annotations:
        _guides(ax, table["detuning_mhz"])
    ax.set_xlabel("detuning (MHz)")
    ax.set_ylabel("excited-state population")
    ax.set_ylim(-0.02, 1.02)
    if job.x_range:
        ax.set_xlim(*job.x_range)
    return fig


def _render_panels(job: PlotJob, table: dict[str, np.ndarray]) -> plt.Figure:
    fig, axes = plt.subplots(2, 2, figsize=(8.0, 6.0), sharex=True)
    x = table["detuning_mhz"]
    for ax, label in zip(axes.flat, POPULATION_LABELS):
        ax.plot(x, table[label], color="tab:blue")
        if job.annotations:
            _guides(ax, x)
        ax.set_title(f"|{label[1:]}>")
        ax.set_ylim(-0.02, 1.02)
        if job.x_range:
            ax.set_xlim(*job.x_range)
    for ax in axes[1]:
        ax.set_xlabel("detuning (MHz)")
    for ax in axes[:, 0]:
        ax.set_ylabel("population")
    fig.tight_layout()
    return fig


def _square_grid(table: dict[str, np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    dc = np.unique(table["dc_mhz"])
    dt = np.unique(table["dt_mhz"])
    if dc.size * dt.size != table["dc_mhz"].size:
        raise SchemaError("heatmap rows do not form a complete (dc, dt) grid")
    return dc, dt


def _render_heatmap(job: PlotJob, table: dict[str, np.ndarray]) -> plt.Figure:
    dc, dt = _square_grid(table)
    # Rows are sorted by (dc, dt); reshape to dc-major.
    order = np.lexsort((table["dt_mhz"], table["dc_mhz"]))
    center = np.argmin(np.abs(table["dc_mhz"])[order] + np.abs(table["dt_mhz"])[order])
    fig, axes = plt.subplots(2, 2, figsize=(9.0, 7.5))
    extent = (dt[0], dt[-1], dc[0], dc[-1])
    for ax, label in zip(axes.flat, POPULATION_LABELS):
        values = table[label][order]
        grid = values.reshape(dc.size, dt.size)
        # Symmetric scale about the grid-center value, so small and large
        # deviations stay visually comparable across panels.
        ideal = values[center]
        span = max(float(np.max(np.abs(grid - ideal))), 1e-12)
        im = ax.imshow(
            grid,
            origin="lower",
            extent=extent,
            aspect="auto",
            cmap="RdBu_r",
            vmin=ideal - span,
            vmax=ideal + span,
        )
        ax.set_title(f"|{label[1:]}>")
        ax.set_xlabel("target detuning (MHz)")
        ax.set_ylabel("control detuning (MHz)")
        fig.colorbar(im, ax=ax, shrink=0.85)
    fig.tight_layout()
    return fig


_RENDERERS = {
    KIND_PROFILE: _render_profile,
    KIND_PANELS: _render_panels,
    KIND_HEATMAP: _render_heatmap,
}


def render(job: PlotJob) -> None:
    """Render one job to its output image."""
    table = load_table(job.input_csv, job.kind)
    fig = _RENDERERS[job.kind](job, table)
    try:
        fig.savefig(job.output, dpi=150)
    finally:
        plt.close(fig)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="reqfig", description="Render sweep CSVs as figures."
    )
    parser.add_argument("--in", dest="input_csv", required=True, help="input CSV path")
    parser.add_argument("--kind", required=True, choices=sorted(_RENDERERS))
    parser.add_argument("--out", dest="output", required=True, help="output image path")
    parser.add_argument("--x-range", type=float, nargs=2, metavar=("LO", "HI"))
    parser.add_argument("--no-annotations", action="store_true")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    job = PlotJob(
        input_csv=args.input_csv,
        kind=args.kind,
        output=args.output,
        x_range=tuple(args.x_range) if args.x_range else None,
        annotations=not args.no_annotations,
    )
    try:
        render(job)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
