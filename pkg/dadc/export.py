# -*- coding: utf-8 -*-
"""
DADC — Artifact export

CSV files (labels, decision graph, datasets, fusion trace, evaluation, sweep)
and SVG renderings (decision graph, cluster scatter). Output is byte-stable
for identical inputs; SVGs carry a version comment on their second line.
"""
from __future__ import annotations

import io
import logging
from html import escape
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .centers import NOISE, CriticalPoint, PointRole
from .dataset import Dataset
from .density import DensityProfile
from .ensemble import TraceRow
from .errors import ConfigError, DataError
from .evaluation import EvaluationReport, SweepRow
from .utils import detect_version

log = logging.getLogger("DADC.export")

SVG_WIDTH = 640
SVG_HEIGHT = 480
MARGIN = 48
PALETTE = (
    "#1f77b4",
    "#ff7f0e",
    "#2ca02c",
    "#d62728",
    "#9467bd",
    "#8c564b",
    "#e377c2",
    "#17becf",
    "#bcbd22",
    "#7f7f7f",
)
NOISE_COLOR = "#b0b0b0"


def _num(value: float) -> str:
    return repr(float(value))


def _write(path: Path, text: str) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8", newline="\n")
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc.strerror or exc}") from exc
    log.debug("Wrote %s (%d bytes)", path, len(text))
    return path


def _csv(header: str, rows: Iterable[Sequence[object]]) -> str:
    buf = io.StringIO()
    buf.write(header + "\n")
    for row in rows:
        buf.write(",".join(str(v) for v in row) + "\n")
    return buf.getvalue()


# ===========================================================================
# SECTION 1: CSV
# ===========================================================================


def write_labels_csv(path: Path, labels: np.ndarray) -> Path:
    return _write(path, _csv("id,cluster", ((i, int(c)) for i, c in enumerate(labels))))


def write_decision_graph_csv(path: Path, profile: DensityProfile, roles: Sequence[PointRole]) -> Path:
    rows = (
        (i, _num(profile.adaptive_density[i]), _num(profile.delta[i]), roles[i].value) for i in range(profile.n)
    )
    return _write(path, _csv("id,adaptive_density,delta,role", rows))


def write_dataset_csv(path: Path, dataset: Dataset) -> Path:
    cols = ["x", "y"] if dataset.dim == 2 else [f"x{d}" for d in range(dataset.dim)]
    labeled = dataset.labels is not None
    if labeled:
        cols.append("label")
    rows = []
    for i in range(dataset.n):
        row = [_num(v) for v in dataset.coords[i]]
        if labeled:
            row.append(str(int(dataset.labels[i])))
        rows.append(row)
    return _write(path, _csv(",".join(cols), rows))


def write_trace_csv(path: Path, trace: Sequence[TraceRow]) -> Path:
    rows = (
        (t.round, t.a, t.b, _num(t.ids), _num(t.ccd), _num(t.cds_ratio), _num(t.cfd), int(t.merged)) for t in trace
    )
    return _write(path, _csv("round,a,b,ids,ccd,cds_ratio,cfd,merged", rows))


def write_evaluation_csv(path: Path, reports: dict[str, EvaluationReport]) -> Path:
    rows = ((name, _num(r.ca), r.n_evaluated, r.clusters, r.noise) for name, r in sorted(reports.items()))
    return _write(path, _csv("algorithm,ca,n_evaluated,clusters,noise", rows))


def write_sweep_csv(path: Path, rows: Sequence[SweepRow]) -> Path:
    body = ((_num(r.level), r.algorithm, _num(r.mean_ca), _num(r.std_ca), r.seeds) for r in rows)
    return _write(path, _csv("level,algorithm,mean_ca,std_ca,seeds", body))


# ===========================================================================
# SECTION 2: SVG
# ===========================================================================


class _Canvas:
    """Maps data coordinates into the plot area (y grows upwards)."""

    def __init__(self, x_range: tuple[float, float], y_range: tuple[float, float]) -> None:
        self.x0, self.x1 = x_range
        self.y0, self.y1 = y_range
        if self.x1 <= self.x0:
            self.x1 = self.x0 + 1.0
        if self.y1 <= self.y0:
            self.y1 = self.y0 + 1.0

    def x(self, v: float) -> float:
        return round(MARGIN + (v - self.x0) / (self.x1 - self.x0) * (SVG_WIDTH - 2 * MARGIN), 3)

    def y(self, v: float) -> float:
        return round(SVG_HEIGHT - MARGIN - (v - self.y0) / (self.y1 - self.y0) * (SVG_HEIGHT - 2 * MARGIN), 3)


def _svg_open(title: str) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f"<!-- dadc {escape(detect_version())} -->",
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" '
        f'viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}">',
        f"<title>{escape(title)}</title>",
        "<style>.center{fill:#d62728}.outlier{fill:#7f7f7f}.remaining{fill:#1f77b4}"
        ".threshold{stroke:#444;stroke-dasharray:4 3}.axis{stroke:#000;fill:none}</style>",
        f'<rect x="0" y="0" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" fill="#ffffff"/>',
    ]


def _axes(canvas: _Canvas, x_label: str, y_label: str) -> list[str]:
    left, bottom = MARGIN, SVG_HEIGHT - MARGIN
    return [
        f'<path class="axis" d="M{left} {MARGIN} L{left} {bottom} L{SVG_WIDTH - MARGIN} {bottom}"/>',
        f'<text x="{SVG_WIDTH / 2}" y="{SVG_HEIGHT - 12}" text-anchor="middle">{escape(x_label)}</text>',
        f'<text x="14" y="{SVG_HEIGHT / 2}" transform="rotate(-90 14 {SVG_HEIGHT / 2})" '
        f'text-anchor="middle">{escape(y_label)}</text>',
    ]


def render_decision_graph_svg(profile: DensityProfile, roles: Sequence[PointRole], cp: CriticalPoint) -> str:
    """Role-colored circles, two dashed threshold lines, the critical point and a note on the outlier plane."""
    canvas = _Canvas((0.0, float(profile.adaptive_density.max())), (0.0, float(profile.delta.max())))
    lines = _svg_open("Decision graph")
    wedge = (
        "Outliers are tested on the domain-density plane, not on the adaptive-density axis drawn here: "
        f"domain density below {cp.density_x:.6g} and delta above the line through the origin "
        f"and ({cp.density_x:.6g}, {cp.y:.6g})."
    )
    lines.append(f"<desc>{escape(wedge)}</desc>")
    lines.append(f'<text class="legend" x="{MARGIN}" y="16" font-size="11">{escape(wedge)}</text>')
    lines += _axes(canvas, "adaptive density", "delta")
    top, bottom = MARGIN, SVG_HEIGHT - MARGIN
    lines.append(f'<line class="threshold" x1="{canvas.x(cp.x)}" y1="{top}" x2="{canvas.x(cp.x)}" y2="{bottom}"/>')
    lines.append(
        f'<line class="threshold" x1="{MARGIN}" y1="{canvas.y(cp.y)}" x2="{SVG_WIDTH - MARGIN}" y2="{canvas.y(cp.y)}"/>'
    )
    for i in range(profile.n):
        cx, cy = canvas.x(profile.adaptive_density[i]), canvas.y(profile.delta[i])
        lines.append(f'<circle class="{roles[i].value}" data-id="{i}" cx="{cx}" cy="{cy}" r="3"/>')
    px, py = canvas.x(cp.x), canvas.y(cp.y)
    lines.append(f'<rect class="critical-point" x="{px - 5}" y="{py - 5}" width="10" height="10" fill="#ff7f0e"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def render_cluster_plot_svg(dataset: Dataset, labels: np.ndarray, centers: Sequence[int] = ()) -> str:
    """Scatter of the first two coordinates colored by cluster; NOISE in grey."""
    coords = dataset.coords if dataset.dim >= 2 else np.column_stack([dataset.coords[:, 0], np.zeros(dataset.n)])
    lo, hi = coords[:, :2].min(axis=0), coords[:, :2].max(axis=0)
    # Equal scaling on both axes keeps the geometry.
    span = float(max(hi[0] - lo[0], hi[1] - lo[1], 1e-12))
    canvas = _Canvas((float(lo[0]), float(lo[0]) + span), (float(lo[1]), float(lo[1]) + span))
    lines = _svg_open(f"Clusters of {dataset.name}")
    lines += _axes(canvas, "x", "y")
    center_set = set(int(c) for c in centers)
    for i in range(dataset.n):
        label = int(labels[i])
        color = NOISE_COLOR if label == NOISE else PALETTE[label % len(PALETTE)]
        css = "noise" if label == NOISE else f"cluster-{label}"
        radius = 5 if i in center_set else 2.5
        lines.append(
            f'<circle class="{css}" cx="{canvas.x(coords[i, 0])}" cy="{canvas.y(coords[i, 1])}" '
            f'r="{radius}" fill="{color}"/>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def export_decision_graph(
    profile: DensityProfile,
    roles: Sequence[PointRole],
    cp: CriticalPoint,
    target: Path,
    mode: str = "csv",
) -> Path:
    if len(roles) != profile.n:
        raise ConfigError(f"{len(roles)} roles for {profile.n} points")
    mode = mode.strip().lower()
    if mode == "csv":
        return write_decision_graph_csv(target, profile, roles)
    if mode == "svg":
        return _write(target, render_decision_graph_svg(profile, roles, cp))
    raise ConfigError(f"invalid decision graph mode: {mode!r}. Expected csv or svg")


def write_cluster_plot(path: Path, dataset: Dataset, labels: np.ndarray, centers: Sequence[int] = ()) -> Path:
    return _write(path, render_cluster_plot_svg(dataset, labels, centers))


__all__ = [
    "write_labels_csv",
    "write_decision_graph_csv",
    "write_dataset_csv",
    "write_trace_csv",
    "write_evaluation_csv",
    "write_sweep_csv",
    "render_decision_graph_svg",
    "render_cluster_plot_svg",
    "export_decision_graph",
    "write_cluster_plot",
]
