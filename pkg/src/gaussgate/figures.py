"""Figure reproduction: CSV series plus a minimal dependency-free SVG renderer.

Parameter grids are artifact choices (the source plots do not publish their
exact sampling); they are versioned here and echoed into a sidecar metadata
file next to each CSV so downstream consumers can tell data from convention.
CSV files are byte-stable across runs: fixed grids, fixed '%.12g' formatting,
no timestamps.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import IoError, OutOfRange
from . import metrics_bounds as mb
from . import ecd_sdp as es

GRID_VERSION = 1

FIGURE_GRIDS = {
    2: {
        "x": ("eta", [round(0.01 * k, 2) for k in range(0, 101)]),
        "series": [("E=%g" % E, E) for E in (0.5, 1.0, 2.0, 5.0, 10.0)],
    },
    3: {
        "x": ("eta", [round(0.9 + 0.001 * k, 3) for k in range(0, 101)]),
        "series": [("E=%g" % E, E) for E in (0.5, 1.0, 2.0, 5.0, 10.0)],
    },
    4: {
        "x": ("sigma", [round(0.005 * k, 3) for k in range(1, 101)]),
        "series": [("E=%g" % E, E) for E in (0.06, 0.2)],
        "theta": np.pi / 4.0,
    },
    5: {
        "x": ("eta", [round(0.05 * k, 2) for k in range(1, 20)]),
        "series": ["d1", "d2", "f"],
        "E": 0.06,
        "M": 6,
    },
    6: {
        "x": ("r_E", [round(0.05 * k, 2) for k in range(0, 101)]),
        "series": [("N=%g" % N, N) for N in (0.06, 0.2, 1.0, 2.0)],
        "r": 0.46,
    },
    7: {
        "x": ("r_E", [round(2.5 + 0.02 * k, 2) for k in range(0, 101)]),
        "series": [("N=%g" % N, N) for N in (0.06, 0.2, 1.0, 2.0)],
        "r": 0.46,
    },
    8: {
        "x": ("r_B", [round(0.05 * k, 2) for k in range(0, 101)]),
        "series": [("N=%g" % N, N) for N in (0.06, 0.2, 1.0, 2.0)],
        "rA": mb.R_15_DB,
        "R": mb.R_UNIT_GAIN,
    },
}

FIGURE_IDS = tuple(sorted(FIGURE_GRIDS))


def _max_workers() -> int:
    raw = os.environ.get("GAUSSGATE_THREADS", "")
    try:
        cap = int(raw)
    except ValueError:
        cap = 0
    return max(1, cap) if cap > 0 else min(4, os.cpu_count() or 1)


def figure_rows(fig_id: int):
    """All (x_value, series_label, value) rows of one figure, in output order."""
    if fig_id not in FIGURE_GRIDS:
        raise OutOfRange(f"unknown figure id {fig_id}; know {sorted(FIGURE_GRIDS)}")
    grid = FIGURE_GRIDS[fig_id]
    xs = grid["x"][1]

    def series_values(label_and_param):
        if fig_id in (2, 3):
            label, E = label_and_param
            return label, [mb.f_sine(x, E) for x in xs]
        if fig_id == 4:
            label, E = label_and_param
            return label, [mb.g_angle_bound(grid["theta"], s, E) for s in xs]
        if fig_id == 5:
            label = label_and_param
            if label == "d1":
                return label, [mb.d1(x, grid["E"]) for x in xs]
            if label == "d2":
                return label, [es.d2_displacement(x, grid["E"], grid["M"]) for x in xs]
            return label, [mb.f_sine(x, grid["E"]) for x in xs]
        if fig_id in (6, 7):
            label, N = label_and_param
            return label, [mb.squeezer_tms_sine(grid["r"], x, N) for x in xs]
        label, N = label_and_param
        return label, [mb.sum_sine(x, N, grid["rA"], grid["R"]) for x in xs]

    with ThreadPoolExecutor(max_workers=_max_workers()) as pool:
        results = list(pool.map(series_values, grid["series"]))

    rows = []
    for label, values in results:
        rows.extend((x, label, v) for x, v in zip(xs, values))
    return rows


def figure_metadata(fig_id: int) -> dict:
    grid = FIGURE_GRIDS[fig_id]
    series = [s if isinstance(s, str) else s[0] for s in grid["series"]]
    fixed = {
        k: (float(v) if isinstance(v, (int, float, np.floating)) else v)
        for k, v in grid.items()
        if k not in ("x", "series")
    }
    return {
        "figure": fig_id,
        "grid_version": GRID_VERSION,
        "x_parameter": grid["x"][0],
        "x_count": len(grid["x"][1]),
        "series": series,
        "fixed_parameters": fixed,
        "note": "parameter grids are artifact conventions, not source data",
    }


def _fmt(x) -> str:
    return "%.12g" % float(x)


def write_csv(rows, x_name: str, path: str):
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("parameter,series,value\n")
            for x, label, v in rows:
                fh.write(f"{_fmt(x)},{label},{_fmt(v)}\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def write_svg(rows, x_name: str, path: str, title: str):
    """Polyline rendering of the CSV rows, one colored path per series."""
    width, height, pad = 640, 440, 56
    by_series = {}
    for x, label, v in rows:
        by_series.setdefault(label, []).append((float(x), float(v)))
    xs = [p[0] for pts in by_series.values() for p in pts]
    ys = [p[1] for pts in by_series.values() for p in pts]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0

    def sx(x):
        return pad + (x - x0) / (x1 - x0) * (width - 2 * pad)

    def sy(y):
        return height - pad - (y - y0) / (y1 - y0) * (height - 2 * pad)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width // 2}" y="24" text-anchor="middle" font-size="15" '
        f'font-family="sans-serif">{title}</text>',
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" '
        'stroke="black" stroke-width="1"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" '
        'stroke="black" stroke-width="1"/>',
        f'<text x="{pad}" y="{height - pad + 18}" font-size="11" '
        f'font-family="sans-serif">{_fmt(x0)}</text>',
        f'<text x="{width - pad}" y="{height - pad + 18}" text-anchor="end" '
        f'font-size="11" font-family="sans-serif">{_fmt(x1)}</text>',
        f'<text x="{pad - 4}" y="{height - pad}" text-anchor="end" font-size="11" '
        f'font-family="sans-serif">{_fmt(y0)}</text>',
        f'<text x="{pad - 4}" y="{pad + 4}" text-anchor="end" font-size="11" '
        f'font-family="sans-serif">{_fmt(y1)}</text>',
        f'<text x="{width // 2}" y="{height - 12}" text-anchor="middle" '
        f'font-size="12" font-family="sans-serif">{x_name}</text>',
    ]
    for k, (label, pts) in enumerate(sorted(by_series.items())):
        color = _PALETTE[k % len(_PALETTE)]
        coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
        parts.append(
            f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
        ly = pad + 16 * k + 8
        parts.append(
            f'<line x1="{width - pad - 120}" y1="{ly}" x2="{width - pad - 96}" '
            f'y2="{ly}" stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{width - pad - 90}" y="{ly + 4}" font-size="12" '
            f'font-family="sans-serif">{label}</text>'
        )
    parts.append("</svg>")
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(parts) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def cmd_figure(fig_id: int, out_dir: str):
    """Write fig<id>.csv, fig<id>.svg and fig<id>.meta.json; returns the paths."""
    if fig_id not in FIGURE_GRIDS:
        raise OutOfRange(f"unknown figure id {fig_id}; know {sorted(FIGURE_GRIDS)}")
    os.makedirs(out_dir, exist_ok=True)
    grid = FIGURE_GRIDS[fig_id]
    rows = figure_rows(fig_id)
    csv_path = os.path.join(out_dir, f"fig{fig_id}.csv")
    svg_path = os.path.join(out_dir, f"fig{fig_id}.svg")
    meta_path = os.path.join(out_dir, f"fig{fig_id}.meta.json")
    write_csv(rows, grid["x"][0], csv_path)
    write_svg(rows, grid["x"][0], svg_path, f"figure {fig_id}")
    try:
        with open(meta_path, "w", encoding="utf-8") as fh:
            json.dump(figure_metadata(fig_id), fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise IoError(f"cannot write {meta_path}: {exc}") from exc
    return [csv_path, svg_path, meta_path]
