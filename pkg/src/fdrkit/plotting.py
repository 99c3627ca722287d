"""Plot data for FDR results and a small static SVG renderer.

The data model is a dict with ``x_axis``, ``threshold`` and ``series``;
each series is ``{"name", "kind", "points"}`` with ``kind`` either
``"points"`` or ``"line"`` and ``points`` a list of ``[x, y]`` pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from html import escape
from typing import Optional

import numpy as np

from .report import ResultsTable

X_AXES = ("rank", "zvalues")

STYLE = {
    "raw_pvalues": {"color": "black", "marker": "dot", "label": "Raw p-values"},
    "adjusted_pvalues": {"color": "dodgerblue", "marker": "star", "label": "Adjusted p-values"},
    "fdrs": {"color": "firebrick", "marker": "dot", "label": "FDRs"},
    "rejection_line": {"color": "black", "label": "BH rejection line"},
    "threshold_line": {"color": "dodgerblue", "label": "Threshold"},
}


@dataclass(frozen=True)
class PlotSpec:
    x_axis: str = "rank"
    raw_pvalues: bool = True
    adj_pvalues: bool = True
    fdrs: bool = True
    sig_line: bool = True
    adj_sig_line: bool = True
    threshold: float = 0.05
    xlim: Optional[tuple] = None
    ylim: tuple = (0.0, 1.0)
    title: str = ""

    def __post_init__(self):
        if self.x_axis not in X_AXES:
            raise ValueError(f"x_axis must be one of {X_AXES}, got {self.x_axis!r}")
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold must lie in [0, 1], got {self.threshold}")


def _num(v):
    v = float(v)
    return v if math.isfinite(v) else None


def _pairs(x, y):
    # non-finite coordinates (z of p = 0) become null so the JSON stays strict
    return [[_num(a), _num(b)] for a, b in zip(x, y)]


def plot_data(table: ResultsTable, spec: PlotSpec = PlotSpec()) -> dict:
    """Series for raw p, adjusted p, FDRs and the two reference lines.

    On the rank axis each feature sits at its ordinal rank. On the z axis
    it sits at its z-value, and the rejection line is drawn through the
    z-values of the ranked features.
    """
    keep = ~np.isnan(table.raw_p)
    p = table.raw_p[keep]
    m = len(p)
    order = np.argsort(p, kind="stable")
    rank = np.empty(m)
    rank[order] = np.arange(1, m + 1)
    x = rank if spec.x_axis == "rank" else table.z[keep]
    gamma = spec.threshold

    series = []
    if spec.raw_pvalues:
        series.append({"name": "raw_pvalues", "kind": "points", "points": _pairs(x, p)})
    if spec.adj_pvalues:
        series.append({"name": "adjusted_pvalues", "kind": "points",
                       "points": _pairs(x, table.adjusted_p[keep])})
    if spec.fdrs:
        series.append({"name": "fdrs", "kind": "points", "points": _pairs(x, table.fdr[keep])})
    if spec.sig_line:
        i = np.arange(1, m + 1)
        line_x = i if spec.x_axis == "rank" else x[order]
        series.append({"name": "rejection_line", "kind": "line",
                       "points": _pairs(line_x, gamma * i / m)})
    if spec.adj_sig_line:
        lo, hi = spec.xlim if spec.xlim else _span(x)
        series.append({"name": "threshold_line", "kind": "line",
                       "points": [[float(lo), gamma], [float(hi), gamma]]})

    return {
        "x_axis": spec.x_axis,
        "threshold": gamma,
        "title": spec.title,
        "xlim": list(spec.xlim) if spec.xlim else None,
        "ylim": list(spec.ylim),
        "series": series,
    }


def _span(x) -> tuple:
    finite = [v for v in x if math.isfinite(v)]
    if not finite:
        return (0.0, 1.0)
    lo, hi = min(finite), max(finite)
    return (lo, hi) if hi > lo else (lo - 0.5, hi + 0.5)


def _ticks(lo: float, hi: float, n: int = 5) -> list:
    step = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(step))
    step = min((s * mag for s in (1, 2, 2.5, 5, 10) if s * mag >= step), default=step)
    start = math.ceil(lo / step) * step
    out = []
    v = start
    while v <= hi + 1e-9 * step:
        out.append(round(v, 10))
        v += step
    return out


def _star(cx: float, cy: float, r: float) -> str:
    pts = []
    for k in range(10):
        ang = math.pi / 2 + k * math.pi / 5
        rad = r if k % 2 == 0 else r * 0.45
        pts.append(f"{cx + rad * math.cos(ang):.2f},{cy - rad * math.sin(ang):.2f}")
    return " ".join(pts)


def render_svg(data: dict, width: int = 640, height: int = 440) -> str:
    """Static SVG: axes, point series, reference lines and a legend."""
    left, right, top, bottom = 60, 20, 36, 50
    pw, ph = width - left - right, height - top - bottom

    all_x = [pt[0] for s in data["series"] for pt in s["points"] if pt[0] is not None]
    if data.get("xlim"):
        x0, x1 = data["xlim"]
    else:
        x0, x1 = _span(all_x) if all_x else (0.0, 1.0)
    y0, y1 = data.get("ylim") or (0.0, 1.0)

    def sx(v):
        return left + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return top + (1.0 - (v - y0) / (y1 - y0)) * ph

    def inside(px, py):
        return x0 <= px <= x1 and y0 <= py <= y1

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<defs><clipPath id="plot"><rect x="{left}" y="{top}" width="{pw}" height="{ph}"/>'
        "</clipPath></defs>",
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>',
    ]
    for t in _ticks(x0, x1):
        out.append(f'<line x1="{sx(t):.2f}" y1="{top + ph}" x2="{sx(t):.2f}" '
                   f'y2="{top + ph + 4}" stroke="#444"/>')
        out.append(f'<text x="{sx(t):.2f}" y="{top + ph + 16}" text-anchor="middle">{t:g}</text>')
    for t in _ticks(y0, y1):
        out.append(f'<line x1="{left - 4}" y1="{sy(t):.2f}" x2="{left}" y2="{sy(t):.2f}" '
                   'stroke="#444"/>')
        out.append(f'<text x="{left - 7}" y="{sy(t) + 4:.2f}" text-anchor="end">{t:g}</text>')
    xlabel = "Rank" if data["x_axis"] == "rank" else "Z-value"
    out.append(f'<text x="{left + pw / 2}" y="{height - 12}" text-anchor="middle">{xlabel}</text>')
    out.append(f'<text transform="translate(16,{top + ph / 2}) rotate(-90)" '
               'text-anchor="middle">Value</text>')
    if data.get("title"):
        out.append(f'<text x="{width / 2}" y="20" text-anchor="middle" font-size="14">'
                   f'{escape(data["title"])}</text>')

    out.append('<g clip-path="url(#plot)">')
    for s in data["series"]:
        style = STYLE.get(s["name"], {"color": "gray", "marker": "dot"})
        pts = [(x, y) for x, y in s["points"] if x is not None and y is not None]
        if s["kind"] == "line":
            coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
            out.append(f'<polyline points="{coords}" fill="none" stroke="{style["color"]}" '
                       'stroke-width="1.5"/>')
            continue
        for x, y in pts:
            if not inside(x, y):
                continue
            if style.get("marker") == "star":
                out.append(f'<polygon points="{_star(sx(x), sy(y), 5)}" fill="{style["color"]}"/>')
            else:
                out.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="3" '
                           f'fill="{style["color"]}"/>')
    out.append("</g>")

    ly = top + 14
    for s in data["series"]:
        style = STYLE.get(s["name"], {"color": "gray", "label": s["name"]})
        lx = left + 10
        if s["kind"] == "line":
            out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 16}" y2="{ly - 4}" '
                       f'stroke="{style["color"]}" stroke-width="1.5"/>')
        else:
            out.append(f'<circle cx="{lx + 8}" cy="{ly - 4}" r="3" fill="{style["color"]}"/>')
        out.append(f'<text x="{lx + 22}" y="{ly}">{escape(style["label"])}</text>')
        ly += 15
    out.append("</svg>")
    return "\n".join(out) + "\n"
