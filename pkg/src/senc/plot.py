"""Minimal static SVG line charts (MSE against p, one polyline per model)."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 640, 400
MARGIN = dict(left=70, right=130, top=40, bottom=50)
PALETTE = {"bec": "#1f77b4", "fmc": "#ff7f0e", "lnp": "#2ca02c"}
LABELS = {"bec": "BEC", "fmc": "BEC with FMC loss", "lnp": "LNP"}


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi == lo:
        return [lo]
    return [lo + (hi - lo) * k / (n - 1) for k in range(n)]


def line_chart(series: dict[str, list[tuple[float, float]]], title: str, xlabel: str, ylabel: str) -> str:
    """Render ``{name: [(x, y), ...]}`` as an SVG document.

    The y axis is logarithmic when every value is positive, linear otherwise.
    """
    points = [pt for pts in series.values() for pt in pts]
    xs = [x for x, _ in points] or [0.0, 1.0]
    ys = [y for _, y in points] or [0.0, 1.0]
    log_y = all(y > 0 for y in ys)
    ty = (lambda v: math.log10(v)) if log_y else (lambda v: v)
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(map(ty, ys)), max(map(ty, ys))
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
    pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    left, top = MARGIN["left"], MARGIN["top"]
    plot_w = WIDTH - left - MARGIN["right"]
    plot_h = HEIGHT - top - MARGIN["bottom"]

    def sx(x):
        return left + (x - x_lo) / (x_hi - x_lo) * plot_w

    def sy(y):
        return top + (1 - (ty(y) - y_lo) / (y_hi - y_lo)) * plot_h

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.0f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<rect x="{left}" y="{top}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>',
    ]
    for xv in _ticks(x_lo, x_hi):
        out.append(f'<line x1="{_fmt(sx(xv))}" y1="{top + plot_h}" x2="{_fmt(sx(xv))}" y2="{top + plot_h + 5}" stroke="black"/>')
        out.append(f'<text x="{_fmt(sx(xv))}" y="{top + plot_h + 18}" text-anchor="middle">{xv:.2f}</text>')
    for tv in _ticks(y_lo, y_hi):
        yv = 10 ** tv if log_y else tv
        py = _fmt(top + (1 - (tv - y_lo) / (y_hi - y_lo)) * plot_h)
        out.append(f'<line x1="{left - 5}" y1="{py}" x2="{left}" y2="{py}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{py}" text-anchor="end" dominant-baseline="middle">{yv:.2g}</text>')
    out.append(f'<text x="{left + plot_w / 2:.0f}" y="{HEIGHT - 10}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(
        f'<text x="16" y="{top + plot_h / 2:.0f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {top + plot_h / 2:.0f})">{escape(ylabel + (" (log)" if log_y else ""))}</text>'
    )

    for k, (name, pts) in enumerate(series.items()):
        color = PALETTE.get(name, "#444444")
        coords = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in pts)
        out.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="2"/>')
        for x, y in pts:
            out.append(f'<circle cx="{_fmt(sx(x))}" cy="{_fmt(sy(y))}" r="3" fill="{color}"/>')
        ly = top + 10 + 18 * k
        lx = left + plot_w + 10
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 20}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 25}" y="{ly}" dominant-baseline="middle">{escape(LABELS.get(name, name))}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def report_svg(report) -> str:
    series: dict[str, list[tuple[float, float]]] = {}
    for row in sorted(report.rows, key=lambda r: (r.model, r.p)):
        series.setdefault(row.model, []).append((row.p, row.mse_vs_infomax))
    ordered = {m: series[m] for m in ("bec", "fmc", "lnp") if m in series}
    return line_chart(ordered, "MSE against the Infomax response", "error penalty p", "MSE")
