"""Minimal self-contained SVG line plots (no plotting dependency)."""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 640, 400
LEFT, RIGHT, TOP, BOTTOM = 60, 20, 30, 50
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def nice_ticks(lo: float, hi: float, target: int = 6):
    """Round tick positions covering ``[lo, hi]``."""
    if not (math.isfinite(lo) and math.isfinite(hi)):
        return [0.0, 1.0]
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / max(1, target - 1)
    mag = 10 ** math.floor(math.log10(raw))
    step = next(k * mag for k in (1, 2, 2.5, 5, 10) if k * mag >= raw)
    start = math.floor(lo / step + 1e-9) * step
    ticks = []
    v = start
    while v <= hi + step * 1e-9:
        ticks.append(round(v, 12))
        v += step
    if ticks[-1] < hi:
        ticks.append(round(v, 12))
    return ticks


def _fmt_tick(v: float) -> str:
    s = f"{v:.6g}"
    return "0" if s == "-0" else s


def line_plot(x, series, title: str = "", xlabel: str = "", ylabel: str = "") -> str:
    """Render ``series`` (a list of ``(label, values)``) against ``x`` as SVG text."""
    xs = [float(v) for v in x]
    finite = [float(v) for _, ys in series for v in ys if math.isfinite(float(v))]
    xticks = nice_ticks(min(xs), max(xs)) if xs else [0.0, 1.0]
    yticks = nice_ticks(min(finite, default=0.0), max(finite, default=1.0))
    x0, x1 = xticks[0], xticks[-1]
    y0, y1 = yticks[0], yticks[-1]
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def px(v):
        return LEFT + (v - x0) / (x1 - x0) * pw

    def py(v):
        return TOP + ph - (v - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" '
        f'width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for v in xticks:
        X = px(v)
        out.append(f'<line x1="{X:.2f}" y1="{TOP + ph}" x2="{X:.2f}" y2="{TOP + ph + 5}" stroke="black"/>')
        out.append(
            f'<text x="{X:.2f}" y="{TOP + ph + 18}" text-anchor="middle">{_fmt_tick(v)}</text>'
        )
    for v in yticks:
        Y = py(v)
        out.append(f'<line x1="{LEFT - 5}" y1="{Y:.2f}" x2="{LEFT}" y2="{Y:.2f}" stroke="black"/>')
        out.append(
            f'<text x="{LEFT - 8}" y="{Y + 4:.2f}" text-anchor="end">{_fmt_tick(v)}</text>'
        )
    if title:
        out.append(f'<text x="{WIDTH / 2:.2f}" y="18" text-anchor="middle">{escape(title)}</text>')
    if xlabel:
        out.append(
            f'<text x="{LEFT + pw / 2:.2f}" y="{HEIGHT - 10}" text-anchor="middle">{escape(xlabel)}</text>'
        )
    if ylabel:
        out.append(
            f'<text x="14" y="{TOP + ph / 2:.2f}" text-anchor="middle" '
            f'transform="rotate(-90 14 {TOP + ph / 2:.2f})">{escape(ylabel)}</text>'
        )
    for k, (label, ys) in enumerate(series):
        color = COLORS[k % len(COLORS)]
        pts = " ".join(
            f"{px(a):.2f},{py(float(b)):.2f}" for a, b in zip(xs, ys) if math.isfinite(float(b))
        )
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        ly = TOP + 14 + 16 * k
        out.append(
            f'<line x1="{WIDTH - RIGHT - 110}" y1="{ly - 4}" x2="{WIDTH - RIGHT - 90}" '
            f'y2="{ly - 4}" stroke="{color}" stroke-width="2"/>'
        )
        out.append(f'<text x="{WIDTH - RIGHT - 85}" y="{ly}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
