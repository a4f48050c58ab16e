"""Minimal deterministic SVG line plots."""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 640, 440
MARGIN = dict(left=70, right=170, top=40, bottom=60)
PAD = 0.05
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f")


def _f(v: float) -> str:
    return f"{v:.2f}"


def _range(values):
    lo, hi = min(values), max(values)
    span = hi - lo
    if span == 0:
        span = abs(lo) or 1.0
        return lo - PAD * span, hi + PAD * span
    return lo - PAD * span, hi + PAD * span


def _ticks(lo, hi, n=5):
    return [lo + (hi - lo) * k / n for k in range(n + 1)]


def emit_svg(series, path, xlabel="", ylabel="", title=""):
    """Write ``series`` (a mapping or sequence of ``(name, xs, ys)``) as one
    polyline each, with legend and labelled axes.

    Axis ranges are the data extent padded by 5% on each side.
    """
    if isinstance(series, dict):
        items = [(name, xy[0], xy[1]) for name, xy in series.items()]
    else:
        items = [tuple(s) for s in series]
    if not items:
        raise ValueError("need at least one series")
    for name, xs, ys in items:
        if len(xs) != len(ys) or len(xs) < 2:
            raise ValueError(f"series {name!r}: need at least two (x, y) points")
        if not all(math.isfinite(float(v)) for v in list(xs) + list(ys)):
            raise ValueError(f"series {name!r}: non-finite coordinate")

    x0, x1 = _range([float(v) for _, xs, _ in items for v in xs])
    y0, y1 = _range([float(v) for _, _, ys in items for v in ys])
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]
    left, top = MARGIN["left"], MARGIN["top"]

    def px(x):
        return left + (x - x0) / (x1 - x0) * pw

    def py(y):
        return top + ph - (y - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect class="plot-area" x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black" '
        f'data-xmin="{x0!r}" data-xmax="{x1!r}" data-ymin="{y0!r}" data-ymax="{y1!r}"/>',
    ]
    if title:
        out.append(f'<text x="{left + pw / 2}" y="{top - 15}" text-anchor="middle" font-size="14">{escape(title)}</text>')
    for t in _ticks(x0, x1):
        out.append(f'<line x1="{_f(px(t))}" y1="{top + ph}" x2="{_f(px(t))}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{_f(px(t))}" y="{top + ph + 18}" text-anchor="middle">{t:.3g}</text>')
    for t in _ticks(y0, y1):
        out.append(f'<line x1="{left - 5}" y1="{_f(py(t))}" x2="{left}" y2="{_f(py(t))}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{_f(py(t) + 4)}" text-anchor="end">{t:.3g}</text>')
    out.append(f'<text x="{left + pw / 2}" y="{HEIGHT - 15}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(
        f'<text x="18" y="{top + ph / 2}" text-anchor="middle" transform="rotate(-90 18 {top + ph / 2})">'
        f"{escape(ylabel)}</text>"
    )

    for k, (name, xs, ys) in enumerate(items):
        color = PALETTE[k % len(PALETTE)]
        pts = " ".join(f"{_f(px(float(x)))},{_f(py(float(y)))}" for x, y in zip(xs, ys))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        ly = top + 10 + 18 * k
        lx = left + pw + 12
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 20}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 26}" y="{ly + 4}">{escape(str(name))}</text>')
    out.append("</svg>")

    with open(path, "w", newline="") as fh:
        fh.write("\n".join(out) + "\n")
