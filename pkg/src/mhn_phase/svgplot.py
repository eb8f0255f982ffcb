"""Tiny self-contained SVG line plots. No external assets, SVG 1.1."""

import math
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")


class Series:
    def __init__(self, x, y, label="", style="line", color=None):
        self.x = np.asarray(x, dtype=float)
        self.y = np.asarray(y, dtype=float)
        self.label = label
        self.style = style  # "line", "step", "scatter" or "dashed"
        self.color = color


def _nice_ticks(lo, hi, n=5):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step) * step
    ticks = []
    t = start
    while t <= hi + 1e-12 * step:
        ticks.append(round(t, 12))
        t += step
    return ticks


def _label(v):
    return f"{v:.3g}"


def line_plot(series, title="", xlabel="", ylabel="", logx=False, width=640, height=420):
    """Return an SVG document string plotting every ``Series``."""
    ml, mr, mt, mb = 70, 20, 40, 55
    pw, ph = width - ml - mr, height - mt - mb
    finite = [s for s in series if s.x.size]
    xs = np.concatenate([s.x for s in finite]) if finite else np.array([0.0, 1.0])
    ys = np.concatenate([s.y for s in finite]) if finite else np.array([0.0, 1.0])
    keep = np.isfinite(xs) & np.isfinite(ys)
    if logx:
        keep &= xs > 0
    xs, ys = xs[keep], ys[keep]
    if xs.size == 0:
        xs, ys = np.array([1.0, 10.0]), np.array([0.0, 1.0])

    tx = np.log10 if logx else (lambda v: np.asarray(v, dtype=float))
    x0, x1 = float(tx(xs.min())), float(tx(xs.max()))
    y0, y1 = float(ys.min()), float(ys.max())
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad

    def sx(v):
        return ml + (float(tx(v)) - x0) / (x1 - x0) * pw

    def sy(v):
        return mt + (1.0 - (v - y0) / (y1 - y0)) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    if logx:
        xticks = [10.0**k for k in range(math.ceil(x0 - 1e-9), math.floor(x1 + 1e-9) + 1)]
    else:
        xticks = _nice_ticks(x0, x1)
    for t in xticks:
        px = sx(t)
        out.append(f'<line x1="{px:.2f}" y1="{mt + ph}" x2="{px:.2f}" y2="{mt + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{px:.2f}" y="{mt + ph + 18}" text-anchor="middle">{_label(t)}</text>')
    for t in _nice_ticks(y0, y1):
        py = sy(t)
        out.append(f'<line x1="{ml - 5}" y1="{py:.2f}" x2="{ml}" y2="{py:.2f}" stroke="black"/>')
        out.append(f'<text x="{ml - 8}" y="{py + 4:.2f}" text-anchor="end">{_label(t)}</text>')
    out.append(f'<text x="{ml + pw / 2}" y="{height - 12}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(
        f'<text x="16" y="{mt + ph / 2}" text-anchor="middle" transform="rotate(-90 16 {mt + ph / 2})">'
        f"{escape(ylabel)}</text>"
    )
    out.append(f'<text x="{ml + pw / 2}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>')

    for k, s in enumerate(series):
        color = s.color or PALETTE[k % len(PALETTE)]
        ok = np.isfinite(s.x) & np.isfinite(s.y)
        if logx:
            ok &= s.x > 0
        px = [sx(v) for v in s.x[ok]]
        py = [sy(v) for v in s.y[ok]]
        if not px:
            continue
        if s.style == "scatter":
            out.extend(f'<circle cx="{a:.2f}" cy="{b:.2f}" r="2.5" fill="{color}"/>' for a, b in zip(px, py))
        else:
            if s.style == "step":
                pts = [(px[0], py[0])]
                for a, b in zip(px[1:], py[1:]):
                    pts.append((a, pts[-1][1]))
                    pts.append((a, b))
            else:
                pts = list(zip(px, py))
            dash = ' stroke-dasharray="5,4"' if s.style == "dashed" else ""
            coords = " ".join(f"{a:.2f},{b:.2f}" for a, b in pts)
            out.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>')

    labelled = [(k, s) for k, s in enumerate(series) if s.label]
    for row, (k, s) in enumerate(labelled):
        color = s.color or PALETTE[k % len(PALETTE)]
        ly = mt + 14 + 16 * row
        out.append(f'<line x1="{ml + 10}" y1="{ly - 4}" x2="{ml + 30}" y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{ml + 36}" y="{ly}">{escape(s.label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def save(path, svg_text):
    with open(path, "w") as fh:
        fh.write(svg_text)
    return path
