"""Deterministic SVG heatmap of success rate over the (n, k) grid.

Hand-written SVG rather than a plotting library: the output must be
byte-identical for identical input, with no timestamps or random ids.
"""

from __future__ import annotations

import math
from itertools import groupby

from .errors import LayoutError

# diverging ramp: rate 0 -> RAMP[0], 0.5 -> RAMP[1], 1 -> RAMP[2]
RAMP = ((178, 24, 43), (247, 247, 247), (33, 102, 172))
NA_COLOR = "#bdbdbd"

CELL_W, CELL_H = 72.0, 36.0
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70.0, 20.0, 40.0, 56.0
PANEL_GAP = 30.0


def success_color(rate) -> str:
    """Hex color for a success rate in [0, 1]."""
    r = min(1.0, max(0.0, float(rate)))
    lo, hi, t = (RAMP[0], RAMP[1], 2 * r) if r <= 0.5 else (RAMP[1], RAMP[2], 2 * r - 1)
    rgb = tuple(round(a + (b - a) * t) for a, b in zip(lo, hi))
    return "#%02x%02x%02x" % rgb


def _f(x):
    return f"{x:.2f}"


def _edges(centers, transform):
    """Cell boundaries halfway between neighbouring centers in transformed space."""
    t = [transform(c) for c in centers]
    if len(t) == 1:
        return [t[0] - 0.5, t[0] + 0.5]
    mids = [(a + b) / 2 for a, b in zip(t, t[1:])]
    return [t[0] - (mids[0] - t[0])] + mids + [t[-1] + (t[-1] - mids[-1])]


def _interp(x, xs, ys):
    """Piecewise-linear map from data coordinate to pixel, extrapolating at the ends."""
    if x <= xs[1] or len(xs) == 2:
        i = 0
    elif x >= xs[-2]:
        i = len(xs) - 2
    else:
        i = next(j for j in range(len(xs) - 1) if xs[j] <= x <= xs[j + 1])
    x0, x1, y0, y1 = xs[i], xs[i + 1], ys[i], ys[i + 1]
    return y0 + (y1 - y0) * (x - x0) / (x1 - x0)


def _panel(cells, top, parts):
    family, kappa = cells[0].family, cells[0].kappa
    ns = sorted({c.n for c in cells})
    ks = sorted({c.k for c in cells})
    by = {(c.n, c.k): c for c in cells}
    for n in ns:
        for k in ks:
            if n > k and (n, k) not in by:
                raise LayoutError(f"summary is not a grid: missing cell n={n} k={k} for {family}")

    x_edges = _edges(ns, math.log10)
    y_edges = _edges(ks, float)
    x_pix = [MARGIN_L + i * CELL_W for i in range(len(ns) + 1)]
    # k grows upward
    height = len(ks) * CELL_H
    y_pix = [top + height - i * CELL_H for i in range(len(ks) + 1)]

    label = f"{family} (kappa={kappa:.4g})"
    parts.append(f'<text x="{_f(MARGIN_L)}" y="{_f(top - 10)}" font-size="13">{label}</text>')
    for i, n in enumerate(ns):
        for j, k in enumerate(ks):
            x, y = x_pix[i], y_pix[j + 1]
            c = by.get((n, k))
            if c is None:
                parts.append(f'<rect x="{_f(x)}" y="{_f(y)}" width="{_f(CELL_W)}" height="{_f(CELL_H)}" '
                             f'fill="{NA_COLOR}" stroke="#ffffff"/>')
                continue
            rate = float(c.success_rate)
            parts.append(f'<rect x="{_f(x)}" y="{_f(y)}" width="{_f(CELL_W)}" height="{_f(CELL_H)}" '
                         f'fill="{success_color(rate)}" stroke="#ffffff"/>')
            parts.append(f'<text x="{_f(x + CELL_W / 2)}" y="{_f(y + CELL_H / 2 + 4)}" font-size="11" '
                         f'text-anchor="middle">{rate:.2f}</text>')

    bottom = top + height
    for i, n in enumerate(ns):
        parts.append(f'<text x="{_f(x_pix[i] + CELL_W / 2)}" y="{_f(bottom + 16)}" font-size="11" '
                     f'text-anchor="middle">{n}</text>')
    for j, k in enumerate(ks):
        parts.append(f'<text x="{_f(MARGIN_L - 8)}" y="{_f(y_pix[j] - CELL_H / 2 + 4)}" font-size="11" '
                     f'text-anchor="end">{k}</text>')
    parts.append(f'<text x="{_f(MARGIN_L + len(ns) * CELL_W / 2)}" y="{_f(bottom + 34)}" font-size="12" '
                 f'text-anchor="middle">n (log scale)</text>')
    parts.append(f'<text x="{_f(MARGIN_L - 40)}" y="{_f(top + height / 2)}" font-size="12" '
                 f'text-anchor="middle">k</text>')

    # reference curve n = k^2, clipped to the panel
    pts = []
    lo, hi = y_edges[0], y_edges[-1]
    for s in range(201):
        kk = lo + (hi - lo) * s / 200
        if kk <= 0:
            continue
        xv = _interp(math.log10(kk * kk), x_edges, x_pix)
        yv = _interp(kk, y_edges, y_pix)
        if x_pix[0] <= xv <= x_pix[-1]:
            pts.append(f"{_f(xv)},{_f(yv)}")
    if len(pts) >= 2:
        parts.append(f'<polyline points="{" ".join(pts)}" fill="none" stroke="#000000" '
                     f'stroke-width="1.5" stroke-dasharray="5,3"/>')
    elif len(pts) == 1:
        x, y = pts[0].split(",")
        parts.append(f'<circle cx="{x}" cy="{y}" r="2.5" fill="#000000"/>')
    parts.append(f'<rect x="{_f(x_pix[0])}" y="{_f(top)}" width="{_f(x_pix[-1] - x_pix[0])}" '
                 f'height="{_f(height)}" fill="none" stroke="#000000"/>')
    return len(ns), height


def render_heatmap(summary) -> str:
    """One panel per law: columns are n (log-spaced), rows are k, color is success rate.

    The dashed line is ``n = k^2``. Cells with ``n <= k`` are gray.
    """
    cells = sorted(summary, key=lambda c: (c.family, c.kappa, c.k, c.n))
    if not cells:
        raise LayoutError("nothing to render")
    parts = []
    top = MARGIN_T
    width = 0.0
    for _, grp in groupby(cells, key=lambda c: (c.family, c.kappa)):
        ncols, height = _panel(list(grp), top, parts)
        width = max(width, MARGIN_L + ncols * CELL_W + MARGIN_R)
        top += height + MARGIN_B + PANEL_GAP
    total_h = top - PANEL_GAP
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(width)}" height="{_f(total_h)}" '
            f'viewBox="0 0 {_f(width)} {_f(total_h)}" font-family="sans-serif">')
    return "\n".join([head, '<rect width="100%" height="100%" fill="#ffffff"/>'] + parts + ["</svg>"]) + "\n"
