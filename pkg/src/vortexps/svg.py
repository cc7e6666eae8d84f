"""Minimal SVG 1.1 output: line plots and marching-squares contours."""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

W, H = 640, 440
LEFT, RIGHT, TOP, BOTTOM = 70, 20, 30, 50
COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"]


def _nice_ticks(lo, hi, n=5):
    if not (np.isfinite(lo) and np.isfinite(hi)) or hi <= lo:
        return [lo]
    step = 10 ** math.floor(math.log10((hi - lo) / n))
    for m in (1, 2, 5, 10):
        if (hi - lo) / (m * step) <= n:
            step *= m
            break
    start = math.ceil(lo / step) * step
    return [start + i * step for i in range(int((hi - start) / step + 1e-9) + 1)]


class _Frame:
    def __init__(self, xlim, ylim, logx=False, logy=False):
        self.logx, self.logy = logx, logy
        self.x0, self.x1 = (math.log10(v) if logx else v for v in xlim)
        self.y0, self.y1 = (math.log10(v) if logy else v for v in ylim)
        if self.x1 == self.x0:
            self.x0, self.x1 = self.x0 - 1, self.x1 + 1
        if self.y1 == self.y0:
            self.y0, self.y1 = self.y0 - 1, self.y1 + 1

    def px(self, x):
        x = np.log10(x) if self.logx else np.asarray(x, float)
        return LEFT + (x - self.x0) / (self.x1 - self.x0) * (W - LEFT - RIGHT)

    def py(self, y):
        y = np.log10(y) if self.logy else np.asarray(y, float)
        return H - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (H - TOP - BOTTOM)

    def axes(self, xlabel, ylabel, title):
        out = [f'<rect x="{LEFT}" y="{TOP}" width="{W - LEFT - RIGHT}" height="{H - TOP - BOTTOM}" '
               'fill="none" stroke="black"/>']
        for v in _nice_ticks(self.x0, self.x1):
            x = LEFT + (v - self.x0) / (self.x1 - self.x0) * (W - LEFT - RIGHT)
            lab = f"1e{v:g}" if self.logx else f"{v:g}"
            out.append(f'<line x1="{x:.2f}" y1="{H - BOTTOM}" x2="{x:.2f}" y2="{H - BOTTOM + 5}" stroke="black"/>')
            out.append(f'<text x="{x:.2f}" y="{H - BOTTOM + 18}" font-size="11" text-anchor="middle">{lab}</text>')
        for v in _nice_ticks(self.y0, self.y1):
            y = H - BOTTOM - (v - self.y0) / (self.y1 - self.y0) * (H - TOP - BOTTOM)
            lab = f"1e{v:g}" if self.logy else f"{v:g}"
            out.append(f'<line x1="{LEFT - 5}" y1="{y:.2f}" x2="{LEFT}" y2="{y:.2f}" stroke="black"/>')
            out.append(f'<text x="{LEFT - 8}" y="{y + 4:.2f}" font-size="11" text-anchor="end">{lab}</text>')
        out.append(f'<text x="{(LEFT + W - RIGHT) / 2}" y="{H - 12}" font-size="13" '
                   f'text-anchor="middle">{escape(xlabel)}</text>')
        out.append(f'<text x="16" y="{(TOP + H - BOTTOM) / 2}" font-size="13" text-anchor="middle" '
                   f'transform="rotate(-90 16 {(TOP + H - BOTTOM) / 2})">{escape(ylabel)}</text>')
        if title:
            out.append(f'<text x="{(LEFT + W - RIGHT) / 2}" y="20" font-size="14" '
                       f'text-anchor="middle">{escape(title)}</text>')
        return out


def _doc(body):
    return ('<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" '
            f'viewBox="0 0 {W} {H}">\n<rect width="100%" height="100%" fill="white"/>\n'
            + "\n".join(body) + "\n</svg>\n")


def line_plot(series, xlabel="", ylabel="", title="", logx=False, logy=False, markers=True):
    """series: list of (label, x, y).  Non-finite points are dropped."""
    pts = []
    for _, x, y in series:
        x, y = np.asarray(x, float), np.asarray(y, float)
        ok = np.isfinite(x) & np.isfinite(y)
        if logx:
            ok &= x > 0
        if logy:
            ok &= y > 0
        pts.append((x[ok], y[ok]))
    allx = np.concatenate([p[0] for p in pts]) if pts else np.array([0.0, 1.0])
    ally = np.concatenate([p[1] for p in pts]) if pts else np.array([0.0, 1.0])
    if allx.size == 0:
        allx, ally = np.array([1.0, 10.0]), np.array([1.0, 10.0])
    fr = _Frame((allx.min(), allx.max()), (ally.min(), ally.max()), logx, logy)
    body = fr.axes(xlabel, ylabel, title)
    for j, ((label, _, _), (x, y)) in enumerate(zip(series, pts)):
        col = COLORS[j % len(COLORS)]
        if x.size:
            path = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(fr.px(x), fr.py(y)))
            body.append(f'<polyline points="{path}" fill="none" stroke="{col}" stroke-width="1.5"/>')
            if markers:
                body += [f'<circle cx="{a:.2f}" cy="{b:.2f}" r="2.5" fill="{col}"/>'
                         for a, b in zip(fr.px(x), fr.py(y))]
        body.append(f'<text x="{W - RIGHT - 8}" y="{TOP + 16 + 15 * j}" font-size="11" '
                    f'text-anchor="end" fill="{col}">{escape(str(label))}</text>')
    return _doc(body)


# {{{ marching squares

# edges: 0 bottom (v00-v10), 1 right (v10-v11), 2 top (v01-v11), 3 left (v00-v01)
_SEGMENTS = {
    1: [(3, 0)], 2: [(0, 1)], 3: [(3, 1)], 4: [(1, 2)], 6: [(0, 2)], 7: [(3, 2)],
    8: [(2, 3)], 9: [(2, 0)], 11: [(2, 1)], 12: [(1, 3)], 13: [(1, 0)], 14: [(0, 3)],
}


def marching_squares(x, y, Z, level):
    """Line segments ((x0, y0), (x1, y1)) of {Z = level}; Z has shape (len(y), len(x)).

    Cells whose corners contain non-finite values are skipped; saddles are
    resolved by the cell-centre average.
    """
    x, y, Z = np.asarray(x, float), np.asarray(y, float), np.asarray(Z, float)
    segs = []
    for j in range(len(y) - 1):
        for i in range(len(x) - 1):
            v = (Z[j, i], Z[j, i + 1], Z[j + 1, i + 1], Z[j + 1, i])  # 00, 10, 11, 01
            if not all(np.isfinite(v)):
                continue
            idx = sum(1 << b for b, val in enumerate((v[0], v[1], v[2], v[3])) if val > level)
            # bit 0: v00, bit 1: v10, bit 2: v11, bit 3: v01
            if idx in (0, 15):
                continue

            def point(edge):
                if edge == 0:
                    a, b, pa, pb = v[0], v[1], (x[i], y[j]), (x[i + 1], y[j])
                elif edge == 1:
                    a, b, pa, pb = v[1], v[2], (x[i + 1], y[j]), (x[i + 1], y[j + 1])
                elif edge == 2:
                    a, b, pa, pb = v[3], v[2], (x[i], y[j + 1]), (x[i + 1], y[j + 1])
                else:
                    a, b, pa, pb = v[0], v[3], (x[i], y[j]), (x[i], y[j + 1])
                s = 0.5 if b == a else (level - a) / (b - a)
                return (pa[0] + s * (pb[0] - pa[0]), pa[1] + s * (pb[1] - pa[1]))

            if idx in (5, 10):
                centre = sum(v) / 4 > level
                if idx == 5:
                    pairs = [(3, 2), (1, 0)] if centre else [(3, 0), (1, 2)]
                else:
                    pairs = [(0, 3), (2, 1)] if centre else [(0, 1), (2, 3)]
            else:
                pairs = _SEGMENTS[idx]
            segs += [(point(a), point(b)) for a, b in pairs]
    return segs


def contour_plot(x, y, Z, levels, xlabel="Re z", ylabel="Im z", title="", log_values=True):
    """Contours of Z (log10 taken first when log_values) at the given levels."""
    Zp = np.log10(np.where(Z > 0, Z, np.nan)) if log_values else np.asarray(Z, float)
    fr = _Frame((float(np.min(x)), float(np.max(x))), (float(np.min(y)), float(np.max(y))))
    body = fr.axes(xlabel, ylabel, title)
    for j, lev in enumerate(levels):
        col = COLORS[j % len(COLORS)]
        lv = math.log10(lev) if log_values else lev
        for (a, b), (c, d) in marching_squares(x, y, Zp, lv):
            body.append(f'<line x1="{fr.px(a):.2f}" y1="{fr.py(b):.2f}" x2="{fr.px(c):.2f}" '
                        f'y2="{fr.py(d):.2f}" stroke="{col}" stroke-width="1.2"/>')
        body.append(f'<text x="{W - RIGHT - 8}" y="{TOP + 16 + 15 * j}" font-size="11" '
                    f'text-anchor="end" fill="{col}">{lev:g}</text>')
    return _doc(body)

# }}}
