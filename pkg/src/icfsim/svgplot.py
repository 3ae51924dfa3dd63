"""Minimal self-contained SVG plots of interference patterns.

One polyline per pattern, optional error bars, an optional overlay curve
(e.g. the analytic scan behind a Monte Carlo estimate), and an optional
dashed horizontal reference line (e.g. the scan floor a classical curve of
limiting visibility would reach).  No plotting dependency; output is a
plain deterministic SVG string.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .analytic import InterferencePattern

_W, _H = 720, 480
_L, _R, _T, _B = 70, 20, 46, 54


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10.0 ** np.floor(np.log10(raw))
    step = min(s * mag for s in (1, 2, 2.5, 5, 10) if s * mag >= raw)
    start = np.ceil(lo / step) * step
    return [float(t) for t in np.arange(start, hi + step / 2, step)]


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def write_pattern_svg(path, pattern: InterferencePattern, title: str = "",
                      overlay: InterferencePattern | None = None,
                      hline: float | None = None,
                      hline_label: str = "") -> None:
    xs = np.asarray(pattern.xs, dtype=float)
    ys = np.asarray(pattern.values, dtype=float)
    x_lo, x_hi = float(xs.min()), float(xs.max())
    y_candidates = [ys]
    if pattern.stderrs is not None:
        y_candidates.append(ys + pattern.stderrs)
    if overlay is not None:
        y_candidates.append(np.asarray(overlay.values, dtype=float))
    y_hi = max(float(np.max(a)) for a in y_candidates)
    if hline is not None:
        y_hi = max(y_hi, hline)
    y_lo = 0.0
    y_hi *= 1.06
    if x_hi <= x_lo:
        x_hi = x_lo + 1.0

    def px(x):
        return _L + (x - x_lo) / (x_hi - x_lo) * (_W - _L - _R)

    def py(y):
        return _H - _B - (y - y_lo) / (y_hi - y_lo) * (_H - _T - _B)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15">{title}</text>',
        f'<rect x="{_L}" y="{_T}" width="{_W - _L - _R}" height="{_H - _T - _B}" '
        f'fill="none" stroke="black" stroke-width="1"/>',
    ]
    for t in _ticks(x_lo, x_hi):
        x = px(t)
        parts.append(f'<line x1="{x:.2f}" y1="{_H - _B}" x2="{x:.2f}" '
                     f'y2="{_H - _B + 5}" stroke="black"/>')
        parts.append(f'<text x="{x:.2f}" y="{_H - _B + 20}" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="12">{_fmt(t)}</text>')
    for t in _ticks(y_lo, y_hi):
        y = py(t)
        parts.append(f'<line x1="{_L - 5}" y1="{y:.2f}" x2="{_L}" y2="{y:.2f}" '
                     f'stroke="black"/>')
        parts.append(f'<text x="{_L - 9}" y="{y + 4:.2f}" text-anchor="end" '
                     f'font-family="sans-serif" font-size="12">{_fmt(t)}</text>')
    parts.append(f'<text x="{(_L + _W - _R) / 2}" y="{_H - 10}" text-anchor="middle" '
                 f'font-family="sans-serif" font-size="13">scan coordinate (rad)</text>')

    if overlay is not None:
        pts = " ".join(f"{px(x):.2f},{py(y):.2f}"
                       for x, y in zip(overlay.xs, overlay.values))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="#999999" '
                     f'stroke-width="1.5"/>')
    if pattern.stderrs is not None:
        for x, y, e in zip(xs, ys, pattern.stderrs):
            parts.append(f'<line x1="{px(x):.2f}" y1="{py(y - e):.2f}" '
                         f'x2="{px(x):.2f}" y2="{py(y + e):.2f}" '
                         f'stroke="#1f77b4" stroke-width="1"/>')
    pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xs, ys))
    parts.append(f'<polyline points="{pts}" fill="none" stroke="#1f77b4" '
                 f'stroke-width="1.8"/>')
    if hline is not None:
        y = py(hline)
        parts.append(f'<line x1="{_L}" y1="{y:.2f}" x2="{_W - _R}" y2="{y:.2f}" '
                     f'stroke="#d62728" stroke-width="1.2" stroke-dasharray="6,4"/>')
        if hline_label:
            parts.append(f'<text x="{_W - _R - 4}" y="{y - 5:.2f}" text-anchor="end" '
                         f'font-family="sans-serif" font-size="12" '
                         f'fill="#d62728">{hline_label}</text>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n")
