"""Minimal SVG line plots (polylines on a shared data frame)."""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#7f7f7f")


def line_plot(series, title="", xlabel="", ylabel="", width=720, height=420, equal=False, comment=None) -> str:
    """Render ``[(label, xs, ys), ...]`` as an SVG document.

    ``equal`` keeps one data unit the same length on both axes.
    """
    pad = 50
    xs = np.concatenate([np.asarray(s[1], float) for s in series])
    ys = np.concatenate([np.asarray(s[2], float) for s in series])
    ok = np.isfinite(xs) & np.isfinite(ys)
    x0, x1 = xs[ok].min(), xs[ok].max()
    y0, y1 = ys[ok].min(), ys[ok].max()
    x1 = x1 if x1 > x0 else x0 + 1.0
    y1 = y1 if y1 > y0 else y0 + 1.0
    sx = (width - 2 * pad) / (x1 - x0)
    sy = (height - 2 * pad) / (y1 - y0)
    if equal:
        sx = sy = min(sx, sy)

    def px(x, y):
        return pad + (x - x0) * sx, height - pad - (y - y0) * sy

    out = []
    if comment:
        out.append(f"<!-- {escape(comment.replace('--', '- -'))} -->")
    out.append(f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">')
    out.append(f'<rect width="{width}" height="{height}" fill="white"/>')
    out.append(f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>')
    out.append(f'<text x="{width / 2:.1f}" y="{height - 10}" text-anchor="middle" font-size="12">{escape(xlabel)}</text>')
    out.append(
        f'<text x="14" y="{height / 2:.1f}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 14 {height / 2:.1f})">{escape(ylabel)}</text>'
    )
    out.append(f'<text x="{pad}" y="{height - pad + 16}" font-size="10">{x0:.4g}</text>')
    out.append(f'<text x="{width - pad}" y="{height - pad + 16}" font-size="10" text-anchor="end">{x1:.4g}</text>')
    out.append(f'<text x="{pad - 4}" y="{height - pad}" font-size="10" text-anchor="end">{y0:.4g}</text>')
    out.append(f'<text x="{pad - 4}" y="{pad}" font-size="10" text-anchor="end">{y1:.4g}</text>')
    for k, (label, sxs, sys_) in enumerate(series):
        color = _COLORS[k % len(_COLORS)]
        pts = [px(x, y) for x, y in zip(sxs, sys_) if np.isfinite(x) and np.isfinite(y)]
        coords = " ".join(f"{a:.2f},{b:.2f}" for a, b in pts)
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{coords}"/>')
        out.append(f'<text x="{width - pad}" y="{pad + 14 * k}" font-size="11" text-anchor="end" fill="{color}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
