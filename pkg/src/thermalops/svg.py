"""Minimal SVG output: scattered points and polylines in a fixed square frame."""

from __future__ import annotations

import numpy as np


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def scatter_svg(points, polylines=(), markers=(), size: int = 400,
                extent=(-1.0, 1.0, -1.0, 1.0), labels=("x", "z")) -> str:
    """Render 2-d ``points`` (light dots), ``polylines`` and highlighted ``markers``.

    ``extent = (xmin, xmax, ymin, ymax)`` in data coordinates; the y axis points up.
    """
    xmin, xmax, ymin, ymax = extent
    pad = 20

    def tx(x):
        return pad + (x - xmin) / (xmax - xmin) * (size - 2 * pad)

    def ty(y):
        return size - pad - (y - ymin) / (ymax - ymin) * (size - 2 * pad)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="white"/>',
        f'<circle cx="{_fmt(tx(0))}" cy="{_fmt(ty(0))}" r="{_fmt(tx(1) - tx(0))}" '
        'fill="none" stroke="#999" stroke-width="1"/>',
        f'<line x1="{_fmt(tx(xmin))}" y1="{_fmt(ty(0))}" x2="{_fmt(tx(xmax))}" y2="{_fmt(ty(0))}" '
        'stroke="#ccc"/>',
        f'<line x1="{_fmt(tx(0))}" y1="{_fmt(ty(ymin))}" x2="{_fmt(tx(0))}" y2="{_fmt(ty(ymax))}" '
        'stroke="#ccc"/>',
        f'<text x="{size - pad}" y="{_fmt(ty(0) - 4)}" font-size="12">{labels[0]}</text>',
        f'<text x="{_fmt(tx(0) + 4)}" y="{pad}" font-size="12">{labels[1]}</text>',
    ]
    for x, y in np.asarray(points, dtype=float).reshape(-1, 2):
        out.append(f'<circle cx="{_fmt(tx(x))}" cy="{_fmt(ty(y))}" r="1" fill="#4a7ab5" '
                   'fill-opacity="0.3"/>')
    for line in polylines:
        pts = " ".join(f"{_fmt(tx(x))},{_fmt(ty(y))}"
                       for x, y in np.asarray(line, dtype=float).reshape(-1, 2))
        out.append(f'<polyline points="{pts}" fill="none" stroke="#b5463a" stroke-width="1.5"/>')
    for x, y in np.asarray(markers, dtype=float).reshape(-1, 2):
        out.append(f'<circle cx="{_fmt(tx(x))}" cy="{_fmt(ty(y))}" r="3" fill="black"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
