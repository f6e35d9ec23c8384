"""SVG factor-plane plots of interval-valued scores."""

from __future__ import annotations

from html import escape
from pathlib import Path

import numpy as np

from .errors import DomainError

WIDTH = 640
HEIGHT = 640
MARGIN = 56
FILL = "#1f77b4"


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _ticks(lo: float, hi: float, count: int = 5):
    return np.linspace(lo, hi, count)


def factor_plane_svg(lower, upper, k1: int = 0, k2: int = 1, labels=None, axis_names=None) -> str:
    """SVG text with one rectangle per unit spanning two score intervals.

    Parameters
    ----------
    lower, upper : array_like, shape (n, m)
        Score interval bounds.
    k1, k2 : int
        Factors drawn on the horizontal and vertical axes.
    labels : sequence of str, optional
        Unit labels written at the rectangle centers.

    Rectangles are filled at 40% opacity; a score interval of zero width is
    drawn as a 1px segment.
    """
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    if lower.ndim != 2 or lower.shape != upper.shape:
        raise DomainError("score bounds must be matching (n, m) arrays")
    m = lower.shape[1]
    if not (0 <= k1 < m and 0 <= k2 < m and k1 != k2):
        raise DomainError(f"need two distinct factors among {m}")
    x0, x1 = lower[:, k1], upper[:, k1]
    y0, y1 = lower[:, k2], upper[:, k2]
    xmin, xmax = float(x0.min()), float(x1.max())
    ymin, ymax = float(y0.min()), float(y1.max())
    xpad = 0.05 * (xmax - xmin) or 1.0
    ypad = 0.05 * (ymax - ymin) or 1.0
    xmin, xmax, ymin, ymax = xmin - xpad, xmax + xpad, ymin - ypad, ymax + ypad
    plot_w = WIDTH - 2 * MARGIN
    plot_h = HEIGHT - 2 * MARGIN

    def sx(v):
        return MARGIN + (v - xmin) / (xmax - xmin) * plot_w

    def sy(v):
        return HEIGHT - MARGIN - (v - ymin) / (ymax - ymin) * plot_h

    names = axis_names or (f"Factor {k1 + 1}", f"Factor {k2 + 1}")
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{MARGIN}" y="{MARGIN}" width="{plot_w}" height="{plot_h}" fill="none" stroke="#444"/>',
    ]
    for t in _ticks(xmin, xmax):
        out.append(f'<text x="{_fmt(sx(t))}" y="{HEIGHT - MARGIN + 16}" font-size="11" text-anchor="middle">{t:.2g}</text>')
    for t in _ticks(ymin, ymax):
        out.append(f'<text x="{MARGIN - 6}" y="{_fmt(sy(t) + 4)}" font-size="11" text-anchor="end">{t:.2g}</text>')
    if xmin < 0 < xmax:
        out.append(f'<line x1="{_fmt(sx(0))}" y1="{MARGIN}" x2="{_fmt(sx(0))}" y2="{HEIGHT - MARGIN}" stroke="#bbb" stroke-dasharray="4 3"/>')
    if ymin < 0 < ymax:
        out.append(f'<line x1="{MARGIN}" y1="{_fmt(sy(0))}" x2="{WIDTH - MARGIN}" y2="{_fmt(sy(0))}" stroke="#bbb" stroke-dasharray="4 3"/>')
    out.append(f'<text x="{WIDTH / 2}" y="{HEIGHT - 14}" font-size="13" text-anchor="middle">{escape(names[0])}</text>')
    out.append(
        f'<text x="16" y="{HEIGHT / 2}" font-size="13" text-anchor="middle" transform="rotate(-90 16 {HEIGHT / 2})">{escape(names[1])}</text>'
    )
    for i in range(lower.shape[0]):
        left, right = sx(x0[i]), sx(x1[i])
        top, bottom = sy(y1[i]), sy(y0[i])
        flat_x = x1[i] == x0[i]
        flat_y = y1[i] == y0[i]
        if flat_x and flat_y:
            out.append(f'<rect class="unit" x="{_fmt(left - 0.5)}" y="{_fmt(top - 0.5)}" width="1" height="1" fill="{FILL}"/>')
        elif flat_x or flat_y:
            out.append(
                f'<line class="unit" x1="{_fmt(left)}" y1="{_fmt(bottom)}" x2="{_fmt(right)}" y2="{_fmt(top)}" stroke="{FILL}" stroke-width="1"/>'
            )
        else:
            out.append(
                f'<rect class="unit" x="{_fmt(left)}" y="{_fmt(top)}" width="{_fmt(right - left)}" height="{_fmt(bottom - top)}" '
                f'fill="{FILL}" fill-opacity="0.4" stroke="{FILL}" stroke-width="0.5"/>'
            )
        if labels is not None:
            out.append(
                f'<text x="{_fmt((left + right) / 2)}" y="{_fmt((top + bottom) / 2)}" font-size="9" text-anchor="middle">{escape(str(labels[i]))}</text>'
            )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_factor_plane(path, lower, upper, **kwargs) -> None:
    Path(path).write_text(factor_plane_svg(lower, upper, **kwargs), encoding="utf-8")
