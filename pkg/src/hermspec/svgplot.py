"""Minimal self-contained SVG log-log scatter plots (no plotting dependency).

Output is plain string formatting only, so identical inputs produce
byte-identical files.
"""

from __future__ import annotations

import math
from typing import Sequence, Tuple

WIDTH, HEIGHT = 640, 480
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 20, 40, 50


def _fmt(v: float) -> str:
    return format(v, ".6g")


def _ticks(lo: float, hi: float) -> list:
    """Decade ticks in [lo, hi] (log10 units), with 2x/5x fill-in when sparse."""
    first, last = math.ceil(lo), math.floor(hi)
    ticks = [float(e) for e in range(first, last + 1)]
    if len(ticks) < 3:
        for e in range(first - 1, last + 1):
            for m in (2.0, 5.0):
                t = e + math.log10(m)
                if lo <= t <= hi:
                    ticks.append(t)
    return sorted(ticks)


def _tick_label(t: float) -> str:
    return _fmt(10.0**t)


def svg_loglog(
    points: Sequence[Tuple[float, float]],
    slope: float | None = None,
    intercept: float | None = None,
    title: str = "",
    xlabel: str = "k",
    ylabel: str = "value",
    metadata: Sequence[Tuple[str, str]] = (),
) -> str:
    """Log-log scatter with an optional fitted power law and slope label."""
    if not points:
        raise ValueError("no points to plot")
    xs = [math.log10(x) for x, _ in points]
    ys = [math.log10(y) for _, y in points]
    if any(not math.isfinite(v) for v in xs + ys):
        raise ValueError("points must be positive and finite for a log-log plot")

    def padded(lo, hi):
        span = max(hi - lo, 1e-9)
        return lo - 0.08 * span, hi + 0.08 * span

    x0, x1 = padded(min(xs), max(xs))
    y0, y1 = padded(min(ys), max(ys))

    def px(x):
        return MARGIN_L + (x - x0) / (x1 - x0) * (WIDTH - MARGIN_L - MARGIN_R)

    def py(y):
        return HEIGHT - MARGIN_B - (y - y0) / (y1 - y0) * (HEIGHT - MARGIN_T - MARGIN_B)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
    ]
    if metadata:
        meta = " ".join(f"{k}={v}" for k, v in metadata)
        parts.append(f"<!-- {meta} -->")
    parts.append(f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>')

    # axes box and ticks
    parts.append(
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{WIDTH - MARGIN_L - MARGIN_R}" '
        f'height="{HEIGHT - MARGIN_T - MARGIN_B}" fill="none" stroke="black"/>'
    )
    for t in _ticks(x0, x1):
        xp = _fmt(px(t))
        parts.append(
            f'<line x1="{xp}" y1="{HEIGHT - MARGIN_B}" x2="{xp}" '
            f'y2="{HEIGHT - MARGIN_B + 5}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{xp}" y="{HEIGHT - MARGIN_B + 18}" font-size="11" '
            f'text-anchor="middle">{_tick_label(t)}</text>'
        )
    for t in _ticks(y0, y1):
        yp = _fmt(py(t))
        parts.append(
            f'<line x1="{MARGIN_L - 5}" y1="{yp}" x2="{MARGIN_L}" y2="{yp}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{MARGIN_L - 8}" y="{yp}" font-size="11" text-anchor="end" '
            f'dominant-baseline="middle">{_tick_label(t)}</text>'
        )

    # fitted line: v = exp(intercept) * k^slope, drawn across the x range
    if slope is not None and intercept is not None:
        ln10 = math.log(10.0)
        ya = (intercept + slope * x0 * ln10) / ln10
        yb = (intercept + slope * x1 * ln10) / ln10
        parts.append(
            f'<line x1="{_fmt(px(x0))}" y1="{_fmt(py(ya))}" x2="{_fmt(px(x1))}" '
            f'y2="{_fmt(py(yb))}" stroke="#c03030" stroke-width="1.5"/>'
        )
        parts.append(
            f'<text x="{WIDTH - MARGIN_R - 8}" y="{MARGIN_T + 16}" font-size="13" '
            f'text-anchor="end" fill="#c03030">slope = {_fmt(slope)}</text>'
        )

    for x, y in zip(xs, ys):
        parts.append(
            f'<circle cx="{_fmt(px(x))}" cy="{_fmt(py(y))}" r="3.5" fill="#1f4e9c"/>'
        )

    if title:
        parts.append(
            f'<text x="{WIDTH / 2:.6g}" y="{MARGIN_T - 14}" font-size="14" '
            f'text-anchor="middle">{title}</text>'
        )
    parts.append(
        f'<text x="{WIDTH / 2:.6g}" y="{HEIGHT - 12}" font-size="12" '
        f'text-anchor="middle">{xlabel}</text>'
    )
    parts.append(
        f'<text x="16" y="{HEIGHT / 2:.6g}" font-size="12" text-anchor="middle" '
        f'transform="rotate(-90 16 {HEIGHT / 2:.6g})">{ylabel}</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
