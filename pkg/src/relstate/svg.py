"""Minimal deterministic SVG line and bar charts.

Fixed canvas, fixed palette, coordinates printed with a fixed number of
decimals, so identical data always produce identical bytes.
"""

from __future__ import annotations

from typing import Mapping, Sequence
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 640, 400
LEFT, RIGHT, TOP, BOTTOM = 60, 150, 30, 50
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f")


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _frame(title: str, xlabel: str, ylabel: str) -> list[str]:
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2}" y="18" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
        f'<text x="{LEFT + pw / 2}" y="{HEIGHT - 12}" text-anchor="middle">{escape(xlabel)}</text>',
        f'<text x="16" y="{TOP + ph / 2}" text-anchor="middle" '
        f'transform="rotate(-90 16 {TOP + ph / 2})">{escape(ylabel)}</text>',
    ]
    for k in range(5):
        y = k / 4
        py = TOP + ph * (1 - y)
        out.append(f'<text x="{LEFT - 6}" y="{_fmt(py + 4)}" text-anchor="end">{y:.2f}</text>')
        out.append(f'<line x1="{LEFT}" y1="{_fmt(py)}" x2="{LEFT + pw}" y2="{_fmt(py)}" stroke="#dddddd"/>')
    return out


def line_chart(
    x: Sequence[float],
    series: Mapping[str, Sequence[float]],
    title: str = "",
    xlabel: str = "t",
    ylabel: str = "weight",
) -> str:
    """Lines on a ``[0, 1]`` y-axis; one polyline per entry of ``series``."""
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM
    x0, x1 = min(x), max(x)
    span = (x1 - x0) or 1.0
    out = _frame(title, xlabel, ylabel)
    for k in range(5):
        xv = x0 + span * k / 4
        px = LEFT + pw * k / 4
        out.append(f'<text x="{_fmt(px)}" y="{TOP + ph + 16}" text-anchor="middle">{xv:.3g}</text>')
    for i, (name, ys) in enumerate(series.items()):
        color = PALETTE[i % len(PALETTE)]
        pts = " ".join(
            f"{_fmt(LEFT + pw * (xv - x0) / span)},{_fmt(TOP + ph * (1 - min(1.0, max(0.0, yv))))}"
            for xv, yv in zip(x, ys)
        )
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="2"/>')
        ly = TOP + 14 + 16 * i
        out.append(f'<line x1="{WIDTH - RIGHT + 10}" y1="{ly - 4}" x2="{WIDTH - RIGHT + 30}" y2="{ly - 4}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{WIDTH - RIGHT + 36}" y="{ly}">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def bar_chart(labels: Sequence[str], values: Sequence[float], title: str = "", ylabel: str = "truth value") -> str:
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM
    out = _frame(title, "m", ylabel)
    slot = pw / max(1, len(values))
    for i, (label, v) in enumerate(zip(labels, values)):
        h = ph * min(1.0, max(0.0, v))
        x = LEFT + slot * i + slot * 0.15
        out.append(
            f'<rect x="{_fmt(x)}" y="{_fmt(TOP + ph - h)}" width="{_fmt(slot * 0.7)}" '
            f'height="{_fmt(h)}" fill="{PALETTE[0]}"/>'
        )
        out.append(f'<text x="{_fmt(LEFT + slot * (i + 0.5))}" y="{TOP + ph + 16}" '
                   f'text-anchor="middle">{escape(str(label))}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
