"""Minimal deterministic SVG line charts.

Hand-rolled on purpose: output bytes depend only on the data, so identical
invocations produce identical files.
"""

from __future__ import annotations

import math

__all__ = ["line_chart"]

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b")

_WIDTH, _HEIGHT = 640, 420
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 70, 20, 40, 50


def _transform(value: float, lo: float, hi: float, log: bool) -> float:
    if log:
        value, lo, hi = math.log10(value), math.log10(lo), math.log10(hi)
    if hi == lo:
        return 0.5
    return (value - lo) / (hi - lo)


def line_chart(path, series, title="", xlabel="", ylabel="", log_x=False, log_y=False) -> None:
    """Write a polyline chart; ``series`` is a list of (label, xs, ys)."""
    xs_all = [x for _, xs, _ in series for x in xs]
    ys_all = [y for _, _, ys in series for y in ys]
    if not xs_all:
        raise ValueError("nothing to plot")
    if log_x and min(xs_all) <= 0:
        raise ValueError("log x-axis needs positive values")
    if log_y and min(ys_all) <= 0:
        raise ValueError("log y-axis needs positive values")
    x_lo, x_hi = min(xs_all), max(xs_all)
    y_lo, y_hi = min(ys_all), max(ys_all)

    plot_w = _WIDTH - _MARGIN_L - _MARGIN_R
    plot_h = _HEIGHT - _MARGIN_T - _MARGIN_B

    def px(x: float) -> float:
        return _MARGIN_L + plot_w * _transform(x, x_lo, x_hi, log_x)

    def py(y: float) -> float:
        return _HEIGHT - _MARGIN_B - plot_h * _transform(y, y_lo, y_hi, log_y)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<text x="{_WIDTH / 2:.1f}" y="24" text-anchor="middle" font-size="15">{title}</text>',
        f'<line x1="{_MARGIN_L}" y1="{_HEIGHT - _MARGIN_B}" x2="{_WIDTH - _MARGIN_R}" '
        f'y2="{_HEIGHT - _MARGIN_B}" stroke="black"/>',
        f'<line x1="{_MARGIN_L}" y1="{_MARGIN_T}" x2="{_MARGIN_L}" '
        f'y2="{_HEIGHT - _MARGIN_B}" stroke="black"/>',
        f'<text x="{_WIDTH / 2:.1f}" y="{_HEIGHT - 12}" text-anchor="middle" font-size="12">{xlabel}</text>',
        f'<text x="16" y="{_HEIGHT / 2:.1f}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 16 {_HEIGHT / 2:.1f})">{ylabel}</text>',
    ]
    for lo, hi, horizontal in ((x_lo, x_hi, True), (y_lo, y_hi, False)):
        for v, anchor in ((lo, "start"), (hi, "end")):
            if horizontal:
                parts.append(
                    f'<text x="{px(v):.1f}" y="{_HEIGHT - _MARGIN_B + 16}" '
                    f'text-anchor="middle" font-size="10">{v:.4g}</text>'
                )
            else:
                parts.append(
                    f'<text x="{_MARGIN_L - 6}" y="{py(v):.1f}" '
                    f'text-anchor="end" font-size="10">{v:.4g}</text>'
                )
    for i, (label, xs, ys) in enumerate(series):
        color = _COLORS[i % len(_COLORS)]
        pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xs, ys))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        for x, y in zip(xs, ys):
            parts.append(f'<circle cx="{px(x):.2f}" cy="{py(y):.2f}" r="2.5" fill="{color}"/>')
        parts.append(
            f'<text x="{_WIDTH - _MARGIN_R - 4}" y="{_MARGIN_T + 14 + 14 * i}" '
            f'text-anchor="end" font-size="11" fill="{color}">{label}</text>'
        )
    parts.append("</svg>")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(parts) + "\n")
