"""Standalone SVG line charts, byte-deterministic for fixed input.

Hand-rolled rather than delegated to a plotting library so repeated report
runs produce identical bytes (no embedded timestamps, randomized ids, or
font-dependent layout).
"""

from __future__ import annotations

from pathlib import Path

from .errors import InvalidArgumentError

_WIDTH = 840
_HEIGHT = 480
_MARGIN_LEFT = 70
_MARGIN_RIGHT = 30
_MARGIN_TOP = 40
_MARGIN_BOTTOM = 50

_PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b")


def _fmt(value: float) -> str:
    return f"{value:.2f}"


def _tick_values(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi == lo:
        return [lo]
    step = (hi - lo) / (count - 1)
    return [lo + i * step for i in range(count)]


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def emit_plot(curves, path, title: str = "", x_label: str = "", y_label: str = "") -> None:
    """Write a line chart of one or more named curves.

    ``curves`` is an ordered mapping or list of ``(label, values)`` pairs;
    values are plotted against their index. A legend appears when there is
    more than one curve. Empty input is an error and writes nothing.
    """
    if hasattr(curves, "items"):
        curves = list(curves.items())
    else:
        curves = list(curves)
    if not curves:
        raise InvalidArgumentError("emit_plot needs at least one curve")
    series = []
    for label, values in curves:
        values = [float(v) for v in values]
        if not values:
            raise InvalidArgumentError(f"curve {label!r} has no points")
        series.append((str(label), values))

    x_max = max(len(v) - 1 for _, v in series)
    y_lo = min(min(v) for _, v in series)
    y_hi = max(max(v) for _, v in series)
    if y_hi == y_lo:
        y_lo -= 0.5
        y_hi += 0.5
    pad = 0.05 * (y_hi - y_lo)
    y_lo -= pad
    y_hi += pad

    plot_w = _WIDTH - _MARGIN_LEFT - _MARGIN_RIGHT
    plot_h = _HEIGHT - _MARGIN_TOP - _MARGIN_BOTTOM

    def sx(x: float) -> float:
        if x_max == 0:
            return _MARGIN_LEFT + plot_w / 2.0
        return _MARGIN_LEFT + (x / x_max) * plot_w

    def sy(y: float) -> float:
        return _MARGIN_TOP + (1.0 - (y - y_lo) / (y_hi - y_lo)) * plot_h

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect x="0" y="0" width="{_WIDTH}" height="{_HEIGHT}" fill="#ffffff"/>',
    ]
    if title:
        lines.append(
            f'<text x="{_WIDTH // 2}" y="24" text-anchor="middle" '
            f'font-family="sans-serif" font-size="16">{_escape(title)}</text>'
        )

    axis_y = _MARGIN_TOP + plot_h
    lines.append(
        f'<line x1="{_MARGIN_LEFT}" y1="{_MARGIN_TOP}" x2="{_MARGIN_LEFT}" y2="{axis_y}" '
        'stroke="#000000" stroke-width="1"/>'
    )
    lines.append(
        f'<line x1="{_MARGIN_LEFT}" y1="{axis_y}" x2="{_MARGIN_LEFT + plot_w}" y2="{axis_y}" '
        'stroke="#000000" stroke-width="1"/>'
    )

    for tick in _tick_values(0.0, float(x_max)):
        px = sx(tick)
        lines.append(
            f'<line x1="{_fmt(px)}" y1="{axis_y}" x2="{_fmt(px)}" y2="{axis_y + 5}" '
            'stroke="#000000" stroke-width="1"/>'
        )
        lines.append(
            f'<text x="{_fmt(px)}" y="{axis_y + 20}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{tick:.4g}</text>'
        )
    for tick in _tick_values(y_lo, y_hi):
        py = sy(tick)
        lines.append(
            f'<line x1="{_MARGIN_LEFT - 5}" y1="{_fmt(py)}" x2="{_MARGIN_LEFT}" y2="{_fmt(py)}" '
            'stroke="#000000" stroke-width="1"/>'
        )
        lines.append(
            f'<text x="{_MARGIN_LEFT - 8}" y="{_fmt(py + 4)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{tick:.4g}</text>'
        )
    if x_label:
        lines.append(
            f'<text x="{_MARGIN_LEFT + plot_w // 2}" y="{_HEIGHT - 10}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12">{_escape(x_label)}</text>'
        )
    if y_label:
        cy = _MARGIN_TOP + plot_h // 2
        lines.append(
            f'<text x="18" y="{cy}" text-anchor="middle" font-family="sans-serif" '
            f'font-size="12" transform="rotate(-90 18 {cy})">{_escape(y_label)}</text>'
        )

    for i, (label, values) in enumerate(series):
        color = _PALETTE[i % len(_PALETTE)]
        points = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in enumerate(values))
        lines.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{points}"/>'
        )

    if len(series) > 1:
        legend_x = _MARGIN_LEFT + 12
        legend_y = _MARGIN_TOP + 10
        for i, (label, _) in enumerate(series):
            color = _PALETTE[i % len(_PALETTE)]
            ly = legend_y + i * 18
            lines.append(
                f'<line x1="{legend_x}" y1="{ly}" x2="{legend_x + 22}" y2="{ly}" '
                f'stroke="{color}" stroke-width="2"/>'
            )
            lines.append(
                f'<text x="{legend_x + 28}" y="{ly + 4}" font-family="sans-serif" '
                f'font-size="12">{_escape(label)}</text>'
            )

    lines.append("</svg>")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
