"""Tiny static SVG line charts, written directly (no plotting stack).

Deterministic output: same data, same bytes.  Used by the CLI for the
optional visual companions to its CSV artifacts.
"""

from __future__ import annotations

import math

__all__ = ["line_chart"]

_COLORS = ("#1f6fb2", "#c44e52", "#55a868", "#8172b3", "#937860")


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _ticks(lo: float, hi: float, n: int = 5):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10.0 ** math.floor(math.log10(raw))
    step = min(s * mag for s in (1, 2, 5, 10) if s * mag >= raw)
    t = math.ceil(lo / step) * step
    out = []
    while t <= hi + 1e-12 * step:
        out.append(t)
        t += step
    return out


def line_chart(
    series,
    path,
    title: str = "",
    x_label: str = "",
    y_label: str = "",
    log_y: bool = False,
    width: int = 720,
    height: int = 480,
):
    """Write an SVG chart of ``series`` = [(name, xs, ys), ...] to path."""
    pad_l, pad_r, pad_t, pad_b = 64, 16, 28, 44
    xs_all = [x for _, xs, _ in series for x in xs]
    ys_all = [y for _, _, ys in series for y in ys if not log_y or y > 0]
    if not xs_all or not ys_all:
        raise ValueError("nothing to plot")
    tr_y = (lambda v: math.log10(v)) if log_y else (lambda v: v)
    x_lo, x_hi = min(xs_all), max(xs_all)
    y_lo, y_hi = min(tr_y(y) for y in ys_all), max(tr_y(y) for y in ys_all)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    span_x = x_hi - x_lo
    span_y = (y_hi - y_lo) * 1.05

    def px(x):
        return pad_l + (x - x_lo) / span_x * (width - pad_l - pad_r)

    def py(y):
        return height - pad_b - (tr_y(y) - y_lo) / span_y * (height - pad_t - pad_b)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.0f}" y="18" text-anchor="middle" font-size="14">{title}</text>',
    ]
    axis = f'stroke="#333" stroke-width="1"'
    parts.append(
        f'<line x1="{pad_l}" y1="{height - pad_b}" x2="{width - pad_r}" y2="{height - pad_b}" {axis}/>'
    )
    parts.append(f'<line x1="{pad_l}" y1="{pad_t}" x2="{pad_l}" y2="{height - pad_b}" {axis}/>')
    for t in _ticks(x_lo, x_hi):
        parts.append(
            f'<line x1="{_fmt(px(t))}" y1="{height - pad_b}" x2="{_fmt(px(t))}" '
            f'y2="{height - pad_b + 4}" {axis}/>'
            f'<text x="{_fmt(px(t))}" y="{height - pad_b + 18}" text-anchor="middle">{t:g}</text>'
        )
    for t in _ticks(y_lo, y_lo + span_y):
        label = f"1e{t:g}" if log_y else f"{t:g}"
        yy = height - pad_b - (t - y_lo) / span_y * (height - pad_t - pad_b)
        parts.append(
            f'<line x1="{pad_l - 4}" y1="{_fmt(yy)}" x2="{pad_l}" y2="{_fmt(yy)}" {axis}/>'
            f'<text x="{pad_l - 8}" y="{_fmt(yy + 4)}" text-anchor="end">{label}</text>'
        )
    if x_label:
        parts.append(
            f'<text x="{width / 2:.0f}" y="{height - 8}" text-anchor="middle">{x_label}</text>'
        )
    if y_label:
        parts.append(
            f'<text x="14" y="{height / 2:.0f}" text-anchor="middle" '
            f'transform="rotate(-90 14 {height / 2:.0f})">{y_label}</text>'
        )
    for i, (name, xs, ys) in enumerate(series):
        color = _COLORS[i % len(_COLORS)]
        pts = " ".join(
            f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in zip(xs, ys) if not log_y or y > 0
        )
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        parts.append(
            f'<text x="{width - pad_r - 6}" y="{pad_t + 16 * (i + 1)}" text-anchor="end" '
            f'fill="{color}">{name}</text>'
        )
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts) + "\n")
