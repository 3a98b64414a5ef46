"""Tiny dependency-free SVG line charts plus gnuplot-friendly .dat dumps.

Output is deterministic: same series in, byte-identical text out (no
timestamps, no dict-order surprises, fixed float formatting).
"""

from __future__ import annotations

import math

__all__ = ["line_chart", "write_svg", "write_dat"]

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")

_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 64.0, 16.0, 28.0, 44.0


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def _ticks(lo: float, hi: float, n: int = 5) -> list:
    if hi <= lo:
        hi = lo + 1.0
    step = (hi - lo) / (n - 1)
    return [lo + i * step for i in range(n)]


def _log_ticks(lo: float, hi: float) -> list:
    lo_d = math.floor(math.log10(lo))
    hi_d = math.ceil(math.log10(hi))
    decades = list(range(lo_d, hi_d + 1))
    if len(decades) > 8:  # thin out long ranges
        keep = max(1, len(decades) // 8 + 1)
        decades = decades[::keep]
    return [10.0 ** d for d in decades]


def line_chart(series, title: str = "", x_label: str = "t", y_label: str = "E",
               log_y: bool = False, width: int = 720, height: int = 480) -> str:
    """Render [(label, xs, ys), ...] to an SVG string.

    With log_y=True, non-positive y values are clipped to the smallest
    positive value present (the usual loss-curve convention).
    """
    if not series:
        raise ValueError("need at least one series")
    xs_all = [x for _, xs, _ in series for x in xs]
    ys_all = [y for _, _, ys in series for y in ys]
    if not xs_all:
        raise ValueError("series are empty")

    x_lo, x_hi = min(xs_all), max(xs_all)
    if log_y:
        pos = [y for y in ys_all if y > 0]
        if not pos:
            raise ValueError("log scale needs at least one positive value")
        y_lo, y_hi = min(pos), max(pos)
        if y_lo == y_hi:
            y_lo, y_hi = y_lo / 10.0, y_hi * 10.0
        ticks_y = _log_ticks(y_lo, y_hi)
        y_lo = min(y_lo, ticks_y[0])
        y_hi = max(y_hi, ticks_y[-1])

        def ty(y):
            y = max(y, y_lo)
            frac = (math.log10(y) - math.log10(y_lo)) / (math.log10(y_hi) - math.log10(y_lo))
            return height - _MARGIN_B - frac * (height - _MARGIN_T - _MARGIN_B)
    else:
        y_lo, y_hi = min(ys_all), max(ys_all)
        if y_lo == y_hi:
            y_lo, y_hi = y_lo - 1.0, y_hi + 1.0
        ticks_y = _ticks(y_lo, y_hi)

        def ty(y):
            frac = (y - y_lo) / (y_hi - y_lo)
            return height - _MARGIN_B - frac * (height - _MARGIN_T - _MARGIN_B)

    if x_lo == x_hi:
        x_lo, x_hi = x_lo - 1.0, x_hi + 1.0

    def tx(x):
        return _MARGIN_L + (x - x_lo) / (x_hi - x_lo) * (width - _MARGIN_L - _MARGIN_R)

    out = []
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">'
    )
    out.append(f'<rect width="{width}" height="{height}" fill="white"/>')
    if title:
        out.append(
            f'<text x="{width / 2:.1f}" y="18" text-anchor="middle" '
            f'font-family="sans-serif" font-size="14">{title}</text>'
        )
    # axes box
    out.append(
        f'<rect x="{_MARGIN_L:.1f}" y="{_MARGIN_T:.1f}" '
        f'width="{width - _MARGIN_L - _MARGIN_R:.1f}" '
        f'height="{height - _MARGIN_T - _MARGIN_B:.1f}" '
        f'fill="none" stroke="#333" stroke-width="1"/>'
    )
    for xt in _ticks(x_lo, x_hi):
        px = tx(xt)
        out.append(
            f'<line x1="{px:.1f}" y1="{height - _MARGIN_B:.1f}" x2="{px:.1f}" '
            f'y2="{height - _MARGIN_B + 4:.1f}" stroke="#333"/>'
        )
        out.append(
            f'<text x="{px:.1f}" y="{height - _MARGIN_B + 16:.1f}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="10">{_fmt(xt)}</text>'
        )
    for yt in ticks_y:
        py = ty(yt)
        out.append(
            f'<line x1="{_MARGIN_L - 4:.1f}" y1="{py:.1f}" x2="{_MARGIN_L:.1f}" '
            f'y2="{py:.1f}" stroke="#333"/>'
        )
        out.append(
            f'<text x="{_MARGIN_L - 6:.1f}" y="{py + 3:.1f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="10">{_fmt(yt)}</text>'
        )
    out.append(
        f'<text x="{(width + _MARGIN_L - _MARGIN_R) / 2:.1f}" y="{height - 8:.1f}" '
        f'text-anchor="middle" font-family="sans-serif" font-size="12">{x_label}</text>'
    )
    out.append(
        f'<text x="14" y="{(height + _MARGIN_T - _MARGIN_B) / 2:.1f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 14 {(height + _MARGIN_T - _MARGIN_B) / 2:.1f})">{y_label}</text>'
    )

    for i, (label, xs, ys) in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{tx(x):.2f},{ty(y):.2f}" for x, y in zip(xs, ys))
        out.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
        ly = _MARGIN_T + 14 + 16 * i
        lx = width - _MARGIN_R - 150
        out.append(
            f'<line x1="{lx:.1f}" y1="{ly - 4:.1f}" x2="{lx + 22:.1f}" y2="{ly - 4:.1f}" '
            f'stroke="{color}" stroke-width="1.5"/>'
        )
        out.append(
            f'<text x="{lx + 28:.1f}" y="{ly:.1f}" font-family="sans-serif" '
            f'font-size="11">{label}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(path, series, **kw) -> None:
    with open(path, "w") as fh:
        fh.write(line_chart(series, **kw))


def write_dat(path, series) -> None:
    """Gnuplot blocks: one '# label' block of `x y` rows per series,
    separated by blank double-lines (use `index` to select)."""
    blocks = []
    for label, xs, ys in series:
        rows = "\n".join(f"{x:.17g} {y:.17g}" for x, y in zip(xs, ys))
        blocks.append(f"# {label}\n{rows}")
    with open(path, "w") as fh:
        fh.write("\n\n\n".join(blocks) + "\n")
