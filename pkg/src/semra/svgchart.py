"""Minimal deterministic SVG line charts.

Hand-rolled so emitted bytes depend only on the data: no timestamps, no
generated ids, no font metrics. Enough for sweep plots, nothing more.
"""

from __future__ import annotations

WIDTH, HEIGHT = 640, 420
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 64, 16, 36, 48
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")
N_TICKS = 5


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _fmt_tick(x: float) -> str:
    return f"{x:.4g}"


def _scale(values, lo, hi, out_lo, out_hi):
    span = hi - lo
    if span <= 0:
        return [(out_lo + out_hi) / 2.0 for _ in values]
    return [out_lo + (v - lo) / span * (out_hi - out_lo) for v in values]


def line_chart(series: dict[str, tuple[list[float], list[float]]], title: str = "",
               xlabel: str = "", ylabel: str = "") -> str:
    """Render named (xs, ys) series as one SVG string with axes and legend."""
    if not series:
        raise ValueError("line_chart needs at least one series")
    all_x = [x for xs, _ in series.values() for x in xs]
    all_y = [y for _, ys in series.values() for y in ys]
    if not all_x:
        raise ValueError("line_chart needs non-empty series")
    x_lo, x_hi = min(all_x), max(all_x)
    y_lo, y_hi = min(all_y), max(all_y)
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 1.0, y_hi + 1.0
    plot_l, plot_r = MARGIN_L, WIDTH - MARGIN_R
    plot_t, plot_b = MARGIN_T, HEIGHT - MARGIN_B

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{(plot_l + plot_r) / 2:.0f}" y="20" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">{title}</text>',
    ]
    # axes
    parts.append(f'<line x1="{plot_l}" y1="{plot_b}" x2="{plot_r}" y2="{plot_b}" '
                 f'stroke="black" stroke-width="1"/>')
    parts.append(f'<line x1="{plot_l}" y1="{plot_t}" x2="{plot_l}" y2="{plot_b}" '
                 f'stroke="black" stroke-width="1"/>')
    for i in range(N_TICKS + 1):
        fx = x_lo + (x_hi - x_lo) * i / N_TICKS
        px = plot_l + (plot_r - plot_l) * i / N_TICKS
        parts.append(f'<line x1="{_fmt(px)}" y1="{plot_b}" x2="{_fmt(px)}" y2="{plot_b + 4}" '
                     f'stroke="black" stroke-width="1"/>')
        parts.append(f'<text x="{_fmt(px)}" y="{plot_b + 18}" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="11">{_fmt_tick(fx)}</text>')
        fy = y_lo + (y_hi - y_lo) * i / N_TICKS
        py = plot_b - (plot_b - plot_t) * i / N_TICKS
        parts.append(f'<line x1="{plot_l - 4}" y1="{_fmt(py)}" x2="{plot_l}" y2="{_fmt(py)}" '
                     f'stroke="black" stroke-width="1"/>')
        parts.append(f'<text x="{plot_l - 8}" y="{_fmt(py + 4)}" text-anchor="end" '
                     f'font-family="sans-serif" font-size="11">{_fmt_tick(fy)}</text>')
    parts.append(f'<text x="{(plot_l + plot_r) / 2:.0f}" y="{HEIGHT - 10}" text-anchor="middle" '
                 f'font-family="sans-serif" font-size="12">{xlabel}</text>')
    parts.append(f'<text x="16" y="{(plot_t + plot_b) / 2:.0f}" text-anchor="middle" '
                 f'font-family="sans-serif" font-size="12" '
                 f'transform="rotate(-90 16 {(plot_t + plot_b) / 2:.0f})">{ylabel}</text>')

    for k, (name, (xs, ys)) in enumerate(sorted(series.items())):
        color = PALETTE[k % len(PALETTE)]
        px = _scale(xs, x_lo, x_hi, plot_l, plot_r)
        py = _scale(ys, y_lo, y_hi, plot_b, plot_t)
        points = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in zip(px, py))
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                     f'points="{points}"/>')
        ly = plot_t + 14 + 16 * k
        parts.append(f'<line x1="{plot_l + 8}" y1="{ly - 4}" x2="{plot_l + 28}" y2="{ly - 4}" '
                     f'stroke="{color}" stroke-width="1.5"/>')
        parts.append(f'<text x="{plot_l + 34}" y="{ly}" font-family="sans-serif" '
                     f'font-size="11">{name}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
