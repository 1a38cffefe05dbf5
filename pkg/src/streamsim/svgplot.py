"""Minimal self-contained SVG line plots (no plotting dependency)."""

from __future__ import annotations

from typing import Sequence

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def line_plot_svg(series: dict[str, Sequence[tuple[float, float]]],
                  title: str, x_label: str, y_label: str,
                  width: int = 640, height: int = 400) -> str:
    """Render named (x, y) series as an SVG document string."""
    pad_l, pad_r, pad_t, pad_b = 60, 20, 36, 46
    pts = [p for s in series.values() for p in s]
    if not pts:
        xs = ys = (0.0, 1.0)
    else:
        xs = (min(p[0] for p in pts), max(p[0] for p in pts))
        ys = (min(p[1] for p in pts), max(p[1] for p in pts))
    x0, x1 = xs if xs[0] < xs[1] else (xs[0], xs[0] + 1.0)
    y0, y1 = ys if ys[0] < ys[1] else (ys[0], ys[0] + 1.0)
    plot_w = width - pad_l - pad_r
    plot_h = height - pad_t - pad_b

    def sx(x: float) -> float:
        return pad_l + (x - x0) / (x1 - x0) * plot_w

    def sy(y: float) -> float:
        return pad_t + plot_h - (y - y0) / (y1 - y0) * plot_h

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.0f}" y="20" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">{title}</text>',
        f'<line x1="{pad_l}" y1="{pad_t + plot_h}" x2="{pad_l + plot_w}" '
        f'y2="{pad_t + plot_h}" stroke="black"/>',
        f'<line x1="{pad_l}" y1="{pad_t}" x2="{pad_l}" '
        f'y2="{pad_t + plot_h}" stroke="black"/>',
        f'<text x="{width / 2:.0f}" y="{height - 10}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12">{x_label}</text>',
        f'<text x="16" y="{height / 2:.0f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 16 {height / 2:.0f})">{y_label}</text>',
    ]
    for tick in range(5):
        xv = x0 + (x1 - x0) * tick / 4
        yv = y0 + (y1 - y0) * tick / 4
        out.append(f'<text x="{sx(xv):.1f}" y="{pad_t + plot_h + 16}" '
                   f'text-anchor="middle" font-family="sans-serif" '
                   f'font-size="10">{xv:.3g}</text>')
        out.append(f'<text x="{pad_l - 6}" y="{sy(yv) + 3:.1f}" '
                   f'text-anchor="end" font-family="sans-serif" '
                   f'font-size="10">{yv:.3g}</text>')
    for i, (name, s) in enumerate(series.items()):
        color = _COLORS[i % len(_COLORS)]
        path = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in s)
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="2" '
                   f'points="{path}"/>')
        out.append(f'<text x="{pad_l + plot_w - 6}" y="{pad_t + 14 + 14 * i}" '
                   f'text-anchor="end" font-family="sans-serif" '
                   f'font-size="11" fill="{color}">{name}</text>')
    out.append("</svg>")
    return "\n".join(out)
