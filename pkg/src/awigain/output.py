"""CSV and SVG emission for sweeps and contours."""

import math
from xml.sax.saxutils import escape

from . import __version__

_SKIP_META = ("version", "generated")


def fmt(value):
    """9 significant digits, the precision of every numeric output."""
    return f"{value:.9g}"


def _header(metadata, timestamp):
    lines = [f"# awi-gain v{__version__}"]
    if timestamp and "generated" in metadata:
        lines.append(f"# generated={metadata['generated']}")
    lines.extend(f"# {k}={v}" for k, v in metadata.items() if k not in _SKIP_META)
    return lines


def sweep_csv(result, timestamp=True):
    lines = _header(result.metadata, timestamp)
    lines.append("x,alpha_scaled")
    lines.extend(f"{fmt(x)},{fmt(a)}" for x, a in result.points)
    return "\n".join(lines) + "\n"


def contour_csv(contours, metadata, timestamp=True):
    """One contour gives ``p,pop_ratio`` rows; a family adds a leading level column."""
    lines = _header(metadata, timestamp)
    if len(contours) == 1:
        lines.append("p,pop_ratio")
        lines.extend(f"{fmt(p)},{fmt(r)}" for p, r in contours[0].points)
    else:
        lines.append("level,p,pop_ratio")
        for contour in contours:
            lines.extend(f"{fmt(contour.level)},{fmt(p)},{fmt(r)}" for p, r in contour.points)
    return "\n".join(lines) + "\n"


WIDTH, HEIGHT = 640, 480
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 70, 20, 40, 50
_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _nice_ticks(low, high, count=5):
    span = high - low
    raw = span / count
    magnitude = 10 ** math.floor(math.log10(raw))
    for step in (1, 2, 2.5, 5, 10):
        if step * magnitude >= raw:
            step *= magnitude
            break
    first = math.ceil(low / step) * step
    ticks = []
    t = first
    while t <= high + 1e-9 * span:
        ticks.append(0.0 if abs(t) < 1e-12 * span else t)
        t += step
    return ticks


def svg_plot(series, xlabel, ylabel, title=""):
    """Minimal SVG 1.1 line plot.

    ``series`` is a list of (label, points) pairs; empty series are skipped
    in the bounds computation.
    """
    xs = [x for _, pts in series for x, _ in pts]
    ys = [y for _, pts in series for _, y in pts]
    if not xs:
        xs, ys = [0.0, 1.0], [0.0, 1.0]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad
    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def sx(x):
        return MARGIN_LEFT + (x - x0) / (x1 - x0) * plot_w

    def sy(y):
        return MARGIN_TOP + (y1 - y) / (y1 - y0) * plot_h

    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{plot_w}" height="{plot_h}" '
        'fill="none" stroke="black"/>',
    ]
    for t in _nice_ticks(x0, x1):
        px = sx(t)
        out.append(f'<line x1="{px:.2f}" y1="{MARGIN_TOP + plot_h}" x2="{px:.2f}" '
                   f'y2="{MARGIN_TOP + plot_h + 5}" stroke="black"/>')
        out.append(f'<text x="{px:.2f}" y="{MARGIN_TOP + plot_h + 18}" font-size="11" '
                   f'text-anchor="middle">{fmt(t)}</text>')
    for t in _nice_ticks(y0, y1):
        py = sy(t)
        out.append(f'<line x1="{MARGIN_LEFT - 5}" y1="{py:.2f}" x2="{MARGIN_LEFT}" '
                   f'y2="{py:.2f}" stroke="black"/>')
        out.append(f'<text x="{MARGIN_LEFT - 8}" y="{py + 4:.2f}" font-size="11" '
                   f'text-anchor="end">{fmt(t)}</text>')
    if y0 < 0 < y1:
        out.append(f'<line x1="{MARGIN_LEFT}" y1="{sy(0):.2f}" x2="{MARGIN_LEFT + plot_w}" '
                   f'y2="{sy(0):.2f}" stroke="gray" stroke-dasharray="4 3"/>')
    for i, (label, pts) in enumerate(series):
        if not pts:
            continue
        color = _COLORS[i % len(_COLORS)]
        coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{coords}"/>')
        if label:
            lx, ly = pts[-1]
            out.append(f'<text x="{min(sx(lx), WIDTH - 5):.2f}" y="{sy(ly) - 4:.2f}" '
                       f'font-size="10" text-anchor="end" fill="{color}">{escape(label)}</text>')
    out.append(f'<text x="{MARGIN_LEFT + plot_w / 2:.2f}" y="{HEIGHT - 12}" font-size="13" '
               f'text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="16" y="{MARGIN_TOP + plot_h / 2:.2f}" font-size="13" '
               f'text-anchor="middle" transform="rotate(-90 16 {MARGIN_TOP + plot_h / 2:.2f})">'
               f'{escape(ylabel)}</text>')
    if title:
        out.append(f'<text x="{WIDTH / 2:.2f}" y="24" font-size="14" '
                   f'text-anchor="middle">{escape(title)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
