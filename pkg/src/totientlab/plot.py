"""Deterministic SVG figures: predicted-vs-true scatter and residual
histogram, each with a companion CSV of the exact plotted data.

Coordinates are normalized to the canvas in exact rational arithmetic
and only quantized to 6 decimals at render time, so 512-bit values plot
without any float overflow and reruns are byte-identical (no
timestamps, no generated ids).
"""

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable

from .metrics import Histogram, render_decimal

WIDTH = 720
HEIGHT = 480
MARGIN_LEFT = 90
MARGIN_RIGHT = 30
MARGIN_TOP = 40
MARGIN_BOTTOM = 60
PLOT_W = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
PLOT_H = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

POINT_COLOR = "#1f77b4"
LINE_COLOR = "#d62728"
MAX_POINTS = 5000
TICKS = 4


def _fixed6(value: Fraction) -> str:
    """Fixed 6-decimal rendering (half-even), for pixel coordinates."""
    scaled = value * 10 ** 6
    q, rem = divmod(scaled.numerator, scaled.denominator)
    if 2 * rem > scaled.denominator or (2 * rem == scaled.denominator and q % 2):
        q += 1
    sign = "-" if q < 0 else ""
    q = abs(q)
    return f"{sign}{q // 10 ** 6}.{q % 10 ** 6:06d}"


def _exact_str(value) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class PlotSeries:
    """Down-sampled point series with labels; values stay exact."""

    points: tuple
    x_label: str
    y_label: str
    title: str

    def point_strings(self):
        return [(_exact_str(x), _exact_str(y)) for x, y in self.points]


def downsample(values: list, limit: int = MAX_POINTS) -> list:
    """Every k-th element by index, k minimal so the result fits limit."""
    k = -(-len(values) // limit)
    return values[::k] if k > 1 else list(values)


def build_scatter_series(true_values, predicted_values,
                         title: str = "model fit",
                         x_label: str = "true epsilon",
                         y_label: str = "predicted epsilon") -> PlotSeries:
    xs = [Fraction(v) for v in true_values]
    ys = [Fraction(v) for v in predicted_values]
    if len(xs) != len(ys):
        raise ValueError("series lengths differ")
    if not xs:
        raise ValueError("nothing to plot")
    points = downsample(list(zip(xs, ys)))
    return PlotSeries(points=tuple(points), x_label=x_label,
                      y_label=y_label, title=title)


def _axis_range(values):
    lo, hi = min(values), max(values)
    if lo == hi:
        lo, hi = lo - 1, hi + 1
    return lo, hi


def _scale(value, lo, hi, pixel_span):
    return (value - lo) * pixel_span / (hi - lo)


def _x_px(value, lo, hi) -> str:
    return _fixed6(MARGIN_LEFT + _scale(value, lo, hi, Fraction(PLOT_W)))


def _y_px(value, lo, hi) -> str:
    return _fixed6(MARGIN_TOP + PLOT_H - _scale(value, lo, hi, Fraction(PLOT_H)))


def _fit_line(points):
    """Exact OLS of y on x over the plotted points, for the overlay line;
    None when x is degenerate."""
    n = len(points)
    if n < 2:
        return None
    sx = sum(x for x, _ in points)
    sy = sum(y for _, y in points)
    sxy = sum(x * y for x, y in points)
    sxx = sum(x * x for x, _ in points)
    det = n * sxx - sx * sx
    if det == 0:
        return None
    slope = (n * sxy - sx * sy) / det
    intercept = (sy - slope * sx) / n
    return slope, intercept


def _svg_open(title: str) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        '<rect x="0" y="0" width="100%" height="100%" fill="#ffffff"/>',
        f'<text x="{WIDTH // 2}" y="24" text-anchor="middle" '
        f'font-size="16" font-family="monospace">{title}</text>',
    ]


def _axes(x_label: str, y_label: str) -> list[str]:
    bottom = MARGIN_TOP + PLOT_H
    right = MARGIN_LEFT + PLOT_W
    return [
        f'<line x1="{MARGIN_LEFT}" y1="{bottom}" x2="{right}" y2="{bottom}" '
        'stroke="#000000" stroke-width="1"/>',
        f'<line x1="{MARGIN_LEFT}" y1="{MARGIN_TOP}" x2="{MARGIN_LEFT}" '
        f'y2="{bottom}" stroke="#000000" stroke-width="1"/>',
        f'<text x="{MARGIN_LEFT + PLOT_W // 2}" y="{HEIGHT - 12}" '
        f'text-anchor="middle" font-size="12" font-family="monospace">'
        f'{x_label}</text>',
        f'<text x="16" y="{MARGIN_TOP + PLOT_H // 2}" text-anchor="middle" '
        f'font-size="12" font-family="monospace" '
        f'transform="rotate(-90 16 {MARGIN_TOP + PLOT_H // 2})">'
        f'{y_label}</text>',
    ]


def _tick_values(lo, hi, count=TICKS):
    return [lo + (hi - lo) * i / count for i in range(count + 1)]


def _x_ticks(lo, hi) -> list[str]:
    bottom = MARGIN_TOP + PLOT_H
    out = []
    for value in _tick_values(lo, hi):
        px = _x_px(value, lo, hi)
        out.append(f'<line x1="{px}" y1="{bottom}" x2="{px}" '
                   f'y2="{bottom + 5}" stroke="#000000" stroke-width="1"/>')
        out.append(f'<text x="{px}" y="{bottom + 18}" text-anchor="middle" '
                   f'font-size="10" font-family="monospace">'
                   f'{render_decimal(value, 6)}</text>')
    return out


def _y_ticks(lo, hi) -> list[str]:
    out = []
    for value in _tick_values(lo, hi):
        py = _y_px(value, lo, hi)
        out.append(f'<line x1="{MARGIN_LEFT - 5}" y1="{py}" '
                   f'x2="{MARGIN_LEFT}" y2="{py}" stroke="#000000" '
                   'stroke-width="1"/>')
        out.append(f'<text x="{MARGIN_LEFT - 8}" y="{py}" text-anchor="end" '
                   f'font-size="10" font-family="monospace">'
                   f'{render_decimal(value, 6)}</text>')
    return out


def _embedded_csv(rows: Iterable[str]) -> str:
    body = "\n".join(rows)
    return f"<!--plotdata\n{body}\n-->"


def _write(destination, text: str) -> None:
    if isinstance(destination, (str, Path)):
        Path(destination).write_text(text, encoding="utf-8")
    else:
        destination.write(text)


def scatter_svg(true_values, predicted_values, destination,
                title: str = "model fit") -> PlotSeries:
    """Scatter of predicted against true values with an exact OLS overlay
    line; returns the (down-sampled) series that was drawn."""
    series = build_scatter_series(true_values, predicted_values, title)
    xs = [p[0] for p in series.points]
    ys = [p[1] for p in series.points]
    x_lo, x_hi = _axis_range(xs)
    y_lo, y_hi = _axis_range(ys)

    parts = _svg_open(series.title)
    parts.extend(_axes(series.x_label, series.y_label))
    parts.extend(_x_ticks(x_lo, x_hi))
    parts.extend(_y_ticks(y_lo, y_hi))

    line = _fit_line(series.points)
    if line is not None:
        slope, intercept = line
        y_at = lambda x: slope * x + intercept
        parts.append(
            f'<line x1="{_x_px(x_lo, x_lo, x_hi)}" '
            f'y1="{_y_px(min(max(y_at(x_lo), y_lo), y_hi), y_lo, y_hi)}" '
            f'x2="{_x_px(x_hi, x_lo, x_hi)}" '
            f'y2="{_y_px(min(max(y_at(x_hi), y_lo), y_hi), y_lo, y_hi)}" '
            f'stroke="{LINE_COLOR}" stroke-width="1.5"/>')

    for x, y in series.points:
        parts.append(f'<circle cx="{_x_px(x, x_lo, x_hi)}" '
                     f'cy="{_y_px(y, y_lo, y_hi)}" r="2" '
                     f'fill="{POINT_COLOR}"/>')

    rows = ["x,y"] + [f"{a},{b}" for a, b in series.point_strings()]
    parts.append(_embedded_csv(rows))
    parts.append("</svg>")
    _write(destination, "\n".join(parts) + "\n")
    return series


def series_csv(series: PlotSeries, destination) -> None:
    rows = ["x,y"] + [f"{a},{b}" for a, b in series.point_strings()]
    _write(destination, "\n".join(rows) + "\n")


def histogram_svg(hist: Histogram, destination,
                  title: str = "residual distribution") -> None:
    """Bar chart of a residual histogram; zero is marked when in range."""
    counts = hist.counts
    edges = [Fraction(e) for e in hist.edges]
    peak = max(counts)
    if peak == 0:
        raise ValueError("histogram has no observations")
    x_lo, x_hi = edges[0], edges[-1]

    parts = _svg_open(title)
    parts.extend(_axes("residual", "count"))
    parts.extend(_x_ticks(x_lo, x_hi))
    parts.extend(_y_ticks(Fraction(0), Fraction(peak)))

    bottom = MARGIN_TOP + PLOT_H
    for i, count in enumerate(counts):
        if count == 0:
            continue
        left = MARGIN_LEFT + _scale(edges[i], x_lo, x_hi, Fraction(PLOT_W))
        right = MARGIN_LEFT + _scale(edges[i + 1], x_lo, x_hi, Fraction(PLOT_W))
        height = _scale(Fraction(count), Fraction(0), Fraction(peak),
                        Fraction(PLOT_H))
        parts.append(
            f'<rect x="{_fixed6(left)}" y="{_fixed6(bottom - height)}" '
            f'width="{_fixed6(right - left)}" height="{_fixed6(height)}" '
            f'fill="{POINT_COLOR}" stroke="#ffffff" stroke-width="0.5"/>')

    if x_lo <= 0 <= x_hi:
        zero_px = _x_px(Fraction(0), x_lo, x_hi)
        parts.append(f'<line x1="{zero_px}" y1="{MARGIN_TOP}" '
                     f'x2="{zero_px}" y2="{bottom}" stroke="{LINE_COLOR}" '
                     'stroke-width="1" stroke-dasharray="4 3"/>')

    rows = ["bin_lo,bin_hi,count"] + [
        f"{_exact_str(edges[i])},{_exact_str(edges[i + 1])},{c}"
        for i, c in enumerate(counts)
    ]
    parts.append(_embedded_csv(rows))
    parts.append("</svg>")
    _write(destination, "\n".join(parts) + "\n")


def histogram_csv(hist: Histogram, destination) -> None:
    edges = [Fraction(e) for e in hist.edges]
    rows = ["bin_lo,bin_hi,count"] + [
        f"{_exact_str(edges[i])},{_exact_str(edges[i + 1])},{c}"
        for i, c in enumerate(hist.counts)
    ]
    _write(destination, "\n".join(rows) + "\n")
