import io
import xml.etree.ElementTree as ET
from fractions import Fraction

import pytest

from totientlab.metrics import HistogramSpec, histogram
from totientlab.plot import (build_scatter_series, downsample, histogram_csv,
                             histogram_svg, scatter_svg, series_csv)


def _render_scatter(true_values, predicted) -> str:
    buf = io.StringIO()
    scatter_svg(true_values, predicted, buf)
    return buf.getvalue()


def test_scatter_identity_structure():
    svg = _render_scatter([0, 1, 2], [0, 1, 2])
    assert svg.count("<circle") == 3
    assert svg.count("<line") >= 1  # fitted line present
    ET.fromstring(svg)  # valid XML


def test_scatter_is_deterministic():
    a = _render_scatter([0, 5, 9], [1, 4, 8])
    b = _render_scatter([0, 5, 9], [1, 4, 8])
    assert a == b


def test_scatter_downsamples_to_limit():
    n = 10 ** 4
    svg = _render_scatter(list(range(n)), list(range(n)))
    assert svg.count("<circle") <= 5000


def test_downsample_rule():
    assert downsample(list(range(10)), limit=5) == [0, 2, 4, 6, 8]
    assert downsample(list(range(4)), limit=5) == [0, 1, 2, 3]
    assert len(downsample(list(range(12001)), limit=5000)) <= 5000


def test_scatter_embedded_csv_round_trips_points():
    values = [0, 7, 13]
    preds = [Fraction(1, 2), 7, 12]
    svg = _render_scatter(values, preds)
    start = svg.index("<!--plotdata\n") + len("<!--plotdata\n")
    end = svg.index("\n-->", start)
    lines = svg[start:end].splitlines()
    assert lines[0] == "x,y"
    assert lines[1:] == ["0,1/2", "7,7", "13,12"]


def test_scatter_handles_512_bit_values():
    xs = [1 << 511, (1 << 511) + (1 << 400), 1 << 512]
    ys = [x // 2 for x in xs]
    svg = _render_scatter(xs, ys)
    ET.fromstring(svg)
    assert svg.count("<circle") == 3


def test_scatter_validates_input():
    with pytest.raises(ValueError):
        _render_scatter([1, 2], [1])
    with pytest.raises(ValueError):
        _render_scatter([], [])


def test_series_csv_matches_embedded_data(tmp_path):
    series = build_scatter_series([1, 2, 3], [2, 4, 6])
    path = tmp_path / "s.csv"
    series_csv(series, path)
    assert path.read_text() == "x,y\n1,2\n2,4\n3,6\n"


def test_histogram_svg_bar_heights_proportional():
    hist = histogram([Fraction(-1), Fraction(1), Fraction(1)],
                     HistogramSpec(2))
    assert hist.counts == (1, 2)
    buf = io.StringIO()
    histogram_svg(hist, buf)
    svg = buf.getvalue()
    ET.fromstring(svg)
    rects = [line for line in svg.splitlines()
             if line.startswith("<rect") and "height=" in line
             and "100%" not in line]
    assert len(rects) == 2
    heights = [float(r.split('height="')[1].split('"')[0]) for r in rects]
    assert abs(heights[1] - 2 * heights[0]) < 1e-6
    assert "stroke-dasharray" in svg  # zero marker inside the range


def test_histogram_degenerate_single_bar():
    hist = histogram([Fraction(4)] * 5, HistogramSpec(3))
    buf = io.StringIO()
    histogram_svg(hist, buf)
    svg = buf.getvalue()
    rects = [line for line in svg.splitlines()
             if line.startswith("<rect") and "100%" not in line]
    assert len(rects) == 1


def test_histogram_svg_deterministic():
    hist = histogram([Fraction(i, 3) for i in range(-6, 7)])
    out = []
    for _ in range(2):
        buf = io.StringIO()
        histogram_svg(hist, buf)
        out.append(buf.getvalue())
    assert out[0] == out[1]


def test_histogram_csv(tmp_path):
    hist = histogram([Fraction(-1), Fraction(0), Fraction(1)],
                     HistogramSpec(2))
    path = tmp_path / "h.csv"
    histogram_csv(hist, path)
    assert path.read_text() == "bin_lo,bin_hi,count\n-1,0,1\n0,1,2\n"
