import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from vortexps.svg import contour_plot, line_plot, marching_squares


def test_linear_field_contour_is_a_line():
    x = np.linspace(0, 1, 11)
    y = np.linspace(0, 2, 21)
    Z = x[None, :] + 0 * y[:, None]
    segs = marching_squares(x, y, Z, 0.55)
    assert len(segs) == 20
    for p, q in segs:
        assert p[0] == pytest.approx(0.55) and q[0] == pytest.approx(0.55)


def test_circle_contour():
    x = y = np.linspace(-2, 2, 81)
    Z = np.hypot(x[None, :], y[:, None])
    segs = marching_squares(x, y, Z, 1.0)
    pts = np.array([p for s in segs for p in s])
    np.testing.assert_allclose(np.hypot(pts[:, 0], pts[:, 1]), 1.0, atol=2e-3)
    length = sum(math.dist(p, q) for p, q in segs)
    assert length == pytest.approx(2 * math.pi, rel=1e-3)


@pytest.mark.parametrize("level,cut", [(-0.5, [(1, 0), (0, 1)]), (0.5, [(0, 0), (1, 1)])])
def test_saddle_cell(level, cut):
    # high corners at (0,0), (1,1); the centre value 0 decides which pair is joined,
    # and each segment cuts off one corner of the opposite pair
    x = y = np.array([0.0, 1.0])
    Z = np.array([[1.0, -1.0], [-1.0, 1.0]])
    segs = marching_squares(x, y, Z, level)
    assert len(segs) == 2
    got = sorted(min(cut, key=lambda c: math.dist(c, np.mean([p, q], axis=0))) for p, q in segs)
    assert got == sorted(cut)


def test_non_finite_cells_skipped():
    x = y = np.linspace(0, 1, 3)
    Z = np.array([[0, 1, 2], [0, np.nan, 2], [0, 1, 2]], float)
    assert marching_squares(x, y, Z, 0.5) == []


def test_line_plot_is_valid_svg():
    doc = line_plot([("a", [1, 10, 100], [1, 2, np.nan]), ("b & c", [1, 100], [3, 4])],
                    "alpha", "psi", "t<1>", logx=True)
    root = ET.fromstring(doc.encode())
    ns = "{http://www.w3.org/2000/svg}"
    assert root.tag == ns + "svg"
    assert len(root.findall(ns + "polyline")) == 2
    assert len(root.findall(ns + "circle")) == 4


def test_contour_plot_is_valid_svg():
    x = y = np.linspace(-2, 2, 41)
    Z = np.hypot(x[None, :], y[:, None]) + 0.1
    Z[0, 0] = 0.0
    root = ET.fromstring(contour_plot(x, y, Z, [0.5, 1.0]).encode())
    assert len(root.findall("{http://www.w3.org/2000/svg}line")) > 40
