import math

import numpy as np
import pytest

from formspect.quadrature import (integrate_over_boundary, integrate_over_mesh,
                                  map_triangle, segment_rule, triangle_rule)


def _exact_tri_moment(i, j):
    # integral of x^i y^j over the reference triangle
    return math.factorial(i) * math.factorial(j) / math.factorial(i + j + 2)


@pytest.mark.parametrize("degree", [0, 1, 2, 3, 4, 5, 6, 8])
def test_triangle_rule_exact_monomials(degree):
    pts, w = triangle_rule(degree)
    assert abs(w.sum() - 0.5) < 1e-14
    for i in range(degree + 1):
        for j in range(degree + 1 - i):
            val = np.sum(w * pts[:, 0] ** i * pts[:, 1] ** j)
            assert abs(val - _exact_tri_moment(i, j)) < 1e-14


@pytest.mark.parametrize("degree", [0, 1, 3, 5, 9])
def test_segment_rule_exact(degree):
    s, w = segment_rule(degree)
    for k in range(degree + 1):
        assert abs(np.sum(w * s ** k) - 1.0 / (k + 1)) < 1e-14


def test_negative_degree_rejected():
    with pytest.raises(ValueError):
        triangle_rule(-1)
    with pytest.raises(ValueError):
        segment_rule(-2)


def test_map_triangle_affine():
    tri = np.array([[1.0, 2.0], [3.0, 2.5], [1.5, 4.0]])
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1 / 3, 1 / 3]])
    mapped = map_triangle(pts, tri)
    assert np.allclose(mapped[:3], tri)
    assert np.allclose(mapped[3], tri.mean(axis=0))


def test_mesh_integrals(unit_square):
    area = integrate_over_mesh(unit_square, lambda x, y: np.ones_like(x), 0)
    assert abs(area - 1.0) < 1e-13
    # exact polynomial moment over the unit square
    val = integrate_over_mesh(unit_square, lambda x, y: x ** 2 * y, 3)
    assert abs(val - 1.0 / 6.0) < 1e-13
    per = integrate_over_boundary(unit_square, lambda x, y: np.ones_like(x), 0)
    assert abs(per - 4.0) < 1e-13


def test_disk_mesh_area(disk_h01):
    # polygonal disk: area = n/2 sin(2 pi / n) R^2 for the boundary n-gon,
    # but interior vertices sit inside, so just check closeness to pi
    area = integrate_over_mesh(disk_h01, lambda x, y: np.ones_like(x), 0)
    assert abs(area - np.pi) < 0.01
