"""Exact quadrature rules on straight triangles and boundary segments.

Triangle rules are built by the Duffy (collapsed square) transform from
tensor Gauss-Legendre rules.  An (m x m) tensor rule integrates bivariate
polynomials of total degree <= m - 1 exactly on the reference triangle
{(x, y): x, y >= 0, x + y <= 1}, because the collapsed integrand has
degree at most 2d + 1 in the first coordinate.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def triangle_rule(degree: int) -> tuple[np.ndarray, np.ndarray]:
    """Points (k, 2) and weights (k,) exact for total degree `degree`.

    Weights sum to 1/2 (area of the reference triangle).
    """
    if degree < 0:
        raise ValueError("degree must be >= 0")
    m = degree + 1
    gx, gw = np.polynomial.legendre.leggauss(m)
    u = 0.5 * (gx + 1.0)  # nodes on [0, 1]
    wu = 0.5 * gw
    U, V = np.meshgrid(u, u, indexing="ij")
    WU, WV = np.meshgrid(wu, wu, indexing="ij")
    x = U
    y = V * (1.0 - U)
    w = WU * WV * (1.0 - U)  # Duffy Jacobian
    pts = np.column_stack([x.ravel(), y.ravel()])
    return pts, w.ravel()


@lru_cache(maxsize=None)
def segment_rule(degree: int) -> tuple[np.ndarray, np.ndarray]:
    """Points and weights on [0, 1] exact for 1D polynomials of `degree`."""
    if degree < 0:
        raise ValueError("degree must be >= 0")
    m = degree // 2 + 1
    gx, gw = np.polynomial.legendre.leggauss(m)
    return 0.5 * (gx + 1.0), 0.5 * gw


def map_triangle(points: np.ndarray, tri_coords: np.ndarray) -> np.ndarray:
    """Map reference points (k, 2) to a physical triangle (3, 2)."""
    a, b, c = tri_coords
    return a + np.outer(points[:, 0], b - a) + np.outer(points[:, 1], c - a)


def integrate_over_mesh(mesh, func, degree: int) -> float:
    """Integrate func(x, y) -> (k,) samples over all mesh triangles."""
    pts, w = triangle_rule(degree)
    total = 0.0
    verts = mesh.vertices
    for tri in mesh.triangles:
        tc = verts[tri]
        e1, e2 = tc[1] - tc[0], tc[2] - tc[0]
        area2 = abs(e1[0] * e2[1] - e1[1] * e2[0])
        xy = map_triangle(pts, tc)
        total += area2 * np.dot(w, func(xy[:, 0], xy[:, 1]))
    return total


def integrate_over_boundary(mesh, func, degree: int) -> float:
    """Integrate func(x, y) -> (k,) samples over all boundary facets."""
    s, w = segment_rule(degree)
    total = 0.0
    verts = mesh.vertices
    for facet in mesh.boundary_facets:
        a, b = verts[facet.endpoints[0]], verts[facet.endpoints[1]]
        xy = a + np.outer(s, b - a)
        total += facet.length * np.dot(w, func(xy[:, 0], xy[:, 1]))
    return total
