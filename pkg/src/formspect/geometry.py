"""Geometric quantities on the curvature side of the eigenvalue estimates.

Conventions: x0 is an interior base point, rho(x) = |x - x0|^2 / 2, and the
boundary support function is evaluated with the stored outward facet normal,
h = <x_mid - x0, outward_normal>.  The comparison function H below solves
the Riccati equation H' + H^2 + kappa = 0 with r*H(r)/(n-1) -> 1 at r -> 0.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np
from shapely.geometry import Point, Polygon

from .mesh import Mesh, cross2


@dataclass(frozen=True)
class GeometryReport:
    x0: tuple[float, float]
    r_max: float
    h_values: np.ndarray
    h_min: float
    h_max: float
    star_shaped: bool
    convex: bool
    dimension: int = 2

    def to_dict(self) -> dict:
        d = asdict(self)
        d["h_values"] = [float(v) for v in self.h_values]
        return d


@dataclass(frozen=True)
class CurvatureConstants:
    kappa1: float
    kappa2: float
    p: int
    n: int
    C2: float
    beta_lower: float
    beta_upper: float
    C0: float


def riccati_H(kappa: float, n: int, r: float) -> float:
    """Closed-form comparison mean curvature at distance r."""
    if n < 2:
        raise ValueError("dimension must be >= 2")
    if r <= 0:
        raise ValueError("r must be positive")
    if kappa > 0:
        sk = np.sqrt(kappa)
        if r >= np.pi / sk:
            raise ValueError("r must be below pi/sqrt(kappa) for kappa > 0")
        return (n - 1) * sk / np.tan(sk * r)
    if kappa == 0:
        return (n - 1) / r
    sk = np.sqrt(-kappa)
    return (n - 1) * sk / np.tanh(sk * r)


def _rH_extrema(kappa: float, n: int, r_max: float) -> tuple[float, float]:
    """(min, max) of r*H_kappa(r) over (0, r_max].

    r*H is constant (= n-1) for kappa = 0, increasing for kappa < 0 and
    decreasing for kappa > 0, so the extrema sit at the interval endpoints,
    with the r -> 0 limit value n - 1.
    """
    if kappa == 0:
        return float(n - 1), float(n - 1)
    end = r_max * riccati_H(kappa, n, r_max)
    if kappa < 0:
        return float(n - 1), float(end)
    return float(end), float(n - 1)


def constant_C2(p: int, n: int, kappa1: float, kappa2: float, r_max: float) -> float:
    """Curvature constant entering the biharmonic-route upper eigenvalue bound."""
    _check_curvature_args(p, n, kappa1, kappa2, r_max)
    _, max1 = _rH_extrema(kappa1, n, r_max)
    min2, _ = _rH_extrema(kappa2, n, r_max)
    return (2.0 * (p + 1) / (n - 1)) * max1 - (1.0 + min2)


def beta_bounds(p: int, n: int, kappa1: float, kappa2: float, r_max: float) -> tuple[float, float]:
    """Bounds on the sum of p Hessian eigenvalues of rho along the domain."""
    _check_curvature_args(p, n, kappa1, kappa2, r_max)
    min2, _ = _rH_extrema(kappa2, n, r_max)
    _, max1 = _rH_extrema(kappa1, n, r_max)
    return (p / (n - 1)) * min2, (p / (n - 1)) * max1


def comparison_bounds(kappa: float, n: int, r: float) -> float:
    """Upper bound 1 + r*H_kappa(r) for -Laplacian(rho) at distance r."""
    if r == 0:
        return float(n)
    return 1.0 + r * riccati_H(kappa, n, r)


def curvature_constants(p: int, n: int, kappa1: float, kappa2: float, r_max: float) -> CurvatureConstants:
    lo, hi = beta_bounds(p, n, kappa1, kappa2, r_max)
    return CurvatureConstants(
        kappa1=kappa1, kappa2=kappa2, p=p, n=n,
        C2=constant_C2(p, n, kappa1, kappa2, r_max),
        beta_lower=lo, beta_upper=hi,
        C0=2.0 if (n == 2 and kappa1 == 0 and kappa2 == 0) else comparison_bounds(kappa1, n, r_max),
    )


def _check_curvature_args(p, n, kappa1, kappa2, r_max):
    if kappa1 > kappa2:
        raise ValueError("need kappa1 <= kappa2")
    if r_max <= 0:
        raise ValueError("r_max must be positive")
    if n < 2:
        raise ValueError("dimension must be >= 2")
    if p < 0:
        raise ValueError("form degree must be >= 0")
    if kappa2 > 0 and r_max >= np.pi / (2 * np.sqrt(kappa2)):
        raise ValueError("r_max must be below pi/(2 sqrt(kappa2)) for kappa2 > 0")


def geometric_summary(mesh: Mesh, x0) -> GeometryReport:
    """Support function profile, maximal radius and shape flags for a mesh."""
    x0 = np.asarray(x0, dtype=float)
    loop = _boundary_loop(mesh)
    poly = Polygon(mesh.vertices[loop])
    if not poly.contains(Point(x0)):
        raise ValueError("x0 must lie strictly inside the mesh")
    h_values = np.array([
        float((0.5 * (mesh.vertices[f.endpoints[0]] + mesh.vertices[f.endpoints[1]]) - x0)
              @ f.outward_normal)
        for f in mesh.boundary_facets
    ])
    bidx = mesh.boundary_vertex_indices()
    r_max = float(np.max(np.hypot(*(mesh.vertices[bidx] - x0).T)))
    return GeometryReport(
        x0=(float(x0[0]), float(x0[1])),
        r_max=r_max,
        h_values=h_values,
        h_min=float(h_values.min()),
        h_max=float(h_values.max()),
        star_shaped=bool(h_values.min() > 0),
        convex=is_convex(mesh),
        dimension=2,
    )


def is_convex(mesh: Mesh, tol: float = 1e-9) -> bool:
    """All boundary turning angles <= pi + tol along the outer loop."""
    loop = _boundary_loop(mesh)
    v = mesh.vertices[loop]
    e = np.roll(v, -1, axis=0) - v
    cross = cross2(e, np.roll(e, -1, axis=0))
    lens = np.hypot(e[:, 0], e[:, 1])
    scale = lens * np.roll(lens, -1)
    return bool(np.all(cross >= -tol * scale))


def _boundary_loop(mesh: Mesh) -> list[int]:
    """Outer boundary loop as an ordered vertex list (longest loop if several)."""
    succ = {f.endpoints[0]: f.endpoints[1] for f in mesh.boundary_facets}
    loops = []
    seen = set()
    for start in succ:
        if start in seen:
            continue
        loop = [start]
        seen.add(start)
        cur = succ[start]
        while cur != start:
            loop.append(cur)
            seen.add(cur)
            cur = succ[cur]
        loops.append(loop)
    def loop_area(loop):
        v = mesh.vertices[loop]
        return 0.5 * np.sum(cross2(v, np.roll(v, -1, axis=0)))
    return max(loops, key=loop_area)


def best_star_center(mesh: Mesh, grid: int = 15):
    """Brute-force interior grid point maximizing the facet-wise h minimum."""
    v = mesh.vertices
    xmin, ymin = v.min(axis=0)
    xmax, ymax = v.max(axis=0)
    best = None
    best_h = -np.inf
    for x in np.linspace(xmin, xmax, grid + 2)[1:-1]:
        for y in np.linspace(ymin, ymax, grid + 2)[1:-1]:
            try:
                rep = geometric_summary(mesh, (x, y))
            except ValueError:
                continue
            if rep.h_min > best_h:
                best_h = rep.h_min
                best = (x, y)
    return best, best_h
