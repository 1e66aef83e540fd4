"""Simplicial meshes of flat planar domains with oriented boundary data.

Triangles are stored counterclockwise.  Boundary facets carry outward unit
normals; analytic conventions that need the inward normal negate it at the
point of use.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import Delaunay
from shapely.geometry import Point, Polygon


class MeshError(Exception):
    """Raised for invalid mesh input or malformed mesh files."""


def cross2(a, b):
    """z-component of the cross product of planar vectors (last axis 2)."""
    a = np.asarray(a)
    b = np.asarray(b)
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


@dataclass(frozen=True)
class BoundaryFacet:
    """Oriented boundary edge: endpoints follow the counterclockwise loop."""

    endpoints: tuple[int, int]
    outward_normal: np.ndarray
    length: float


@dataclass(frozen=True)
class Mesh:
    vertices: np.ndarray          # (nv, 2)
    triangles: np.ndarray         # (nt, 3), counterclockwise
    boundary_facets: list[BoundaryFacet]
    domain_tag: str = ""

    def __post_init__(self):
        self.vertices.setflags(write=False)
        self.triangles.setflags(write=False)

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_triangles(self) -> int:
        return len(self.triangles)

    def triangle_areas(self) -> np.ndarray:
        v = self.vertices
        t = self.triangles
        return 0.5 * cross2(v[t[:, 1]] - v[t[:, 0]], v[t[:, 2]] - v[t[:, 0]])

    def boundary_vertex_indices(self) -> np.ndarray:
        idx = set()
        for f in self.boundary_facets:
            idx.update(f.endpoints)
        return np.array(sorted(idx), dtype=int)

    def centroid(self) -> np.ndarray:
        areas = self.triangle_areas()
        cents = self.vertices[self.triangles].mean(axis=1)
        return (areas[:, None] * cents).sum(axis=0) / areas.sum()

    def validate(self) -> None:
        areas = self.triangle_areas()
        if np.any(areas <= 0):
            bad = int(np.argmin(areas))
            raise MeshError(f"triangle {bad} has non-positive signed area")
        succ = {}
        for f in self.boundary_facets:
            a, b = f.endpoints
            if a in succ:
                raise MeshError(f"boundary vertex {a} has two outgoing facets")
            succ[a] = b
        starts = set(succ)
        ends = set(succ.values())
        if starts != ends:
            dangling = sorted(starts.symmetric_difference(ends))
            raise MeshError(f"boundary is not a union of closed loops near vertices {dangling}")
        edge_count = _boundary_edge_multiplicity(self.triangles)
        for f in self.boundary_facets:
            key = tuple(sorted(f.endpoints))
            if edge_count.get(key, 0) != 1:
                raise MeshError(f"facet {f.endpoints} is not a boundary edge of exactly one triangle")
            a, b = self.vertices[f.endpoints[0]], self.vertices[f.endpoints[1]]
            e = b - a
            ln = float(np.hypot(*e))
            if abs(ln - f.length) > 1e-12 * max(1.0, ln):
                raise MeshError(f"facet {f.endpoints} stored length is inconsistent")
            n = f.outward_normal
            if abs(float(n @ n) - 1.0) > 1e-12 or abs(float(n @ e)) > 1e-9 * ln:
                raise MeshError(f"facet {f.endpoints} normal is not a unit normal")


def _boundary_edge_multiplicity(triangles: np.ndarray) -> dict:
    count: dict = {}
    for tri in triangles:
        for k in range(3):
            key = tuple(sorted((int(tri[k]), int(tri[(k + 1) % 3]))))
            count[key] = count.get(key, 0) + 1
    return count


def _extract_boundary(vertices: np.ndarray, triangles: np.ndarray) -> list[BoundaryFacet]:
    """Boundary edges ordered along each triangle's counterclockwise loop."""
    count = _boundary_edge_multiplicity(triangles)
    facets = []
    for tri in triangles:
        for k in range(3):
            a, b = int(tri[k]), int(tri[(k + 1) % 3])
            if count[tuple(sorted((a, b)))] == 1:
                e = vertices[b] - vertices[a]
                ln = float(np.hypot(*e))
                n = np.array([e[1], -e[0]]) / ln
                n.setflags(write=False)
                facets.append(BoundaryFacet((a, b), n, ln))
    return facets


def _build_mesh(vertices: np.ndarray, triangles: np.ndarray, tag: str) -> Mesh:
    areas = 0.5 * cross2(
        vertices[triangles[:, 1]] - vertices[triangles[:, 0]],
        vertices[triangles[:, 2]] - vertices[triangles[:, 0]],
    )
    flipped = areas < 0
    triangles = triangles.copy()
    triangles[flipped] = triangles[flipped][:, ::-1]
    mesh = Mesh(np.ascontiguousarray(vertices, dtype=float), triangles,
                _extract_boundary(vertices, triangles), tag)
    mesh.validate()
    return mesh


def gen_disk(radius: float, target_h: float) -> Mesh:
    """Structured fan mesh of a regular polygonal approximation of the disk.

    Boundary vertices lie exactly on the circle; the construction is scale
    covariant, so gen_disk(s*R, s*h) is gen_disk(R, h) scaled by s.
    """
    if radius <= 0 or target_h <= 0:
        raise ValueError("radius and target_h must be positive")
    if target_h >= radius:
        raise ValueError("target_h must be smaller than radius")
    n_r = int(np.ceil(radius / target_h))
    pts = [(0.0, 0.0)]
    for i in range(1, n_r + 1):
        r = radius * i / n_r
        m = 6 * i
        theta = 2 * np.pi * np.arange(m) / m + (np.pi / m) * (i % 2)
        pts.extend(zip(r * np.cos(theta), r * np.sin(theta)))
    vertices = np.array(pts)
    tri = Delaunay(vertices).simplices
    # Delaunay of points on a convex region never produces exterior triangles,
    # but nearly-degenerate boundary slivers are possible; drop zero-area ones.
    areas = 0.5 * np.abs(cross2(
        vertices[tri[:, 1]] - vertices[tri[:, 0]],
        vertices[tri[:, 2]] - vertices[tri[:, 0]],
    ))
    tri = tri[areas > 1e-14 * radius**2]
    return _build_mesh(vertices, tri, f"disk(r={radius:g})")


def _fill_region(boundary_pts: np.ndarray, polygon: Polygon, target_h: float,
                 tag: str, smoothing_iters: int = 8) -> Mesh:
    """Triangulate the region bounded by `boundary_pts` (ordered CCW loop(s))."""
    xmin, ymin, xmax, ymax = polygon.bounds
    xs = np.arange(xmin + 0.5 * target_h, xmax, target_h)
    ys = np.arange(ymin + 0.5 * target_h, ymax, target_h * np.sqrt(3) / 2)
    interior = []
    ring = polygon.exterior
    rings = [polygon.exterior] + list(polygon.interiors)
    for j, y in enumerate(ys):
        offset = 0.5 * target_h if j % 2 else 0.0
        for x in xs + offset:
            p = Point(x, y)
            if polygon.contains(p) and all(r.distance(p) >= 0.55 * target_h for r in rings):
                interior.append((x, y))
    n_bnd = len(boundary_pts)
    vertices = np.vstack([boundary_pts, np.array(interior).reshape(-1, 2)])

    def triangulate(v):
        tri = Delaunay(v).simplices
        cents = v[tri].mean(axis=1)
        keep = np.array([polygon.contains(Point(c)) for c in cents])
        return tri[keep]

    tri = triangulate(vertices)
    for _ in range(smoothing_iters):
        if len(vertices) == n_bnd:
            break
        neigh_sum = np.zeros_like(vertices)
        neigh_cnt = np.zeros(len(vertices))
        for a, b in {(int(t[i]), int(t[(i + 1) % 3])) for t in tri for i in range(3)}:
            neigh_sum[a] += vertices[b]
            neigh_cnt[a] += 1
        moved = vertices.copy()
        free = np.arange(n_bnd, len(vertices))
        ok = neigh_cnt[free] > 0
        moved[free[ok]] = neigh_sum[free[ok]] / neigh_cnt[free[ok], None]
        vertices = moved
        tri = triangulate(vertices)
    used = np.unique(tri)
    if len(used) < len(vertices):
        remap = -np.ones(len(vertices), dtype=int)
        remap[used] = np.arange(len(used))
        vertices = vertices[used]
        tri = remap[tri]
    return _build_mesh(vertices, tri, tag)


def _subdivided_loop(corners: np.ndarray, target_h: float) -> np.ndarray:
    pts = []
    n = len(corners)
    for i in range(n):
        a, b = corners[i], corners[(i + 1) % n]
        m = max(1, int(round(np.hypot(*(b - a)) / target_h)))
        for t in np.arange(m) / m:
            pts.append(a + t * (b - a))
    return np.array(pts)


def gen_polygon(corners, target_h: float) -> Mesh:
    """Conforming triangulation of a simple counterclockwise polygon."""
    corners = np.asarray(corners, dtype=float)
    if target_h <= 0:
        raise ValueError("target_h must be positive")
    if len(corners) < 3:
        raise ValueError("polygon needs at least 3 corners")
    poly = Polygon(corners)
    if not poly.is_valid or not poly.is_simple:
        raise ValueError("polygon is self-intersecting")
    if poly.exterior.is_ccw is False:
        raise ValueError("polygon corners must be counterclockwise")
    boundary = _subdivided_loop(corners, target_h)
    return _fill_region(boundary, poly, target_h, f"polygon({len(corners)} corners)")


def gen_square(half_width: float, target_h: float) -> Mesh:
    s = half_width
    return gen_polygon([(-s, -s), (s, -s), (s, s), (-s, s)], target_h)


def gen_ellipse(a: float, b: float, target_h: float) -> Mesh:
    """Polygonal approximation of the ellipse x^2/a^2 + y^2/b^2 = 1."""
    if a <= 0 or b <= 0 or target_h <= 0:
        raise ValueError("a, b and target_h must be positive")
    # sample the boundary at roughly equal arclength steps
    t = np.linspace(0, 2 * np.pi, 4096, endpoint=False)
    dx = np.hypot(-a * np.sin(t), b * np.cos(t))
    s = np.concatenate([[0.0], np.cumsum(dx)]) * (t[1] - t[0])
    total = s[-1]
    m = max(8, int(np.ceil(total / target_h)))
    t_eq = np.interp(np.arange(m) * total / m, s[:-1], t)
    boundary = np.column_stack([a * np.cos(t_eq), b * np.sin(t_eq)])
    poly = Polygon(boundary)
    return _fill_region(boundary, poly, target_h, f"ellipse(a={a:g},b={b:g})")


def gen_annulus(r_inner: float, r_outer: float, target_h: float) -> Mesh:
    """Ring-structured mesh of the annulus r_inner <= |x| <= r_outer."""
    if not 0 < r_inner < r_outer:
        raise ValueError("need 0 < r_inner < r_outer")
    if target_h <= 0 or target_h >= r_outer - r_inner:
        raise ValueError("target_h must be positive and smaller than the gap")
    n_r = int(np.ceil((r_outer - r_inner) / target_h))
    m = max(8, int(np.ceil(2 * np.pi * r_outer / target_h)))
    pts = []
    for i in range(n_r + 1):
        r = r_inner + (r_outer - r_inner) * i / n_r
        theta = 2 * np.pi * np.arange(m) / m + (np.pi / m) * (i % 2)
        pts.extend(zip(r * np.cos(theta), r * np.sin(theta)))
    vertices = np.array(pts)
    tri = Delaunay(vertices).simplices
    cents = vertices[tri].mean(axis=1)
    keep = np.hypot(cents[:, 0], cents[:, 1]) > r_inner
    return _build_mesh(vertices, tri[keep], f"annulus({r_inner:g},{r_outer:g})")


def save_mesh(mesh: Mesh, path) -> None:
    """Write the mesh as an OFF text file."""
    with open(path, "w") as fh:
        fh.write("OFF\n")
        fh.write(f"{mesh.num_vertices} {mesh.num_triangles} 0\n")
        for x, y in mesh.vertices:
            fh.write(f"{float(x)!r} {float(y)!r} 0\n")
        for i, j, k in mesh.triangles:
            fh.write(f"3 {int(i)} {int(j)} {int(k)}\n")


def load_mesh(path) -> Mesh:
    """Read an OFF text file written by save_mesh (counterclockwise triangles)."""
    with open(path) as fh:
        lines = fh.readlines()

    def fail(lineno, msg):
        raise MeshError(f"{path}:{lineno}: {msg}")

    if not lines or lines[0].strip() != "OFF":
        fail(1, "missing OFF header")
    try:
        nv, nt, _ = (int(tok) for tok in lines[1].split())
    except (ValueError, IndexError):
        fail(2, "malformed counts line, expected 'nv nt 0'")
    vertices = np.empty((nv, 2))
    for i in range(nv):
        lineno = 3 + i
        try:
            x, y, _z = (float(tok) for tok in lines[2 + i].split())
        except (ValueError, IndexError):
            fail(lineno, "malformed vertex line, expected 'x y 0'")
        vertices[i] = (x, y)
    triangles = np.empty((nt, 3), dtype=int)
    for i in range(nt):
        lineno = 3 + nv + i
        try:
            toks = lines[2 + nv + i].split()
            if len(toks) != 4 or toks[0] != "3":
                raise ValueError
            triangles[i] = [int(t) for t in toks[1:]]
        except (ValueError, IndexError):
            fail(lineno, "malformed triangle line, expected '3 i j k'")
    areas = 0.5 * cross2(
        vertices[triangles[:, 1]] - vertices[triangles[:, 0]],
        vertices[triangles[:, 2]] - vertices[triangles[:, 0]],
    )
    if np.any(areas <= 0):
        bad = int(np.argmin(areas))
        raise MeshError(f"{path}: triangle {bad} is not counterclockwise")
    mesh = Mesh(vertices, triangles, _extract_boundary(vertices, triangles), str(path))
    mesh.validate()
    return mesh
