"""Discrete p-forms on flat 2D meshes and the bilinear forms they need.

Componentwise continuous Lagrange elements (order 1 or 2) discretize all
three form degrees: a 1-form is a pair of scalar fields (dx and dy
components), a 2-form is its density scalar.  On a flat 2D domain the
degree-2 operators coincide with the degree-0 operators under the density
identification, and that identification is applied literally here.

Boundary sign convention: meshes store outward normals; the analytic
integration-by-parts formulas use the inward normal, so boundary
assemblies negate the stored normal where the formulas require it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import polyforms as pfm
from .mesh import Mesh
from .polyforms import Poly2, PolyForm
from .quadrature import segment_rule, triangle_rule


def n_components(p: int) -> int:
    return {0: 1, 1: 2, 2: 1}[p]


# -- Lagrange scalar spaces -------------------------------------------------

def _shape_functions(order: int):
    """Reference shape functions and gradients in (xi, eta)."""
    if order == 1:
        def vals(x):
            xi, eta = x[:, 0], x[:, 1]
            return np.stack([1 - xi - eta, xi, eta], axis=1)

        def grads(x):
            g = np.array([[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]])
            return np.broadcast_to(g, (len(x), 3, 2))
        return vals, grads, 3
    if order == 2:
        def vals(x):
            xi, eta = x[:, 0], x[:, 1]
            l0 = 1 - xi - eta
            return np.stack([
                l0 * (2 * l0 - 1), xi * (2 * xi - 1), eta * (2 * eta - 1),
                4 * l0 * xi, 4 * xi * eta, 4 * eta * l0,
            ], axis=1)

        def grads(x):
            xi, eta = x[:, 0], x[:, 1]
            l0 = 1 - xi - eta
            z = np.zeros_like(xi)
            gx = np.stack([1 - 4 * l0, 4 * xi - 1, z, 4 * (l0 - xi), 4 * eta, -4 * eta], axis=1)
            gy = np.stack([1 - 4 * l0, z, 4 * eta - 1, -4 * xi, 4 * xi, 4 * (l0 - eta)], axis=1)
            return np.stack([gx, gy], axis=2)
        return vals, grads, 6
    raise ValueError("order must be 1 or 2")


def _facet_shape(order: int):
    """1D shape functions on [0, 1] matching the facet node ordering."""
    if order == 1:
        return lambda s: np.stack([1 - s, s], axis=1), 2
    return lambda s: np.stack([(1 - s) * (1 - 2 * s), s * (2 * s - 1), 4 * s * (1 - s)], axis=1), 3


class FESpace:
    """Scalar continuous Lagrange space on a triangle mesh."""

    def __init__(self, mesh: Mesh, order: int = 1):
        if order not in (1, 2):
            raise ValueError("order must be 1 or 2")
        self.mesh = mesh
        self.order = order
        nv = mesh.num_vertices
        if order == 1:
            self.nodes = mesh.vertices
            self.conn = mesh.triangles
            self.facet_conn = np.array([f.endpoints for f in mesh.boundary_facets])
        else:
            edge_ids: dict = {}
            conn = np.empty((mesh.num_triangles, 6), dtype=int)
            mids = []
            for e, tri in enumerate(mesh.triangles):
                conn[e, :3] = tri
                for k, (a, b) in enumerate([(0, 1), (1, 2), (2, 0)]):
                    key = tuple(sorted((int(tri[a]), int(tri[b]))))
                    if key not in edge_ids:
                        edge_ids[key] = nv + len(mids)
                        mids.append(0.5 * (mesh.vertices[key[0]] + mesh.vertices[key[1]]))
                    conn[e, 3 + k] = edge_ids[key]
            self.nodes = np.vstack([mesh.vertices, np.array(mids).reshape(-1, 2)])
            self.conn = conn
            self.facet_conn = np.array([
                [f.endpoints[0], f.endpoints[1], edge_ids[tuple(sorted(f.endpoints))]]
                for f in mesh.boundary_facets
            ])
        self.n_nodes = len(self.nodes)
        self.boundary_nodes = np.unique(self.facet_conn)
        self._vals, self._grads, self.n_loc = _shape_functions(order)
        self._facet_vals, self.n_loc_f = _facet_shape(order)

    # geometry tables --------------------------------------------------
    def jacobians(self):
        v = self.mesh.vertices
        t = self.mesh.triangles
        J = np.stack([v[t[:, 1]] - v[t[:, 0]], v[t[:, 2]] - v[t[:, 0]]], axis=2)
        detJ = J[:, 0, 0] * J[:, 1, 1] - J[:, 0, 1] * J[:, 1, 0]
        invJT = np.empty_like(J)
        invJT[:, 0, 0] = J[:, 1, 1]
        invJT[:, 0, 1] = -J[:, 1, 0]
        invJT[:, 1, 0] = -J[:, 0, 1]
        invJT[:, 1, 1] = J[:, 0, 0]
        invJT /= detJ[:, None, None]
        return J, detJ, invJT

    def quad_degree(self) -> int:
        return 2 * self.order + 2

    def interpolate(self, func) -> np.ndarray:
        """Nodal interpolation of func(x, y) (exact for degree <= order)."""
        return np.asarray(func(self.nodes[:, 0], self.nodes[:, 1]), dtype=float)

    def node_boundary_normals(self, corner_angle_deg: float = 15.0):
        """Outward normal data per boundary node.

        Returns a dict node -> ('smooth', normal) for nodes interior to a
        straight or nearly straight boundary run (adjacent facet normals
        within `corner_angle_deg`), or ('corner', None) at true corners.
        """
        per_node: dict = {}
        for f in self.mesh.boundary_facets:
            for nidx in ([*f.endpoints] if self.order == 1 else
                         [*f.endpoints, self.facet_conn[self._facet_index(f)][2]]):
                per_node.setdefault(int(nidx), []).append(f.outward_normal)
        out = {}
        # inclusive threshold: an angle exactly at the limit counts as smooth
        cos_tol = np.cos(np.deg2rad(corner_angle_deg)) - 1e-12
        for node, normals in per_node.items():
            if len(normals) == 1:
                out[node] = ("smooth", normals[0])
            else:
                n1, n2 = normals[0], normals[1]
                if float(n1 @ n2) >= cos_tol:
                    avg = n1 + n2
                    out[node] = ("smooth", avg / np.hypot(*avg))
                else:
                    out[node] = ("corner", None)
        return out

    def _facet_index(self, facet):
        if not hasattr(self, "_facet_lookup"):
            self._facet_lookup = {f.endpoints: i for i, f in enumerate(self.mesh.boundary_facets)}
        return self._facet_lookup[facet.endpoints]


# -- scalar assemblies ------------------------------------------------------

def scalar_mass(space: FESpace) -> sp.csr_matrix:
    pts, w = triangle_rule(space.quad_degree())
    N = space._vals(pts)                       # (q, nloc)
    _, detJ, _ = space.jacobians()
    local = np.einsum("q,qi,qj->ij", w, N, N)  # reference local mass
    loc = np.abs(detJ)[:, None, None] * local[None, :, :]
    return _scatter(space, loc)


def scalar_stiffness_blocks(space: FESpace):
    """K[a][b][i, j] = integral of (d_a phi_i)(d_b phi_j)."""
    pts, w = triangle_rule(space.quad_degree())
    Gref = space._grads(pts)                   # (q, nloc, 2)
    _, detJ, invJT = space.jacobians()
    # physical gradients: g[e, q, i, a] = sum_c Gref[q, i, c] * invJT[e, a, c]
    g = np.einsum("qic,eac->eqia", Gref, invJT)
    K = [[None, None], [None, None]]
    for a in range(2):
        for b in range(2):
            loc = np.einsum("q,eqia,eqjb->eij", w, g[..., a:a + 1], g[..., b:b + 1])
            loc *= np.abs(detJ)[:, None, None]
            K[a][b] = _scatter(space, loc)
    return K


def gradient_coupling(space: FESpace):
    """R[a][i, j] = integral of (d_a phi_i) * phi_j."""
    pts, w = triangle_rule(space.quad_degree())
    N = space._vals(pts)
    Gref = space._grads(pts)
    _, detJ, invJT = space.jacobians()
    g = np.einsum("qic,eac->eqia", Gref, invJT)
    R = []
    for a in range(2):
        loc = np.einsum("q,eqi,qj->eij", w, g[..., a], N)
        loc *= np.abs(detJ)[:, None, None]
        R.append(_scatter(space, loc))
    return R


def boundary_mass(space: FESpace, weight=None) -> sp.csr_matrix:
    """Facet mass; optional weight(facet) multiplies each facet's block."""
    s, w = segment_rule(space.quad_degree())
    Nf = space._facet_vals(s)
    rows, cols, vals = [], [], []
    for fi, facet in enumerate(space.mesh.boundary_facets):
        nodes = space.facet_conn[fi]
        wt = 1.0 if weight is None else weight(facet)
        loc = facet.length * wt * np.einsum("q,qi,qj->ij", w, Nf, Nf)
        for i, ni in enumerate(nodes):
            for j, nj in enumerate(nodes):
                rows.append(ni)
                cols.append(nj)
                vals.append(loc[i, j])
    return sp.coo_matrix((vals, (rows, cols)), shape=(space.n_nodes, space.n_nodes)).tocsr()


def _scatter(space: FESpace, loc: np.ndarray) -> sp.csr_matrix:
    conn = space.conn
    nloc = loc.shape[1]
    rows = np.repeat(conn, nloc, axis=1).ravel()
    cols = np.tile(conn, (1, nloc)).ravel()
    return sp.coo_matrix((loc.ravel(), (rows, cols)),
                         shape=(space.n_nodes, space.n_nodes)).tocsr()


# -- form-level operators ---------------------------------------------------

@dataclass(frozen=True)
class FormField:
    """Discrete p-form: componentwise nodal coefficients, blocked by component."""

    p: int
    order: int
    coefficients: np.ndarray

    def component(self, a: int, n_nodes: int) -> np.ndarray:
        return self.coefficients[a * n_nodes:(a + 1) * n_nodes]


@dataclass(frozen=True)
class DiscreteOperators:
    """Assembled bilinear forms for one mesh, form degree and element order."""

    space: FESpace
    p: int
    M: sp.csr_matrix       # interior mass (SPD)
    B: sp.csr_matrix       # form energy |dw|^2 + |delta w|^2 (PSD)
    G: sp.csr_matrix       # full gradient energy |grad w|^2 (PSD)
    Mb: sp.csr_matrix      # boundary trace mass (PSD)

    @property
    def n_dofs(self) -> int:
        return n_components(self.p) * self.space.n_nodes

    def export_matrix_market(self, name: str, directory) -> None:
        import pathlib
        import scipy.io
        directory = pathlib.Path(directory)
        for label, mat in (("M", self.M), ("B", self.B), ("G", self.G), ("Mb", self.Mb)):
            scipy.io.mmwrite(str(directory / f"{name}_{label}.mtx"), mat)


def assemble(mesh: Mesh, p: int, nodal_order: int = 1) -> DiscreteOperators:
    """Assemble mass, form energy, gradient energy and boundary mass.

    Element integrals are exact: the quadrature degree exceeds twice the
    polynomial degree of every integrand on straight simplices.
    """
    if p not in (0, 1, 2):
        raise ValueError("form degree must be 0, 1 or 2")
    space = FESpace(mesh, nodal_order)
    areas = mesh.triangle_areas()
    if np.any(areas <= 0) or np.any(areas < 1e-14 * areas.max()):
        raise ValueError("mesh contains a degenerate triangle")
    Ms = scalar_mass(space)
    K = scalar_stiffness_blocks(space)
    Gs = (K[0][0] + K[1][1]).tocsr()
    Mbs = boundary_mass(space)
    if p in (0, 2):
        # 2-forms reduce to their density scalar; same operators as p = 0
        return DiscreteOperators(space, p, Ms, Gs, Gs, Mbs)
    M = sp.bmat([[Ms, None], [None, Ms]]).tocsr()
    G = sp.bmat([[Gs, None], [None, Gs]]).tocsr()
    C = (K[0][1] - K[1][0]).tocsr()
    B = sp.bmat([[Gs, C], [C.T, Gs]]).tocsr()
    Mb = sp.bmat([[Mbs, None], [None, Mbs]]).tocsr()
    return DiscreteOperators(space, p, M, B, G, Mb)


def energy(ops: DiscreteOperators, field: FormField, which: str = "B") -> float:
    mat = getattr(ops, which)
    x = field.coefficients
    return float(x @ (mat @ x))


def interpolate_form(space: FESpace, form: PolyForm, p: int | None = None) -> FormField:
    p = form.p if p is None else p
    comps = [space.interpolate(c) for c in form.components]
    return FormField(p, space.order, np.concatenate(comps))


# -- constraint bases -------------------------------------------------------

def dirichlet_basis(ops: DiscreteOperators) -> sp.csr_matrix:
    """Selection of dofs vanishing nowhere: interior nodes, all components."""
    space = ops.space
    interior = np.setdiff1d(np.arange(space.n_nodes), space.boundary_nodes)
    cols = np.concatenate([interior + a * space.n_nodes for a in range(n_components(ops.p))])
    Z = sp.coo_matrix((np.ones(len(cols)), (cols, np.arange(len(cols)))),
                      shape=(ops.n_dofs, len(cols)))
    return Z.tocsr()


def tangential_basis(ops: DiscreteOperators):
    """Null-space basis of the normal-trace constraint (the H^1_N subspace).

    For p in {0, 2} the constraint is vacuous under the density
    identification and the basis is the identity.  For p = 1, boundary
    nodes on smooth runs keep their tangential dof; corner nodes are fully
    constrained.  Returns (Z, boundary_reduced_dofs).
    """
    space = ops.space
    nn = space.n_nodes
    if ops.p in (0, 2):
        return sp.identity(nn, format="csr"), np.asarray(space.boundary_nodes, dtype=int)
    normals = space.node_boundary_normals()
    rows, cols, vals = [], [], []
    boundary_reduced = []
    next_col = 0
    for node in range(nn):
        info = normals.get(node)
        if info is None:
            for a in range(2):
                rows.append(a * nn + node)
                cols.append(next_col)
                vals.append(1.0)
                next_col += 1
        elif info[0] == "smooth":
            nx, ny = info[1]
            t = np.array([-ny, nx])
            rows.extend([0 * nn + node, 1 * nn + node])
            cols.extend([next_col, next_col])
            vals.extend([t[0], t[1]])
            boundary_reduced.append(next_col)
            next_col += 1
        # corners contribute no free dof
    Z = sp.coo_matrix((vals, (rows, cols)), shape=(2 * nn, next_col)).tocsr()
    return Z, np.array(boundary_reduced, dtype=int)


# -- elementwise polynomial view and exterior derivative --------------------

def element_polyforms(space: FESpace, field: FormField) -> list[PolyForm]:
    """Per-element exact polynomial representation of a discrete field.

    Intended for identity tests on small meshes; cost grows linearly with
    element count but with a large constant.
    """
    mesh = space.mesh
    ncomp = n_components(field.p)
    out = []
    for e, tri in enumerate(mesh.triangles):
        tc = mesh.vertices[tri]
        # barycentric coordinates as affine polynomials
        A = np.column_stack([np.ones(3), tc[:, 0], tc[:, 1]])
        coeffs = np.linalg.inv(A)  # column k: coefficients of L_k
        L = [Poly2([[coeffs[0, k]]]) + pfm.X * coeffs[1, k] + pfm.Y * coeffs[2, k]
             for k in range(3)]
        if space.order == 1:
            shapes = L
        else:
            shapes = [L[0] * (2 * L[0] - 1), L[1] * (2 * L[1] - 1), L[2] * (2 * L[2] - 1),
                      4 * L[0] * L[1], 4 * L[1] * L[2], 4 * L[2] * L[0]]
        conn = space.conn[e]
        comps = []
        for a in range(ncomp):
            vals = field.component(a, space.n_nodes)[conn]
            poly = Poly2([[0.0]])
            for v, s in zip(vals, shapes):
                poly = poly + s * float(v)
            comps.append(poly)
        out.append(PolyForm(field.p, tuple(comps)))
    return out


def apply_d(space: FESpace, field) -> list[PolyForm]:
    """Elementwise exterior derivative of a discrete or elementwise field."""
    if isinstance(field, FormField):
        if field.p >= 2:
            raise ValueError("d is undefined on 2-forms")
        field = element_polyforms(space, field)
    return [pfm.d(f) for f in field]


def weak_delta(ops: DiscreteOperators, field: FormField,
               ops_lower: DiscreteOperators | None = None) -> FormField:
    """Discrete codifferential defined by the integration-by-parts pairing.

    The degree drops by one; the boundary correction term makes the
    discrete pairing identity exact by construction.
    """
    from scipy.sparse.linalg import spsolve
    p = field.p
    if p == 0:
        raise ValueError("delta is undefined on 0-forms")
    space = ops.space
    nn = space.n_nodes
    R = gradient_coupling(space)
    if p == 1:
        # test functions are scalars; <alpha, delta beta> = (grad alpha, beta) - (alpha, n.beta)_bnd
        Nb = [boundary_mass(space, weight=lambda f, a=a: f.outward_normal[a]) for a in range(2)]
        rhs = ((R[0] - Nb[0]) @ field.component(0, nn)
               + (R[1] - Nb[1]) @ field.component(1, nn))
        Ms = ops.M if ops.p in (0, 2) else None
        if Ms is None:
            Ms = scalar_mass(space)
        coeffs = spsolve(Ms.tocsc(), rhs)
        return FormField(0, space.order, np.asarray(coeffs))
    # p == 2: test functions are 1-forms
    # tangent = outward normal rotated +90 degrees for a CCW loop
    Tb = [boundary_mass(space, weight=lambda f, a=a: (-f.outward_normal[1], f.outward_normal[0])[a])
          for a in range(2)]
    v = field.component(0, nn)
    rhs = np.concatenate([(-R[1] - Tb[0]) @ v, (R[0] - Tb[1]) @ v])
    Ms = scalar_mass(space)
    M1 = sp.bmat([[Ms, None], [None, Ms]]).tocsc()
    coeffs = spsolve(M1, rhs)
    return FormField(1, space.order, np.asarray(coeffs))


# -- analytic integration-by-parts checks -----------------------------------

def _boundary_samples(mesh: Mesh, degree: int):
    """Per facet: physical quad points, weights*length, inward normal, tangent."""
    s, w = segment_rule(degree)
    for facet in mesh.boundary_facets:
        a, b = mesh.vertices[facet.endpoints[0]], mesh.vertices[facet.endpoints[1]]
        pts = a[None, :] + s[:, None] * (b - a)[None, :]
        n_out = facet.outward_normal
        nu = -n_out                       # inward normal
        t = np.array([-n_out[1], n_out[0]])   # CCW unit tangent
        yield pts, w * facet.length, nu, t


def _pair_boundary(mesh: Mesh, degree: int, integrand) -> float:
    total = 0.0
    for pts, w, nu, t in _boundary_samples(mesh, degree):
        total += float(np.sum(w * integrand(pts[:, 0], pts[:, 1], nu, t)))
    return total


def _trace_pair(a: PolyForm, b: PolyForm):
    """Integrand of <i* a, nu -| b> on the boundary, b of degree a.p + 1."""
    def f(x, y, nu, t):
        if a.p == 0:
            return a.components[0](x, y) * (nu[0] * b.components[0](x, y)
                                            + nu[1] * b.components[1](x, y))
        # a 1-form, b 2-form: tangential parts pair through the t component
        at = t[0] * a.components[0](x, y) + t[1] * a.components[1](x, y)
        bt = b.components[0](x, y) * (nu[0] * t[1] - nu[1] * t[0])
        return at * bt
    return f


def _interior_inner(mesh: Mesh, a: PolyForm, b: PolyForm, degree: int) -> float:
    from .quadrature import integrate_over_mesh
    return integrate_over_mesh(mesh, lambda x, y: pfm.inner_samples(a, b, x, y), degree)


def ibp_residuals(mesh: Mesh, omega: PolyForm, omega2: PolyForm | None = None) -> dict:
    """Relative residuals of the exact integration-by-parts identities.

    Evaluated with exact quadrature on polynomial data, so every residual
    is rounding-level when the implementation is correct.  `omega2`
    defaults to `omega` and must have the same degree where an identity
    pairs equal degrees.
    """
    w = omega
    w2 = omega if omega2 is None else omega2
    deg = 2 * max(w.degree_bound(), w2.degree_bound()) + 4
    out = {}

    def rel(lhs, terms):
        scale = sum(abs(t) for t in terms) + abs(lhs) + 1e-30
        return abs(lhs - sum(terms)) / scale

    # pairing identity: (d w, b) = (w, delta b) - <i* w, nu -| b>_bnd
    # partner b is w2 when its degree is one higher, else d of a matching w2
    if w.p == 2:
        b = None
    elif w2.p == w.p + 1:
        b = w2
    else:
        b = pfm.d(w2 if w2.p == w.p else w)
    if b is not None:
        lhs = _interior_inner(mesh, pfm.d(w), b, deg)
        t1 = _interior_inner(mesh, w, pfm.delta(b), deg)
        t2 = -_pair_boundary(mesh, deg, _trace_pair(w, b))
        out["pairing"] = rel(lhs, [t1, t2])

    if w2.p == w.p:
        lap = pfm.laplacian(w)
        lap2 = pfm.laplacian(w2)
        # first Green identity for the Hodge Laplacian
        terms = []
        if w.p < 2:
            terms.append(_interior_inner(mesh, pfm.d(w), pfm.d(w2), deg))
        if w.p > 0:
            terms.append(_interior_inner(mesh, pfm.delta(w), pfm.delta(w2), deg))
        if w.p < 2:
            terms.append(_pair_boundary(mesh, deg, _trace_pair(w2, pfm.d(w))))
        if w.p > 0:
            terms.append(-_pair_boundary(mesh, deg, _trace_pair(pfm.delta(w), w2)))
        lhs = _interior_inner(mesh, lap, w2, deg)
        out["green_first"] = rel(lhs, terms)

        # symmetry of the Laplacian up to boundary fluxes
        lhs = (_interior_inner(mesh, lap, w2, deg)
               - _interior_inner(mesh, w, lap2, deg))
        terms = []
        if w.p < 2:
            terms.append(_pair_boundary(mesh, deg, _trace_pair(w2, pfm.d(w))))
            terms.append(-_pair_boundary(mesh, deg, _trace_pair(w, pfm.d(w2))))
        if w.p > 0:
            terms.append(_pair_boundary(mesh, deg, _trace_pair(pfm.delta(w2), w)))
            terms.append(-_pair_boundary(mesh, deg, _trace_pair(pfm.delta(w), w2)))
        out["green_second"] = rel(lhs, terms)

        # bilaplacian identity: (Lap^2 w, w2) = (Lap w, Lap w2) + fluxes
        bil = pfm.laplacian(lap)
        terms = [_interior_inner(mesh, lap, lap2, deg)]
        if w.p < 2:
            terms.append(_pair_boundary(mesh, deg, _trace_pair(w2, pfm.d(lap))))
            terms.append(-_pair_boundary(mesh, deg, _trace_pair(lap, pfm.d(w2))))
        if w.p > 0:
            terms.append(_pair_boundary(mesh, deg, _trace_pair(pfm.delta(w2), lap)))
            terms.append(-_pair_boundary(mesh, deg, _trace_pair(pfm.delta(lap), w2)))
        lhs = _interior_inner(mesh, bil, w2, deg)
        out["bilaplacian"] = rel(lhs, terms)
    return out


def grad_contraction_check(omega: PolyForm, field, x, y) -> float:
    """Max violation of |nabla_X w| <= |X| |nabla w| over sample points."""
    nab = pfm.nabla_F(field, omega)
    lhs = np.sqrt(np.sum(nab.eval(x, y) ** 2, axis=0))
    fx = field.fx(x, y) if hasattr(field, "fx") else field[0]
    fy = field.fy(x, y) if hasattr(field, "fy") else field[1]
    rhs = np.hypot(fx, fy) * np.sqrt(pfm.grad_norm2_samples(omega, x, y))
    return float(np.max(lhs - rhs))
