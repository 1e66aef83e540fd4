"""The five eigenvalue boundary problems as constrained matrix eigenproblems.

Biharmonic quotients use a harmonic parameterization: the auxiliary field
tau = Lap(omega) of a biharmonic omega is discretely harmonic, so its
boundary values parameterize the whole constraint space.  Normal
derivatives on the boundary are recovered variationally (boundary mass
inverse applied to the stiffness residual), which keeps every quotient
consistent with the discrete integration by parts.

Sign convention: all quotients are the nonnegative Rayleigh ratios from
the variational characterizations; the inward-normal flux only enters
through its squared boundary norm, so its sign never matters.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.linalg import eigh, null_space

from . import forms_core as fcore
from .forms_core import DiscreteOperators, FESpace
from .mesh import Mesh
from .spectra import SpectralResult, deflate, solve_gevp, trace_reduce

PROBLEM_IDS = ("dirichlet", "neumann_absolute", "steklov",
               "bsd1", "bsd2", "bsd_scalar", "bsn_scalar")


@dataclass(frozen=True)
class ProblemSpec:
    problem_id: str
    p: int
    k: int
    mesh: Mesh
    nodal_order: int = 1
    dense_cutoff: int = 500
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.problem_id not in PROBLEM_IDS:
            raise ValueError(f"unknown problem '{self.problem_id}'")
        if self.p not in (0, 1, 2):
            raise ValueError("form degree must be 0, 1 or 2")
        if self.problem_id in ("bsd_scalar", "bsn_scalar") and self.p != 0:
            raise ValueError(f"{self.problem_id} requires p = 0")
        if self.k < 1:
            raise ValueError("count must be >= 1")


def solve(spec: ProblemSpec) -> SpectralResult:
    fn = {
        "dirichlet": dirichlet_spectrum,
        "neumann_absolute": neumann_absolute_spectrum,
        "steklov": steklov_spectrum,
        "bsd1": bsd1_harmonic_ratio,
        "bsd2": bsd2_spectrum,
        "bsd_scalar": bsd_scalar_spectrum,
        "bsn_scalar": bsn_scalar_spectrum,
    }[spec.problem_id]
    return fn(spec)


# -- Laplacian problems -----------------------------------------------------

def dirichlet_spectrum(spec: ProblemSpec) -> SpectralResult:
    """lambda_{k,p}: form energy over mass with full zero trace."""
    ops = fcore.assemble(spec.mesh, spec.p, spec.nodal_order)
    Z = fcore.dirichlet_basis(ops)
    if Z.shape[1] == 0:
        raise ValueError("no interior degrees of freedom")
    A = (Z.T @ ops.B @ Z).tocsr()
    M = (Z.T @ ops.M @ Z).tocsr()
    res = solve_gevp(A, M, spec.k, spec.dense_cutoff)
    vecs = Z @ res.vectors
    meta = dict(res.meta, problem="dirichlet", p=spec.p, order=spec.nodal_order)
    return SpectralResult(res.values[:spec.k], vecs[:, :spec.k], meta)


def neumann_absolute_spectrum(spec: ProblemSpec) -> SpectralResult:
    """mu_{k,p}: form energy over mass on the zero-normal-trace subspace.

    The kernel (absolute cohomology, plus constants for degrees 0 and 2)
    is removed; its measured dimension is reported in the metadata.
    """
    ops = fcore.assemble(spec.mesh, spec.p, spec.nodal_order)
    Z, _ = fcore.tangential_basis(ops)
    A = (Z.T @ ops.B @ Z).tocsr()
    M = (Z.T @ ops.M @ Z).tocsr()
    pad = spec.extra.get("kernel_guess", 3)
    res = solve_gevp(A, M, spec.k + pad, spec.dense_cutoff)
    res = deflate(res)
    vecs = Z @ res.vectors
    meta = dict(res.meta, problem="neumann_absolute", p=spec.p, order=spec.nodal_order)
    return SpectralResult(res.values[:spec.k], vecs[:, :spec.k], meta)


def steklov_spectrum(spec: ProblemSpec) -> SpectralResult:
    """sigma_{k,p}: boundary spectrum of the energy-harmonic extension.

    The form energy is Schur-reduced onto the tangential boundary trace
    and paired against the boundary trace mass.
    """
    ops = fcore.assemble(spec.mesh, spec.p, spec.nodal_order)
    Z, bred = fcore.tangential_basis(ops)
    A = (Z.T @ ops.B @ Z).tocsr()
    Mb = (Z.T @ ops.Mb @ Z).tocsr()
    nred = A.shape[0]
    interior = np.setdiff1d(np.arange(nred), bred)
    S, lift = trace_reduce(A, interior, bred)
    Mb_bb = Mb[np.ix_(bred, bred)].toarray()
    vals, vecs = eigh(S, Mb_bb)
    res = deflate(SpectralResult(vals, vecs, {"method": "schur-dense"}))
    full = np.column_stack([Z @ lift(res.vectors[:, j])
                            for j in range(min(spec.k, res.vectors.shape[1]))])
    meta = dict(res.meta, problem="steklov", p=spec.p, order=spec.nodal_order)
    return SpectralResult(res.values[:spec.k], full, meta)


# -- biharmonic machinery ---------------------------------------------------

class _ScalarKit:
    """Scalar harmonic extension, Dirichlet solve and weak flux recovery."""

    def __init__(self, space: FESpace):
        self.space = space
        self.Ms = fcore.scalar_mass(space)
        K = fcore.scalar_stiffness_blocks(space)
        self.Gs = (K[0][0] + K[1][1]).tocsr()
        self.b = np.asarray(space.boundary_nodes, dtype=int)
        self.i = np.setdiff1d(np.arange(space.n_nodes), self.b)
        self.Mb_bb = fcore.boundary_mass(space)[np.ix_(self.b, self.b)].toarray()
        Gii = self.Gs[np.ix_(self.i, self.i)].tocsc()
        self._lu = spla.splu(Gii)
        Gib = self.Gs[np.ix_(self.i, self.b)].toarray()
        # harmonic extension of boundary values, as a dense map
        self.E = np.zeros((space.n_nodes, len(self.b)))
        self.E[self.b] = np.eye(len(self.b))
        self.E[self.i] = -self._lu.solve(Gib)

    def dirichlet_solve(self, rhs: np.ndarray) -> np.ndarray:
        """u with u = 0 on the boundary and G u = rhs on interior dofs."""
        u = np.zeros((self.space.n_nodes,) + rhs.shape[1:])
        u[self.i] = self._lu.solve(rhs[self.i])
        return u

    def flux(self, u: np.ndarray, rhs: np.ndarray) -> np.ndarray:
        """Variational outward normal derivative on boundary nodes."""
        r = (self.Gs @ u - rhs)[self.b]
        return np.linalg.solve(self.Mb_bb, r)


def _ratio_gevp(N: np.ndarray, D: np.ndarray, count: int, rel: float = 1e-9):
    """Ascending finite eigenvalues of the quotient N/D with N positive
    definite and D only semidefinite: solved as D x = t N x, q = 1/t."""
    t, vecs = eigh(D, N)
    keep = t > rel * max(t.max(), 1e-300)
    q = 1.0 / t[keep][::-1]
    vecs = vecs[:, keep][:, ::-1]
    return q[:count], vecs[:, :count]


def _bsd_matrices(kit: _ScalarKit, ncomp: int):
    """Numerator, flux maps and tau parameterization for BSD quotients.

    Parameter vector stacks the boundary values of each component of
    tau = Lap(omega).  Returns (N, flux_maps) where flux_maps[a] sends
    parameters to the outward flux of component a on boundary nodes.
    """
    nb = len(kit.b)
    n_par = ncomp * nb
    MsE = kit.Ms @ kit.E
    Nblk = kit.E.T @ MsE                  # ||tau||^2 per component
    N = np.zeros((n_par, n_par))
    flux_maps = []
    for a in range(ncomp):
        sl = slice(a * nb, (a + 1) * nb)
        N[sl, sl] = Nblk
        U = kit.dirichlet_solve(MsE)       # omega component from tau component
        F = kit.flux(U, MsE)               # (nb, nb) flux map
        Fa = np.zeros((nb, n_par))
        Fa[:, sl] = F
        flux_maps.append(Fa)
    return N, flux_maps


def bsd_scalar_spectrum(spec: ProblemSpec) -> SpectralResult:
    """q_k: |Lap u|^2 over the boundary norm of the normal flux, u = 0 on
    the boundary, biharmonic interior."""
    space = FESpace(spec.mesh, max(spec.nodal_order, 2))
    kit = _ScalarKit(space)
    N, (F,) = _bsd_matrices(kit, 1)
    D = F.T @ kit.Mb_bb @ F
    q, vecs = _ratio_gevp(N, D, spec.k)
    return SpectralResult(q, vecs, {"problem": "bsd_scalar", "p": 0,
                                    "order": space.order, "n_par": N.shape[0]})


def bsd2_spectrum(spec: ProblemSpec) -> SpectralResult:
    """**q**_{k,p}: |Lap w|^2 over the boundary norm of the tangential
    normal-derivative, with full zero trace and zero normal part of the
    recovered normal derivative (the discrete i* delta w = 0 condition).

    Degrees 0 and 2 reduce to the scalar problem: the extra condition is
    vacuous for functions and the density identification carries it over.
    """
    if spec.p in (0, 2):
        out = bsd_scalar_spectrum(ProblemSpec("bsd_scalar", 0, spec.k, spec.mesh,
                                              max(spec.nodal_order, 2)))
        meta = dict(out.meta, problem="bsd2", p=spec.p)
        return SpectralResult(out.values, out.vectors, meta)
    space = FESpace(spec.mesh, max(spec.nodal_order, 2))
    kit = _ScalarKit(space)
    N, (Fx, Fy) = _bsd_matrices(kit, 2)
    normals = space.node_boundary_normals()
    rows = []
    tang_rows = []
    for j, node in enumerate(kit.b):
        kind, nv = normals[int(node)]
        if kind == "smooth":
            rows.append(nv[0] * Fx[j] + nv[1] * Fy[j])
            tang_rows.append(-nv[1] * Fx[j] + nv[0] * Fy[j])
        else:
            # corner: the full recovered derivative is constrained to zero
            rows.append(Fx[j])
            rows.append(Fy[j])
            tang_rows.append(np.zeros(Fx.shape[1]))
    C = np.array(rows)
    V = null_space(C)
    if V.shape[1] == 0:
        raise ValueError("normal-derivative constraint removed every mode")
    T = np.array(tang_rows)
    Nc = V.T @ N @ V
    Dc = V.T @ (T.T @ kit.Mb_bb @ T) @ V
    q, vecs = _ratio_gevp(Nc, Dc, spec.k)
    return SpectralResult(q, V @ vecs, {"problem": "bsd2", "p": spec.p,
                                        "order": space.order, "n_par": Nc.shape[0]})


def bsd1_harmonic_ratio(spec: ProblemSpec) -> SpectralResult:
    """Harmonic-ratio spectrum: boundary mass over interior mass on
    componentwise discretely-harmonic fields.

    Its first eigenvalue equals q_{1,p}; higher entries are reported as
    the harmonic-ratio spectrum without being certified as q_{k,p}.
    """
    space = FESpace(spec.mesh, spec.nodal_order)
    kit = _ScalarKit(space)
    ncomp = fcore.n_components(spec.p)
    nb = len(kit.b)
    Den_blk = kit.E.T @ (kit.Ms @ kit.E)
    Num = np.kron(np.eye(ncomp), kit.Mb_bb)
    Den = np.kron(np.eye(ncomp), Den_blk)
    vals, vecs = eigh(Num, Den)
    k = min(spec.k, len(vals))
    return SpectralResult(vals[:k], vecs[:, :k],
                          {"problem": "bsd1", "p": spec.p, "order": space.order,
                           "label": "harmonic-ratio spectrum", "n_par": ncomp * nb})


def bsn_scalar_spectrum(spec: ProblemSpec) -> SpectralResult:
    """ell_k: |Lap u|^2 over the boundary norm of the trace, with zero
    (weak) normal derivative; the constant kernel mode is removed."""
    space = FESpace(spec.mesh, max(spec.nodal_order, 2))
    kit = _ScalarKit(space)
    nn = space.n_nodes
    MsE = kit.Ms @ kit.E
    # solvability of the Neumann problem: tau must have zero mean
    mean_row = np.ones(nn) @ MsE
    V = null_space(mean_row[None, :])
    # Neumann solve pinned by a zero-mean Lagrange multiplier
    mvec = kit.Ms @ np.ones(nn)
    K = sp.bmat([[kit.Gs, mvec[:, None]], [mvec[None, :], None]]).tocsc()
    lu = spla.splu(K)
    rhs = np.vstack([MsE @ V, np.zeros((1, V.shape[1]))])
    U = lu.solve(rhs)[:nn]
    # trial space: mean-zero Neumann solutions plus the constant function
    Ub = np.column_stack([U[kit.b], np.ones(len(kit.b))])
    Nblk = V.T @ (kit.E.T @ MsE) @ V
    N = np.zeros((V.shape[1] + 1,) * 2)
    N[:V.shape[1], :V.shape[1]] = Nblk
    D = Ub.T @ kit.Mb_bb @ Ub
    vals, vecs = eigh(N, D)
    res = deflate(SpectralResult(vals, vecs, {}), expected_kernel=None)
    meta = dict(res.meta, problem="bsn_scalar", p=0, order=space.order,
                n_par=N.shape[0])
    k = min(spec.k, len(res.values))
    return SpectralResult(res.values[:k], res.vectors[:, :k], meta)
