"""Term-by-term evaluation of the Rellich identity on polynomial data.

Every interior integral uses triangle quadrature that is exact for the
polynomial degrees present; boundary integrals run over the mesh facets
with the stored outward normal negated to the inward normal of the
analytic identity.  The ledger exposes all ten terms so a sign error in
any one of them is visible rather than averaged away.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import polyforms as pfm
from .forms_core import _boundary_samples, _interior_inner
from .mesh import Mesh
from .polyforms import PolyForm, PolyVectorField
from .quadrature import integrate_over_mesh


@dataclass(frozen=True)
class VectorFieldSpec:
    """Polynomial vector field with an explicit gradient-field flag."""

    field: PolyVectorField
    gradient_field: bool = False

    def __post_init__(self):
        if self.gradient_field and not self.field.is_gradient(1e-14):
            raise ValueError("field flagged as a gradient has asymmetric Jacobian")

    @classmethod
    def position(cls, x0=(0.0, 0.0)) -> "VectorFieldSpec":
        return cls(PolyVectorField.position(x0), gradient_field=True)

    @classmethod
    def custom(cls, fx, fy) -> "VectorFieldSpec":
        f = PolyVectorField.make(fx, fy)
        return cls(f, gradient_field=f.is_gradient(1e-14))


@dataclass(frozen=True)
class RellichLedger:
    """Both sides of the Rellich identity, term by term.

    lhs_terms: (Lap w, F -| dw) and (delta w, F -| Lap w).
    boundary_terms A..D: the flux integrals, written with the inward
    normal.  interior_terms: the -div F/2 term, the dF -| dw term and the
    two T_F terms.
    """

    lhs_terms: tuple
    boundary_terms: tuple
    interior_terms: tuple
    normal_convention: str = "inward"
    meta: dict = field(default_factory=dict)

    @property
    def lhs(self) -> float:
        return float(sum(self.lhs_terms))

    @property
    def rhs(self) -> float:
        return float(sum(self.boundary_terms) + sum(self.interior_terms))

    @property
    def residual(self) -> float:
        return abs(self.lhs - self.rhs)

    @property
    def relative_residual(self) -> float:
        scale = (sum(abs(t) for t in self.lhs_terms)
                 + sum(abs(t) for t in self.boundary_terms)
                 + sum(abs(t) for t in self.interior_terms) + 1e-30)
        return self.residual / scale

    def to_dict(self) -> dict:
        keys_b = ("A_flux_energy", "B_delta_cross", "C_dw_cross", "D_deltaw_cross")
        keys_i = ("div_energy", "dF_contraction", "T_dw", "T_deltaw")
        return {
            "lhs_interior_terms": [float(t) for t in self.lhs_terms],
            "boundary_terms": dict(zip(keys_b, map(float, self.boundary_terms))),
            "interior_terms": dict(zip(keys_i, map(float, self.interior_terms))),
            "lhs": self.lhs, "rhs": self.rhs,
            "residual": float(self.residual),
            "relative_residual": float(self.relative_residual),
            "normal_convention": self.normal_convention,
            **self.meta,
        }


def t_f_apply(F: VectorFieldSpec | PolyVectorField, omega: PolyForm, x, y) -> np.ndarray:
    """Pointwise values of T_F applied to a form (inserts grad F slotwise)."""
    f = F.field if isinstance(F, VectorFieldSpec) else F
    return pfm.t_f_apply_poly(f, omega).eval(x, y)


def lie_decomposition_residual(F: VectorFieldSpec | PolyVectorField,
                               omega: PolyForm, x, y) -> float:
    """Max pointwise gap between the Cartan-rule Lie derivative and the
    covariant-plus-endomorphism decomposition."""
    f = F.field if isinstance(F, VectorFieldSpec) else F
    lie = pfm.lie_derivative(f, omega)
    dec = pfm.add(pfm.nabla_F(f, omega), pfm.t_f_apply_poly(f, omega))
    gap = pfm.sub(lie, dec).eval(x, y)
    return float(np.max(np.abs(gap)))


def df_contract(fieldspec: PolyVectorField, form: PolyForm) -> PolyForm:
    """dF -| form := sum_i (grad_{e_i} F) -| (e_i -| form), degree drops 2.

    Vanishes when grad F is symmetric (gradient fields) and on anything
    below degree 2 in two dimensions.
    """
    if form.p < 2:
        return PolyForm.scalar(0.0)
    (c,) = form.components
    J = fieldspec.jacobian()
    return PolyForm.scalar(c * (J[1][0] - J[0][1]))


def _boundary_form_inner(a: PolyForm, b: PolyForm, x, y, t) -> np.ndarray:
    """Inner product of the tangential parts of two boundary forms."""
    if a.p != b.p:
        raise ValueError("form degrees differ")
    if a.p == 0:
        return a.components[0](x, y) * b.components[0](x, y)
    if a.p == 1:
        at = t[0] * a.components[0](x, y) + t[1] * a.components[1](x, y)
        bt = t[0] * b.components[0](x, y) + t[1] * b.components[1](x, y)
        return at * bt
    # pullback of a 2-form to a curve vanishes
    return np.zeros_like(np.asarray(x, dtype=float))


def _bnd_pair(mesh: Mesh, degree: int, a: PolyForm, b_higher: PolyForm) -> float:
    """Integral over the boundary of <i* a, nu -| b> with inward nu."""
    total = 0.0
    for pts, w, nu, t in _boundary_samples(mesh, degree):
        x, y = pts[:, 0], pts[:, 1]
        if a.p == 0:
            av = a.components[0](x, y)
            bv = nu[0] * b_higher.components[0](x, y) + nu[1] * b_higher.components[1](x, y)
        else:
            av = t[0] * a.components[0](x, y) + t[1] * a.components[1](x, y)
            factor = nu[0] * t[1] - nu[1] * t[0]
            bv = factor * b_higher.components[0](x, y)
        total += float(np.sum(w * av * bv))
    return total


def rellich_ledger(mesh: Mesh, F: VectorFieldSpec, omega: PolyForm,
                   extra_degree: int = 0) -> RellichLedger:
    f = F.field
    p = omega.p
    deg_w = omega.degree_bound()
    deg_f = max(f.fx.degree, f.fy.degree)
    deg = 2 * (deg_w + deg_f) + 4 + extra_degree

    lap = pfm.laplacian(omega)
    dw = pfm.d(omega) if p < 2 else None
    delw = pfm.delta(omega) if p > 0 else None

    zero = PolyForm.scalar(0.0)

    # left-hand side
    lhs1 = _interior_inner(mesh, lap, pfm.contract(f, dw), deg) if dw is not None else 0.0
    lhs2 = (_interior_inner(mesh, delw, pfm.contract(f, lap), deg)
            if (delw is not None and p >= 1 and lap.p >= 1) else 0.0)

    # energy density |dw|^2 + |delta w|^2 as samples
    def energy(x, y):
        acc = np.zeros_like(np.asarray(x, dtype=float))
        if dw is not None:
            acc = acc + np.sum(dw.eval(x, y) ** 2, axis=0)
        if delw is not None:
            acc = acc + np.sum(delw.eval(x, y) ** 2, axis=0)
        return acc

    # boundary terms, inward normal
    A = 0.0
    for pts, w, nu, t in _boundary_samples(mesh, deg):
        x, y = pts[:, 0], pts[:, 1]
        fn = f.fx(x, y) * nu[0] + f.fy(x, y) * nu[1]
        A += float(np.sum(w * (-0.5) * energy(x, y) * fn))

    B = 0.0
    if dw is not None and delw is not None:
        fdw = pfm.contract(f, dw)          # p-form
        for pts, w, nu, t in _boundary_samples(mesh, deg):
            x, y = pts[:, 0], pts[:, 1]
            if fdw.p == 1:
                nufdw = nu[0] * fdw.components[0](x, y) + nu[1] * fdw.components[1](x, y)
            else:
                raise AssertionError("unexpected degree")
            B += float(np.sum(w * (-1.0) * delw.components[0](x, y) * nufdw))

    C = 0.0
    if dw is not None:
        fdw = pfm.contract(f, dw)
        C = _bnd_pair(mesh, deg, fdw, dw)

    D = 0.0
    if delw is not None and delw.p >= 1:
        fdel = pfm.contract(f, delw)
        D = _bnd_pair(mesh, deg, fdel, delw)

    # interior terms
    divf = f.divergence()
    I1 = integrate_over_mesh(mesh, lambda x, y: -0.5 * energy(x, y) * divf(x, y), deg)
    I2 = (_interior_inner(mesh, delw, df_contract(f, dw), deg)
          if (dw is not None and delw is not None) else 0.0)
    I3 = (_interior_inner(mesh, pfm.t_f_apply_poly(f, dw), dw, deg)
          if dw is not None else 0.0)
    I4 = (_interior_inner(mesh, pfm.t_f_apply_poly(f, delw), delw, deg)
          if (delw is not None and delw.p >= 1) else 0.0)

    return RellichLedger(
        lhs_terms=(lhs1, lhs2),
        boundary_terms=(A, B, C, D),
        interior_terms=(I1, I2, I3, I4),
        meta={"p": p, "gradient_field": F.gradient_field,
              "quadrature_degree": deg},
    )


def reilly_residual(mesh: Mesh, omega: PolyForm, boundary_curvature: float,
                    extra_degree: int = 0) -> dict:
    """Gap in the Reilly energy identity for a tangential field.

    For a flat domain with umbilic boundary of curvature 1/R (a circle),
    the identity reads: form energy = full gradient energy + (1/R) times
    the boundary norm of the tangential trace.  The mesh boundary is
    polygonal, so the gap decays like the mesh size.
    """
    deg = 2 * omega.degree_bound() + 4 + extra_degree
    lhs = 0.0
    if omega.p < 2:
        dw = pfm.d(omega)
        lhs += _interior_inner(mesh, dw, dw, deg)
    if omega.p > 0:
        delw = pfm.delta(omega)
        lhs += _interior_inner(mesh, delw, delw, deg)
    grad = integrate_over_mesh(
        mesh, lambda x, y: pfm.grad_norm2_samples(omega, x, y), deg)
    bnd = 0.0
    for pts, w, nu, t in _boundary_samples(mesh, deg):
        x, y = pts[:, 0], pts[:, 1]
        bnd += float(np.sum(w * _boundary_form_inner(omega, omega, x, y, t)))
    rhs = grad + boundary_curvature * bnd
    return {"lhs": lhs, "gradient_term": grad, "boundary_term": boundary_curvature * bnd,
            "rhs": rhs, "residual": abs(lhs - rhs)}
