"""Exact calculus on polynomial differential forms in flat 2D coordinates.

Forms are stored componentwise: a 0-form is a scalar polynomial, a 1-form
holds the coefficients of dx and dy, and a 2-form holds the density in
front of dx^dy.  All derivatives are exact coefficient operations, so the
identity evaluators downstream are limited only by quadrature, which is
itself exact for polynomials.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P


class Poly2:
    """Bivariate polynomial with coefficient array c[i, j] for x^i y^j."""

    __slots__ = ("c",)

    def __init__(self, c):
        self.c = np.atleast_2d(np.asarray(c, dtype=float))

    @classmethod
    def const(cls, value: float) -> "Poly2":
        return cls([[float(value)]])

    @classmethod
    def monomial(cls, i: int, j: int, coeff: float = 1.0) -> "Poly2":
        c = np.zeros((i + 1, j + 1))
        c[i, j] = coeff
        return cls(c)

    @property
    def degree(self) -> int:
        nz = np.nonzero(self.c)
        if len(nz[0]) == 0:
            return 0
        return int(np.max(nz[0] + nz[1]))

    def __add__(self, other):
        other = _as_poly(other)
        a, b = _pad_pair(self.c, other.c)
        return Poly2(a + b)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_poly(other)
        a, b = _pad_pair(self.c, other.c)
        return Poly2(a - b)

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __neg__(self):
        return Poly2(-self.c)

    def __mul__(self, other):
        if np.isscalar(other):
            return Poly2(self.c * other)
        other = _as_poly(other)
        return Poly2(_conv2(self.c, other.c))

    __rmul__ = __mul__

    def diff(self, axis: int) -> "Poly2":
        """Partial derivative: axis 0 is d/dx, axis 1 is d/dy."""
        c = self.c
        if c.shape[axis] == 1:
            return Poly2([[0.0]])
        if axis == 0:
            factors = np.arange(1, c.shape[0])
            return Poly2(c[1:, :] * factors[:, None])
        factors = np.arange(1, c.shape[1])
        return Poly2(c[:, 1:] * factors[None, :])

    def __call__(self, x, y):
        return P.polyval2d(x, y, self.c)

    def is_zero(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.c) <= tol))

    def __repr__(self):
        return f"Poly2(deg<={self.degree})"


def _conv2(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.zeros((a.shape[0] + b.shape[0] - 1, a.shape[1] + b.shape[1] - 1))
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            if a[i, j] != 0.0:
                out[i:i + b.shape[0], j:j + b.shape[1]] += a[i, j] * b
    return out


def _as_poly(v) -> Poly2:
    return v if isinstance(v, Poly2) else Poly2.const(v)


def _pad_pair(a, b):
    n0 = max(a.shape[0], b.shape[0])
    n1 = max(a.shape[1], b.shape[1])
    pa = np.zeros((n0, n1))
    pb = np.zeros((n0, n1))
    pa[:a.shape[0], :a.shape[1]] = a
    pb[:b.shape[0], :b.shape[1]] = b
    return pa, pb


ZERO = Poly2([[0.0]])

X = Poly2.monomial(1, 0)
Y = Poly2.monomial(0, 1)


@dataclass(frozen=True)
class PolyForm:
    """Polynomial p-form, p in {0, 1, 2}, componentwise Cartesian storage."""

    p: int
    components: tuple

    def __post_init__(self):
        expected = {0: 1, 1: 2, 2: 1}[self.p]
        if len(self.components) != expected:
            raise ValueError(f"degree-{self.p} form needs {expected} component(s)")

    @classmethod
    def scalar(cls, f) -> "PolyForm":
        return cls(0, (_as_poly(f),))

    @classmethod
    def one_form(cls, fx, fy) -> "PolyForm":
        return cls(1, (_as_poly(fx), _as_poly(fy)))

    @classmethod
    def two_form(cls, density) -> "PolyForm":
        return cls(2, (_as_poly(density),))

    def eval(self, x, y) -> np.ndarray:
        """Component samples with shape (n_components, ...)."""
        return np.stack([c(x, y) for c in self.components])

    def degree_bound(self) -> int:
        return max(c.degree for c in self.components)


@dataclass(frozen=True)
class PolyVectorField:
    """Polynomial vector field with its exact Jacobian J[i][j] = d F_i / d x_j."""

    fx: Poly2
    fy: Poly2

    @classmethod
    def make(cls, fx, fy) -> "PolyVectorField":
        return cls(_as_poly(fx), _as_poly(fy))

    @classmethod
    def position(cls, x0=(0.0, 0.0)) -> "PolyVectorField":
        """F = x - x0, the gradient of |x - x0|^2 / 2."""
        return cls(X - float(x0[0]), Y - float(x0[1]))

    @property
    def components(self):
        return (self.fx, self.fy)

    def jacobian(self):
        return ((self.fx.diff(0), self.fx.diff(1)),
                (self.fy.diff(0), self.fy.diff(1)))

    def divergence(self) -> Poly2:
        return self.fx.diff(0) + self.fy.diff(1)

    def is_gradient(self, tol: float = 0.0) -> bool:
        return (self.fx.diff(1) - self.fy.diff(0)).is_zero(tol)

    def eval(self, x, y) -> np.ndarray:
        return np.stack([self.fx(x, y), self.fy(x, y)])


# -- exterior calculus ------------------------------------------------------

def d(form: PolyForm) -> PolyForm:
    """Exterior derivative; rejects top-degree input."""
    if form.p == 0:
        (f,) = form.components
        return PolyForm.one_form(f.diff(0), f.diff(1))
    if form.p == 1:
        fx, fy = form.components
        return PolyForm.two_form(fy.diff(0) - fx.diff(1))
    raise ValueError("d is undefined on 2-forms in two dimensions")


def delta(form: PolyForm) -> PolyForm:
    """Codifferential (formal adjoint of d); rejects 0-form input."""
    if form.p == 1:
        fx, fy = form.components
        return PolyForm.scalar(-(fx.diff(0) + fy.diff(1)))
    if form.p == 2:
        (v,) = form.components
        return PolyForm.one_form(v.diff(1), -v.diff(0))
    raise ValueError("delta is undefined on 0-forms")


def laplacian(form: PolyForm) -> PolyForm:
    """Hodge Laplacian (positive convention); componentwise on flat domains."""
    comps = tuple(-(c.diff(0).diff(0) + c.diff(1).diff(1)) for c in form.components)
    return PolyForm(form.p, comps)


def contract(field: PolyVectorField, form: PolyForm) -> PolyForm:
    """Interior product field -| form (degree drops by one)."""
    if form.p == 1:
        fx, fy = form.components
        return PolyForm.scalar(field.fx * fx + field.fy * fy)
    if form.p == 2:
        (v,) = form.components
        # F -| (v dx^dy) = v (F_x dy - F_y dx)
        return PolyForm.one_form(-(field.fy * v), field.fx * v)
    raise ValueError("cannot contract a 0-form")


def wedge(field: PolyVectorField, form: PolyForm) -> PolyForm:
    """Wedge with the field's metric-dual 1-form (degree rises by one)."""
    if form.p == 0:
        (g,) = form.components
        return PolyForm.one_form(field.fx * g, field.fy * g)
    if form.p == 1:
        fx, fy = form.components
        return PolyForm.two_form(field.fx * fy - field.fy * fx)
    raise ValueError("wedge with a 2-form vanishes in two dimensions")


def t_f_apply_poly(field: PolyVectorField, form: PolyForm) -> PolyForm:
    """Endomorphism inserting the field's covariant derivative into one slot.

    Vanishes on 0-forms; multiplies 2-forms by div F; acts as J^T on the
    component vector of a 1-form.
    """
    if form.p == 0:
        return PolyForm.scalar(ZERO)
    J = field.jacobian()
    if form.p == 1:
        ax, ay = form.components
        return PolyForm.one_form(J[0][0] * ax + J[1][0] * ay,
                                 J[0][1] * ax + J[1][1] * ay)
    (v,) = form.components
    return PolyForm.two_form(field.divergence() * v)


def nabla_F(field: PolyVectorField, form: PolyForm) -> PolyForm:
    """Directional covariant derivative along the field (componentwise, flat)."""
    comps = tuple(field.fx * c.diff(0) + field.fy * c.diff(1) for c in form.components)
    return PolyForm(form.p, comps)


def lie_derivative(field: PolyVectorField, form: PolyForm) -> PolyForm:
    """Cartan's rule d(F -| w) + F -| dw."""
    if form.p == 0:
        return nabla_F(field, form)
    if form.p == 2:
        return d(contract(field, form))
    return add(d(contract(field, form)), contract(field, d(form)))


def add(a: PolyForm, b: PolyForm) -> PolyForm:
    if a.p != b.p:
        raise ValueError("form degrees differ")
    return PolyForm(a.p, tuple(x + y for x, y in zip(a.components, b.components)))


def sub(a: PolyForm, b: PolyForm) -> PolyForm:
    if a.p != b.p:
        raise ValueError("form degrees differ")
    return PolyForm(a.p, tuple(x - y for x, y in zip(a.components, b.components)))


def inner_samples(a: PolyForm, b: PolyForm, x, y) -> np.ndarray:
    """Pointwise inner product samples of two forms of equal degree."""
    if a.p != b.p:
        raise ValueError("form degrees differ")
    return np.sum(a.eval(x, y) * b.eval(x, y), axis=0)


def grad_norm2_samples(form: PolyForm, x, y) -> np.ndarray:
    """|nabla w|^2 samples (full componentwise covariant derivative)."""
    acc = 0.0
    for c in form.components:
        acc = acc + c.diff(0)(x, y) ** 2 + c.diff(1)(x, y) ** 2
    return acc


def random_poly(rng: np.random.Generator, max_degree: int) -> Poly2:
    c = rng.uniform(-1.0, 1.0, size=(max_degree + 1, max_degree + 1))
    # keep only total degree <= max_degree
    for i in range(max_degree + 1):
        for j in range(max_degree + 1):
            if i + j > max_degree:
                c[i, j] = 0.0
    return Poly2(c)


def random_form(rng: np.random.Generator, p: int, max_degree: int) -> PolyForm:
    n_comp = {0: 1, 1: 2, 2: 1}[p]
    return PolyForm(p, tuple(random_poly(rng, max_degree) for _ in range(n_comp)))


def random_field(rng: np.random.Generator, max_degree: int) -> PolyVectorField:
    return PolyVectorField(random_poly(rng, max_degree), random_poly(rng, max_degree))
