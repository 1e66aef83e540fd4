import numpy as np
import pytest
import scipy.sparse as sp

from formspect import forms_core as fcore
from formspect import polyforms as pfm
from formspect.forms_core import FESpace, FormField
from formspect.polyforms import PolyForm


@pytest.mark.parametrize("order", [1, 2])
def test_scalar_mass_total(disk_coarse, order):
    space = FESpace(disk_coarse, order)
    ones = np.ones(space.n_nodes)
    area = float(disk_coarse.triangle_areas().sum())
    assert abs(ones @ (fcore.scalar_mass(space) @ ones) - area) < 1e-12


@pytest.mark.parametrize("order", [1, 2])
def test_boundary_mass_total(disk_coarse, order):
    space = FESpace(disk_coarse, order)
    ones = np.ones(space.n_nodes)
    per = sum(f.length for f in disk_coarse.boundary_facets)
    assert abs(ones @ (fcore.boundary_mass(space) @ ones) - per) < 1e-12


@pytest.mark.parametrize("order", [1, 2])
def test_stiffness_energy_exact(unit_square, order):
    # u = 2x - 3y is in every space; |grad u|^2 = 13 over the unit square
    space = FESpace(unit_square, order)
    ops = fcore.assemble(unit_square, 0, order)
    u = space.interpolate(lambda x, y: 2 * x - 3 * y)
    assert abs(u @ (ops.G @ u) - 13.0) < 1e-11


def test_quadratic_energy_order2(unit_square):
    # u = x^2: grad energy = integral 4 x^2 = 4/3, exact for order 2
    ops = fcore.assemble(unit_square, 0, 2)
    u = ops.space.interpolate(lambda x, y: x ** 2)
    assert abs(u @ (ops.G @ u) - 4.0 / 3.0) < 1e-11
    assert abs(u @ (ops.M @ u) - 1.0 / 5.0) < 1e-11


@pytest.mark.parametrize("p", [0, 1, 2])
def test_assemble_shapes(disk_coarse, p):
    ops = fcore.assemble(disk_coarse, p, 1)
    nc = fcore.n_components(p)
    assert ops.M.shape == (nc * ops.space.n_nodes,) * 2
    assert ops.n_dofs == nc * ops.space.n_nodes
    # all four matrices symmetric
    for mat in (ops.M, ops.B, ops.G, ops.Mb):
        assert abs(mat - mat.T).max() < 1e-12


def test_p2_equals_p0_operators(disk_coarse):
    a = fcore.assemble(disk_coarse, 0, 1)
    b = fcore.assemble(disk_coarse, 2, 1)
    assert abs(a.B - b.B).max() == 0.0
    assert abs(a.M - b.M).max() == 0.0


def test_gaffney_zero_trace(disk_h01, rng):
    # B and G agree exactly on fields vanishing on the boundary
    ops = fcore.assemble(disk_h01, 1, 2)
    Z = fcore.dirichlet_basis(ops)
    x = Z @ rng.standard_normal(Z.shape[1])
    f = FormField(1, 2, x)
    eB = fcore.energy(ops, f, "B")
    eG = fcore.energy(ops, f, "G")
    assert abs(eB - eG) < 1e-10 * max(1.0, abs(eG))


def test_form_energy_vs_exact(unit_square):
    # w = (y^2, x): dw = 1 - 2y, delta w = 0; energy = int (1-2y)^2 = 1/3
    ops = fcore.assemble(unit_square, 1, 2)
    w = PolyForm.one_form(pfm.Y * pfm.Y, pfm.X)
    f = fcore.interpolate_form(ops.space, w)
    assert abs(fcore.energy(ops, f, "B") - 1.0 / 3.0) < 1e-11


@pytest.mark.parametrize("p", [1, 2])
def test_weak_delta_matches_exact(unit_square, p, rng):
    # for polynomial data inside the space, the weak codifferential is the
    # L2 projection of the exact one, which the space represents exactly
    ops = fcore.assemble(unit_square, p, 2)
    if p == 1:
        w = PolyForm.one_form(pfm.random_poly(rng, 2), pfm.random_poly(rng, 2))
    else:
        w = PolyForm.two_form(pfm.random_poly(rng, 2))
    f = fcore.interpolate_form(ops.space, w)
    out = fcore.weak_delta(ops, f)
    exact = fcore.interpolate_form(ops.space, pfm.delta(w))
    scale = max(1.0, float(np.abs(exact.coefficients).max()))
    assert np.max(np.abs(out.coefficients - exact.coefficients)) < 1e-9 * scale


def test_apply_d_of_gradient_vanishes(disk_coarse, rng):
    space = FESpace(disk_coarse, 1)
    u = FormField(0, 1, rng.standard_normal(space.n_nodes))
    grads = fcore.apply_d(space, u)
    for g in grads:
        two = pfm.d(g)
        assert np.max(np.abs(two.components[0].c)) < 1e-10


def test_node_boundary_normals_square(unit_square):
    space = FESpace(unit_square, 1)
    normals = space.node_boundary_normals()
    kinds = [k for k, _ in normals.values()]
    assert kinds.count("corner") == 4
    for node, (kind, nv) in normals.items():
        if kind == "smooth":
            # axis-aligned sides: normal is a signed unit basis vector
            assert abs(abs(nv[0]) + abs(nv[1]) - 1.0) < 1e-12


def test_coarse_disk_all_smooth(disk_coarse):
    # 24 boundary facets put adjacent normals exactly at the 15 degree
    # threshold; the inclusive convention must classify them as smooth
    space = FESpace(disk_coarse, 1)
    normals = space.node_boundary_normals()
    assert all(kind == "smooth" for kind, _ in normals.values())


def test_tangential_basis_kills_normal_component(disk_h01, rng):
    ops = fcore.assemble(disk_h01, 1, 1)
    Z, bred = fcore.tangential_basis(ops)
    x = Z @ rng.standard_normal(Z.shape[1])
    nn = ops.space.n_nodes
    normals = ops.space.node_boundary_normals()
    for node, (kind, nv) in normals.items():
        val = nv @ np.array([x[node], x[nn + node]])
        assert abs(val) < 1e-12
    assert len(bred) > 0


def test_ibp_residuals_machine_zero(unit_square, rng):
    for p in (0, 1, 2):
        w = pfm.random_form(rng, p, 3)
        res = fcore.ibp_residuals(unit_square, w)
        for name, val in res.items():
            assert val < 1e-12, (p, name, val)


def test_ibp_pairing_cross_degrees(ref_triangle, rng):
    # pairing identity with an independent higher-degree partner
    w0 = pfm.random_form(rng, 0, 3)
    b1 = pfm.random_form(rng, 1, 3)
    res = fcore.ibp_residuals(ref_triangle, w0, b1)
    assert res["pairing"] < 1e-12


def test_interpolate_form_blocks(disk_coarse):
    space = FESpace(disk_coarse, 1)
    w = PolyForm.one_form(pfm.X, pfm.Y)
    f = fcore.interpolate_form(space, w)
    assert np.allclose(f.component(0, space.n_nodes), space.nodes[:, 0])
    assert np.allclose(f.component(1, space.n_nodes), space.nodes[:, 1])


def test_export_matrix_market(tmp_path, disk_coarse):
    ops = fcore.assemble(disk_coarse, 0, 1)
    ops.export_matrix_market("disk", tmp_path)
    for label in ("M", "B", "G", "Mb"):
        assert (tmp_path / f"disk_{label}.mtx").exists()


def test_assemble_validation(disk_coarse):
    with pytest.raises(ValueError):
        fcore.assemble(disk_coarse, 3, 1)
    with pytest.raises(ValueError):
        FESpace(disk_coarse, 3)
