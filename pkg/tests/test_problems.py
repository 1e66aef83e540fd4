import numpy as np
import pytest

from formspect import oracle, problems
from formspect.problems import ProblemSpec


def _vals(pid, p, k, mesh, order=2):
    return problems.solve(ProblemSpec(pid, p, k, mesh, order)).values


def test_spec_validation(disk_coarse):
    with pytest.raises(ValueError):
        ProblemSpec("nope", 0, 1, disk_coarse)
    with pytest.raises(ValueError):
        ProblemSpec("dirichlet", 3, 1, disk_coarse)
    with pytest.raises(ValueError):
        ProblemSpec("bsd_scalar", 1, 1, disk_coarse)
    with pytest.raises(ValueError):
        ProblemSpec("dirichlet", 0, 0, disk_coarse)


def test_dirichlet_scalar_disk(disk_h01):
    vals = _vals("dirichlet", 0, 3, disk_h01)
    want = oracle.disk_scalar_spectrum("dirichlet", 1.0, 3)
    assert np.allclose(vals, want, rtol=5e-3)


def test_dirichlet_forms_disk(disk_h01):
    vals = _vals("dirichlet", 1, 4, disk_h01)
    want = oracle.disk_form_spectrum("dirichlet", 1, 1.0, 4)
    assert np.allclose(vals, want, rtol=5e-3)


def test_neumann_scalar_disk(disk_h01):
    vals = _vals("neumann_absolute", 0, 3, disk_h01)
    want = oracle.disk_scalar_spectrum("neumann", 1.0, 3)
    assert np.allclose(vals, want, rtol=5e-3)


def test_neumann_forms_disk(disk_h01):
    vals = _vals("neumann_absolute", 1, 4, disk_h01)
    want = oracle.disk_form_spectrum("neumann", 1, 1.0, 4)
    assert np.allclose(vals, want, rtol=1e-2)


def test_steklov_scalar_disk(disk_h01):
    # solver removes the constant kernel mode; oracle lists it explicitly
    vals = _vals("steklov", 0, 5, disk_h01)
    want = oracle.disk_scalar_spectrum("steklov", 1.0, 6)[1:]
    assert np.allclose(vals, want, rtol=5e-3)


def test_steklov_forms_disk(disk_h01):
    vals = _vals("steklov", 1, 5, disk_h01)
    want = oracle.disk_form_spectrum("steklov", 1, 1.0, 5)
    assert np.allclose(vals, want, rtol=2e-2)


def test_bsd_scalar_disk(disk_h01):
    vals = _vals("bsd_scalar", 0, 4, disk_h01)
    # harmonic monomial quotients 2(m+1)/R, multiplicity two for m >= 1
    assert np.allclose(vals, [2.0, 4.0, 4.0, 6.0], rtol=5e-3)


def test_bsn_scalar_disk(disk_h01):
    vals = _vals("bsn_scalar", 0, 4, disk_h01)
    want = oracle.disk_scalar_spectrum("bsn", 1.0, 4)
    assert np.allclose(vals, want, rtol=1e-2)


def test_bsd2_p0_equals_scalar(disk_h01):
    a = _vals("bsd2", 0, 3, disk_h01)
    b = _vals("bsd_scalar", 0, 3, disk_h01)
    assert np.allclose(a, b, rtol=1e-14)
    c = _vals("bsd2", 2, 3, disk_h01)
    assert np.allclose(a, c, rtol=1e-14)


def test_bsd2_p1_above_bsd1(disk_h01):
    # the constrained quotient dominates the unconstrained one for each k,
    # up to discretization error (the two solvers discretize differently)
    qq = _vals("bsd2", 1, 3, disk_h01)
    q = _vals("bsd1", 1, 3, disk_h01)
    assert np.all(qq >= q - 1e-3 * q)
    assert abs(qq[0] - 4.0) < 0.1  # self-converged disk value


def test_bsd1_first_value(disk_h01):
    for p in (0, 1):
        vals = _vals("bsd1", p, 2, disk_h01)
        assert abs(vals[0] - oracle.disk_bsd_first(1.0)) < 2e-2
    res = problems.solve(ProblemSpec("bsd1", 1, 2, disk_h01, 2))
    assert res.meta["label"] == "harmonic-ratio spectrum"


def test_biharmonic_forces_order2(disk_coarse):
    res = problems.solve(ProblemSpec("bsd_scalar", 0, 1, disk_coarse, 1))
    assert res.meta["order"] == 2


def test_radius_scaling_solver():
    from formspect import mesh as meshmod
    m1 = meshmod.gen_disk(1.0, 0.25)
    m2 = meshmod.gen_disk(2.0, 0.5)
    lam1 = _vals("dirichlet", 0, 1, m1)[0]
    lam2 = _vals("dirichlet", 0, 1, m2)[0]
    assert abs(lam1 - 4.0 * lam2) < 1e-10 * lam1
    ell1 = _vals("bsn_scalar", 0, 1, m1)[0]
    ell2 = _vals("bsn_scalar", 0, 1, m2)[0]
    assert abs(ell1 - 8.0 * ell2) < 1e-8 * ell1
