import numpy as np
import pytest

from formspect import polyforms as pfm
from formspect import rellich
from formspect.rellich import VectorFieldSpec, rellich_ledger, reilly_residual


def test_position_field_flags():
    F = VectorFieldSpec.position((0.4, -0.3))
    assert F.gradient_field
    rot = VectorFieldSpec.custom(-pfm.Y, pfm.X)
    assert not rot.gradient_field
    with pytest.raises(ValueError):
        VectorFieldSpec(pfm.PolyVectorField.make(-pfm.Y, pfm.X), gradient_field=True)


@pytest.mark.parametrize("p", [0, 1, 2])
def test_ledger_position_field(unit_square, rng, p):
    F = VectorFieldSpec.position((0.5, 0.5))
    w = pfm.random_form(rng, p, 3)
    led = rellich_ledger(unit_square, F, w)
    assert led.relative_residual < 1e-12
    # gradient fields kill the dF contraction term
    assert abs(led.interior_terms[1]) < 1e-12
    assert led.normal_convention == "inward"


def test_ledger_nongradient_field(ref_triangle, rng):
    F = VectorFieldSpec.custom(-pfm.Y * pfm.Y, pfm.X * pfm.X)
    w = pfm.random_form(rng, 1, 3)
    led = rellich_ledger(ref_triangle, F, w)
    assert led.relative_residual < 1e-12


def test_ledger_to_dict(unit_square, rng):
    led = rellich_ledger(unit_square, VectorFieldSpec.position((0.5, 0.5)),
                         pfm.random_form(rng, 1, 2))
    d = led.to_dict()
    for key in ("A_flux_energy", "B_delta_cross", "C_dw_cross", "D_deltaw_cross"):
        assert key in d["boundary_terms"]
    for key in ("div_energy", "dF_contraction", "T_dw", "T_deltaw"):
        assert key in d["interior_terms"]
    assert abs(d["lhs"] - d["rhs"]) == d["residual"]


def test_lie_decomposition_residual(rng):
    x, y = rng.uniform(-1, 1, 30), rng.uniform(-1, 1, 30)
    for p in (0, 1, 2):
        F = pfm.random_field(rng, 2)
        w = pfm.random_form(rng, p, 3)
        assert rellich.lie_decomposition_residual(F, w, x, y) < 1e-10


def test_t_f_apply_samples(rng):
    x, y = rng.uniform(-1, 1, 20), rng.uniform(-1, 1, 20)
    F = VectorFieldSpec.position((0.0, 0.0))
    w = pfm.random_form(rng, 2, 2)
    out = rellich.t_f_apply(F, w, x, y)
    assert np.allclose(out, 2.0 * w.eval(x, y))


def test_df_contract_degrees(rng):
    F = pfm.random_field(rng, 2)
    assert rellich.df_contract(F, pfm.random_form(rng, 0, 2)).components[0].is_zero()
    assert rellich.df_contract(F, pfm.random_form(rng, 1, 2)).components[0].is_zero()
    grad = pfm.PolyVectorField.position((0.0, 0.0))
    v = pfm.random_form(rng, 2, 2)
    assert rellich.df_contract(grad, v).components[0].is_zero(1e-14)


def test_reilly_rotational_disk():
    # omega = -y dx + x dy on the unit disk: 4 pi = 2 pi + 2 pi
    from formspect import mesh as meshmod
    w = pfm.PolyForm.one_form(-pfm.Y, pfm.X)
    res = []
    for h in (0.2, 0.1, 0.05):
        m = meshmod.gen_disk(1.0, h)
        out = reilly_residual(m, w, 1.0)
        res.append(out["residual"])
        assert abs(out["lhs"] - 4 * np.pi) < 4 * h
        assert abs(out["gradient_term"] - 2 * np.pi) < 2 * h
        assert abs(out["boundary_term"] - 2 * np.pi) < 2 * h
    # residual decays at rate >= 1
    rate = np.log(res[0] / res[2]) / np.log(4.0)
    assert rate >= 1.0
