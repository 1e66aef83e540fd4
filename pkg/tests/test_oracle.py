import mpmath
import numpy as np
import pytest
from scipy.special import jn_zeros, jnp_zeros

from formspect import oracle


@pytest.mark.parametrize("nu", [0, 1, 2, 3])
def test_bessel_zero_vs_scipy(nu):
    want = jn_zeros(nu, 4)
    for k in range(1, 5):
        assert abs(oracle.bessel_zero(nu, k) - want[k - 1]) < 1e-12


@pytest.mark.parametrize("nu", [0, 1, 2])
def test_bessel_derivative_zero_vs_scipy(nu):
    want = jnp_zeros(nu, 3)
    for k in range(1, 4):
        assert abs(oracle.bessel_zero(nu, k, derivative=True) - want[k - 1]) < 1e-12


def test_bessel_zero_vs_mpmath():
    # second independent table
    for nu, k in [(0, 1), (1, 2), (2, 1)]:
        want = float(mpmath.besseljzero(nu, k))
        assert abs(oracle.bessel_zero(nu, k) - want) < 1e-12
        # mpmath counts x = 0 as the first zero of J0'; shift for nu = 0
        wantd = float(mpmath.besseljzero(nu, k + (1 if nu == 0 else 0),
                                         derivative=1))
        assert abs(oracle.bessel_zero(nu, k, derivative=True) - wantd) < 1e-12


def test_bessel_zero_validation():
    with pytest.raises(ValueError):
        oracle.bessel_zero(0, 0)


def test_dirichlet_scalar_disk():
    vals = oracle.disk_scalar_spectrum("dirichlet", 1.0, 5)
    j01, j11, j21 = jn_zeros(0, 1)[0], jn_zeros(1, 1)[0], jn_zeros(2, 1)[0]
    want = sorted([j01 ** 2, j11 ** 2, j11 ** 2, j21 ** 2, j21 ** 2])
    assert np.allclose(vals, want, rtol=1e-12)
    assert abs(vals[0] - 5.783185962946785) < 1e-10


def test_neumann_scalar_disk():
    vals = oracle.disk_scalar_spectrum("neumann", 1.0, 3)
    j11p = jnp_zeros(1, 1)[0]
    assert np.allclose(vals[:2], j11p ** 2, rtol=1e-12)
    assert abs(vals[0] - 3.3899936) < 1e-4


def test_steklov_scalar_disk():
    vals = oracle.disk_scalar_spectrum("steklov", 2.0, 6)
    assert np.allclose(vals, np.array([0, 1, 1, 2, 2, 3]) / 2.0)


def test_bsd_bsn_scalar_disk():
    q = oracle.disk_scalar_spectrum("bsd", 1.0, 3)
    lam = oracle.disk_scalar_spectrum("dirichlet", 1.0, 3)
    assert np.allclose(q, lam ** 2)
    ell = oracle.disk_scalar_spectrum("bsn", 1.0, 6)
    assert np.allclose(ell, [4, 4, 24, 24, 72, 72])


def test_form_spectra_disk():
    lam1 = oracle.disk_form_spectrum("dirichlet", 1, 1.0, 4)
    lam0 = oracle.disk_scalar_spectrum("dirichlet", 1.0, 2)
    assert np.allclose(lam1, np.sort(np.repeat(lam0, 2)))
    mu1 = oracle.disk_form_spectrum("neumann", 1, 1.0, 6)
    merged = np.sort(np.concatenate([
        oracle.disk_scalar_spectrum("neumann", 1.0, 6),
        oracle.disk_scalar_spectrum("dirichlet", 1.0, 6)]))[:6]
    assert np.allclose(mu1, merged)
    sig1 = oracle.disk_form_spectrum("steklov", 1, 1.0, 7)
    assert np.allclose(sig1, [2, 2, 2, 3, 3, 4, 4])
    # degrees 0 and 2 coincide
    for prob in ("dirichlet", "neumann", "steklov"):
        a = oracle.disk_form_spectrum(prob, 0, 1.0, 4)
        b = oracle.disk_form_spectrum(prob, 2, 1.0, 4)
        assert np.allclose(a, b, rtol=1e-14)


def test_radius_scaling():
    for prob, power in [("dirichlet", 2), ("steklov", 1), ("bsn", 3)]:
        a = oracle.disk_scalar_spectrum(prob, 1.0, 4)
        b = oracle.disk_scalar_spectrum(prob, 2.0, 4)
        assert np.allclose(a, b * 2.0 ** power, rtol=1e-12)


def test_disk_bsd_first():
    assert oracle.disk_bsd_first(0.5) == 4.0
    with pytest.raises(ValueError):
        oracle.disk_bsd_first(0.0)


def test_oracle_validation():
    with pytest.raises(ValueError):
        oracle.disk_scalar_spectrum("dirichlet", -1.0, 3)
    with pytest.raises(ValueError):
        oracle.disk_scalar_spectrum("nope", 1.0, 3)
    with pytest.raises(ValueError):
        oracle.disk_form_spectrum("dirichlet", 3, 1.0, 3)
    with pytest.raises(ValueError):
        oracle.disk_form_spectrum("bsd", 1, 1.0, 3)


def test_dense_brute(rng):
    A = rng.standard_normal((20, 20))
    A = A @ A.T
    vals = oracle.dense_brute(A, np.eye(20))
    assert np.allclose(vals, np.linalg.eigvalsh(A))
    with pytest.raises(ValueError):
        oracle.dense_brute(np.eye(501), np.eye(501))
