import numpy as np
import pytest
import scipy.sparse as sp

from formspect.spectra import (SpectralResult, deflate, kernel_dimension,
                               solve_gevp, trace_reduce, zero_threshold)


def _random_spd(rng, n, shift=0.0):
    A = rng.standard_normal((n, n))
    return A @ A.T + shift * np.eye(n)


def test_dense_path_diagonal():
    A = sp.diags([3.0, 1.0, 2.0]).tocsr()
    B = sp.identity(3, format="csr")
    res = solve_gevp(A, B, 2)
    assert np.allclose(res.values, [1.0, 2.0])
    assert res.meta["method"] == "dense"


def test_sparse_matches_dense(rng):
    n = 80
    A = sp.csr_matrix(_random_spd(rng, n))
    B = sp.csr_matrix(_random_spd(rng, n, shift=float(n)))
    dense = solve_gevp(A, B, 6, dense_cutoff=500)
    sparse = solve_gevp(A, B, 6, dense_cutoff=0)
    assert sparse.meta["method"] == "lanczos"
    assert np.allclose(dense.values, sparse.values, rtol=1e-9, atol=1e-9)


def test_sparse_resolves_kernel(rng):
    # rank-deficient A: the zero mode must come out first
    n = 60
    V = rng.standard_normal((n, n - 2))
    A = sp.csr_matrix(V @ V.T)
    B = sp.csr_matrix(_random_spd(rng, n, shift=float(n)))
    res = solve_gevp(A, B, 4, dense_cutoff=0)
    assert kernel_dimension(res.values, zero_threshold(res.values)) == 2


def test_empty_operator():
    with pytest.raises(ValueError):
        solve_gevp(sp.csr_matrix((0, 0)), sp.csr_matrix((0, 0)), 1)


def test_trace_reduce_schur(rng):
    n = 30
    A = _random_spd(rng, n, shift=1.0)
    interior = np.arange(0, 18)
    boundary = np.arange(18, n)
    S, lift = trace_reduce(sp.csr_matrix(A), interior, boundary)
    Aii = A[np.ix_(interior, interior)]
    Aib = A[np.ix_(interior, boundary)]
    Abb = A[np.ix_(boundary, boundary)]
    want = Abb - Aib.T @ np.linalg.solve(Aii, Aib)
    assert np.allclose(S, want, atol=1e-10)
    # the lift is discretely harmonic: interior residual of A @ lift vanishes
    xb = rng.standard_normal(len(boundary))
    full = lift(xb)
    assert np.allclose(full[boundary], xb)
    assert np.max(np.abs((A @ full)[interior])) < 1e-9


def test_trace_reduce_no_interior(rng):
    A = _random_spd(rng, 6, shift=1.0)
    S, lift = trace_reduce(sp.csr_matrix(A), np.array([], dtype=int), np.arange(6))
    assert np.allclose(S, A)
    assert np.allclose(lift(np.ones(6)), 1.0)


def test_deflate():
    res = SpectralResult(np.array([1e-14, 2.0, 3.0]), np.eye(3))
    out = deflate(res)
    assert np.allclose(out.values, [2.0, 3.0])
    assert out.meta["kernel_dim"] == 1
    with pytest.raises(ValueError):
        deflate(res, expected_kernel=2)


def test_nonzero_filter():
    res = SpectralResult(np.array([0.0, 5.0]), np.eye(2))
    out = res.nonzero(1e-9)
    assert out.values.tolist() == [5.0]
    assert out.vectors.shape == (2, 1)
