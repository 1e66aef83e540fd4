"""Generalized symmetric eigenvalue solvers for the assembled operators.

All problems reduce to A x = lambda B x with A symmetric positive
semidefinite and B symmetric positive definite on the relevant subspace.
Small problems go through dense LAPACK for reliability; large sparse ones
use shift-invert Lanczos anchored slightly below zero so that genuine
kernel modes are found first.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.linalg import eigh

DENSE_CUTOFF = 500


@dataclass(frozen=True)
class SpectralResult:
    """Eigenvalues sorted ascending, with matching eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray
    meta: dict = field(default_factory=dict)

    def nonzero(self, threshold: float) -> "SpectralResult":
        keep = self.values > threshold
        return SpectralResult(self.values[keep], self.vectors[:, keep], dict(self.meta))


def _as_dense(mat) -> np.ndarray:
    return mat.toarray() if sp.issparse(mat) else np.asarray(mat)


def solve_gevp(A, B, k: int, dense_cutoff: int = DENSE_CUTOFF) -> SpectralResult:
    """Lowest k eigenpairs of A x = lambda B x (A PSD, B PD)."""
    n = A.shape[0]
    if n == 0:
        raise ValueError("empty operator")
    k = min(k, n)
    if n <= dense_cutoff:
        vals, vecs = eigh(_as_dense(A), _as_dense(B))
        return SpectralResult(vals[:k], vecs[:, :k], {"method": "dense", "n": n})
    A = sp.csr_matrix(A)
    B = sp.csr_matrix(B)
    # anchor below zero so kernel modes are resolved by shift-invert
    scale = abs(A.diagonal()).max() / max(abs(B.diagonal()).max(), 1e-300)
    sigma = -1e-3 * max(scale, 1e-10)
    vals, vecs = spla.eigsh(A, k=k, M=B, sigma=sigma, which="LM")
    order = np.argsort(vals)
    return SpectralResult(vals[order], vecs[:, order],
                          {"method": "lanczos", "n": n, "sigma": sigma})


def kernel_dimension(values: np.ndarray, zero_threshold: float) -> int:
    return int(np.sum(np.abs(values) <= zero_threshold))


def zero_threshold(values: np.ndarray, rel: float = 1e-8) -> float:
    """Scale-aware threshold separating kernel modes from the true spectrum."""
    scale = float(np.max(np.abs(values))) if len(values) else 1.0
    return rel * max(scale, 1.0)


def trace_reduce(A, interior: np.ndarray, boundary: np.ndarray):
    """Schur complement of A onto the boundary index set.

    Returns (S, lift) where S = A_bb - A_bi A_ii^{-1} A_ib is the
    Dirichlet-to-Neumann style boundary operator and lift maps boundary
    values to the full discretely-harmonic extension.
    """
    A = sp.csr_matrix(A)
    Aii = A[np.ix_(interior, interior)].tocsc()
    Aib = A[np.ix_(interior, boundary)]
    Abi = A[np.ix_(boundary, interior)]
    Abb = A[np.ix_(boundary, boundary)]
    if len(interior) == 0:
        S = Abb.toarray()

        def lift(xb):
            return np.asarray(xb)
        return S, lift
    lu = spla.splu(Aii)
    X = lu.solve(Aib.toarray())
    S = Abb.toarray() - _as_dense(Abi) @ X
    S = 0.5 * (S + S.T)
    n = A.shape[0]

    def lift(xb):
        full = np.zeros(n)
        full[boundary] = xb
        full[interior] = -X @ np.asarray(xb)
        return full
    return S, lift


def deflate(result: SpectralResult, expected_kernel: int | None = None,
            rel: float = 1e-8) -> SpectralResult:
    """Drop kernel modes; optionally check their count against expectation."""
    thr = zero_threshold(result.values, rel)
    kdim = kernel_dimension(result.values, thr)
    if expected_kernel is not None and kdim != expected_kernel:
        raise ValueError(f"kernel dimension {kdim}, expected {expected_kernel}")
    out = result.nonzero(thr)
    meta = dict(out.meta)
    meta["kernel_dim"] = kdim
    return SpectralResult(out.values, out.vectors, meta)
