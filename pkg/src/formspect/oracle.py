"""Reference spectra on the disk and small brute-force cross-checks.

Disk eigenvalues come from Bessel separation of variables; the Bessel
zeros themselves are found by sign-change bisection on the scipy Bessel
functions, so the oracle shares no code path with the mesh solvers.
"""

from __future__ import annotations

import numpy as np
from scipy import special


def bessel_zero(nu: int, k: int, derivative: bool = False) -> float:
    """k-th positive zero of J_nu (or J_nu') by bracketing bisection.

    Brackets come from scanning on a fine grid past the asymptotic spacing
    of pi between consecutive zeros.
    """
    if k < 1:
        raise ValueError("zero index starts at 1")
    f = (lambda x: special.jvp(nu, x)) if derivative else (lambda x: special.jv(nu, x))
    # zeros of J_nu' for nu >= 1 start before those of J_nu; scan from near 0
    lo = 1e-9 if (derivative and nu >= 1) else max(1e-9, 0.5 * nu)
    hi = nu + (k + 2) * np.pi + 10.0
    grid = np.linspace(lo, hi, int(40 * (hi - lo)) + 2)
    vals = f(grid)
    sign_flips = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
    if len(sign_flips) < k:
        raise RuntimeError("bracket scan found too few sign changes")
    a, b = grid[sign_flips[k - 1]], grid[sign_flips[k - 1] + 1]
    for _ in range(200):
        mid = 0.5 * (a + b)
        if f(a) * f(mid) <= 0:
            b = mid
        else:
            a = mid
        if b - a < 1e-15 * max(1.0, b):
            break
    return 0.5 * (a + b)


def _collect(gen, count: int) -> np.ndarray:
    """Smallest `count` values from a lazily enlarged candidate table."""
    vals = sorted(gen(count + 2))
    while len(vals) < count:
        vals = sorted(gen(len(vals) + count))
    return np.array(vals[:count])


def disk_scalar_spectrum(problem: str, radius: float, count: int) -> np.ndarray:
    """Reference scalar spectra on the disk of given radius.

    Supported problems: 'dirichlet', 'neumann' (nonzero part),
    'steklov' (including the zero mode), 'bsd' (squared Dirichlet
    eigenvalues) and 'bsn' (nonzero part of the Neumann biharmonic ratio
    spectrum).
    """
    R = float(radius)
    if R <= 0:
        raise ValueError("radius must be positive")
    if problem == "dirichlet":
        def gen(m):
            return [(bessel_zero(nu, k) / R) ** 2
                    for nu in range(m) for k in range(1, m + 1)
                    for _ in range(1 if nu == 0 else 2)]
        return _collect(gen, count)
    if problem == "neumann":
        def gen(m):
            return [(bessel_zero(nu, k, derivative=True) / R) ** 2
                    for nu in range(1, m) for k in range(1, m + 1)
                    for _ in range(2)] + \
                   [(bessel_zero(0, k, derivative=True) / R) ** 2 for k in range(1, m + 1)]
        return _collect(gen, count)
    if problem == "steklov":
        vals = [0.0]
        m = 1
        while len(vals) < count:
            vals.extend([m / R, m / R])
            m += 1
        return np.array(vals[:count])
    if problem == "bsd":
        return disk_scalar_spectrum("dirichlet", R, count) ** 2
    if problem == "bsn":
        # radial ansatz a r^m + b r^{m+2} in each angular mode m >= 1 gives
        # one admissible ratio 2 m^2 (m + 1) / R^3 of multiplicity two
        vals = []
        m = 1
        while len(vals) < count:
            ell = 2.0 * m * m * (m + 1) / R ** 3
            vals.extend([ell, ell])
            m += 1
        return np.array(vals[:count])
    raise ValueError(f"unknown scalar problem '{problem}'")


def disk_form_spectrum(problem: str, p: int, radius: float, count: int) -> np.ndarray:
    """Reference form spectra on the disk.

    Degrees 0 and 2 coincide with the scalar problems.  For degree 1 the
    Dirichlet spectrum is the scalar Dirichlet spectrum with doubled
    multiplicity, and the nonzero absolute (Neumann) spectrum merges the
    scalar nonzero Neumann and scalar Dirichlet spectra.
    """
    if p not in (0, 1, 2):
        raise ValueError("form degree must be 0, 1 or 2")
    if p in (0, 2):
        name = {"dirichlet": "dirichlet", "neumann": "neumann",
                "steklov": "steklov"}.get(problem)
        if name is None:
            raise ValueError(f"unknown form problem '{problem}'")
        return disk_scalar_spectrum(name, radius, count)
    if problem == "dirichlet":
        base = disk_scalar_spectrum("dirichlet", radius, count)
        return np.sort(np.repeat(base, 2))[:count]
    if problem == "neumann":
        neu = disk_scalar_spectrum("neumann", radius, count)
        dir_ = disk_scalar_spectrum("dirichlet", radius, count)
        return np.sort(np.concatenate([neu, dir_]))[:count]
    if problem == "steklov":
        # componentwise-harmonic modes z^{m+2} - conj(z^m) give (m+2)/R with
        # multiplicity two; the rotational field (-y, x) adds a third 2/R
        vals = [2.0 / radius]
        m = 0
        while len(vals) < count:
            vals.extend([(m + 2) / radius, (m + 2) / radius])
            m += 1
        return np.sort(np.array(vals[:count]))
    raise ValueError(f"unknown form problem '{problem}'")


def disk_bsd_first(radius: float) -> float:
    """First harmonic-ratio boundary eigenvalue on the disk: 2 / R."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    return 2.0 / float(radius)


def dense_brute(A, B) -> np.ndarray:
    """Full dense generalized spectrum for small operators (cross-check)."""
    import scipy.sparse as sp
    from scipy.linalg import eigh
    Ad = A.toarray() if sp.issparse(A) else np.asarray(A)
    Bd = B.toarray() if sp.issparse(B) else np.asarray(B)
    if Ad.shape[0] > 500:
        raise ValueError("dense cross-check limited to 500 dofs")
    return eigh(Ad, Bd, eigvals_only=True)
