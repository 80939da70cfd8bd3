"""Dense complex linear algebra kernels.

Matrices are plain numpy arrays with dtype complex128. Vectorization is
row-stacking throughout: row i of a matrix is laid out before row i+1, so
vec([[a, b], [c, d]]) = (a, b, c, d). Two identities follow from that
convention and are relied on everywhere else:

    vec(A X B)  =  (A (x) B^T) vec(X)
    Tr(A B)     =  vec(A^T)^T vec(B)

where (x) is the Kronecker product. Numerical comparisons use a global
default tolerance of 1e-9 unless a caller passes its own.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DimensionError

DEFAULT_TOL = 1e-9

_default_tol = DEFAULT_TOL


def get_default_tol() -> float:
    """Current global comparison tolerance."""
    return _default_tol


def set_default_tol(tol: float) -> None:
    """Set the global comparison tolerance (must be positive)."""
    global _default_tol
    tol = float(tol)
    if not math.isfinite(tol) or tol <= 0.0:
        raise ValueError(f"tolerance must be positive and finite, got {tol}")
    _default_tol = tol


def resolve_tol(tol: float | None) -> float:
    """Return tol itself if given, else the global default."""
    if tol is None:
        return _default_tol
    tol = float(tol)
    if not math.isfinite(tol) or tol <= 0.0:
        raise ValueError(f"tolerance must be positive and finite, got {tol}")
    return tol


def as_complex_matrix(m, name: str = "matrix") -> np.ndarray:
    """Canonicalize to an immutable 2-D complex128 array with finite entries."""
    a = np.array(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] == 0 or a.shape[1] == 0:
        raise DimensionError(f"{name} must be a non-empty 2-D array, got shape {a.shape}")
    if not np.isfinite(a).all():
        raise DimensionError(f"{name} has non-finite entries")
    a.setflags(write=False)
    return a


def as_complex_vector(v, name: str = "vector") -> np.ndarray:
    """Canonicalize to an immutable 1-D complex128 array with finite entries."""
    a = np.array(v, dtype=np.complex128)
    if a.ndim != 1 or a.shape[0] == 0:
        raise DimensionError(f"{name} must be a non-empty 1-D array, got shape {a.shape}")
    if not np.isfinite(a).all():
        raise DimensionError(f"{name} has non-finite entries")
    a.setflags(write=False)
    return a


def max_abs(a) -> float:
    """Entrywise max-magnitude norm; 0.0 for empty input."""
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a)))


def dagger(m: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.asarray(m).conj().T


def vec(m) -> np.ndarray:
    """Row-stack a square matrix into a vector of length n*n."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"vec expects a square matrix, got shape {a.shape}")
    return a.reshape(-1).copy()


def unvec(v) -> np.ndarray:
    """Inverse of vec: reshape a length n*n vector into an n by n matrix."""
    a = np.asarray(v, dtype=np.complex128)
    if a.ndim != 1:
        raise DimensionError(f"unvec expects a 1-D array, got shape {a.shape}")
    n = math.isqrt(a.shape[0])
    if n * n != a.shape[0]:
        raise DimensionError(f"unvec expects a perfect-square length, got {a.shape[0]}")
    return a.reshape(n, n).copy()


def kron(a, b) -> np.ndarray:
    """Kronecker product, first factor major."""
    return np.kron(np.asarray(a, dtype=np.complex128), np.asarray(b, dtype=np.complex128))


def hermiticity_defect(m) -> float:
    """Entrywise max of |m - m^dagger|."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    return max_abs(a - a.conj().T)


def psd_defects(m) -> tuple[float, float]:
    """(hermiticity defect, magnitude of the most negative eigenvalue).

    The eigenvalue test symmetrizes first, so a slightly non-Hermitian input
    still gets a meaningful spectrum; the hermiticity defect reports how far
    the symmetrization had to go.
    """
    a = np.asarray(m, dtype=np.complex128)
    herm = hermiticity_defect(a)
    eigs = np.linalg.eigvalsh((a + a.conj().T) / 2.0)
    neg = max(0.0, -float(eigs.min()))
    return herm, neg


def is_hermitian(m, tol: float | None = None) -> bool:
    return hermiticity_defect(m) <= resolve_tol(tol)


def is_positive_semidefinite(m, tol: float | None = None) -> bool:
    """Hermitian within tol and all eigenvalues >= -tol."""
    tol = resolve_tol(tol)
    herm, neg = psd_defects(m)
    return herm <= tol and neg <= tol


def gram_schmidt_residual(u, basis) -> tuple[np.ndarray, float]:
    """Residual of u against an orthonormal list and its Euclidean norm.

    One pass of modified Gram-Schmidt: projections are subtracted
    sequentially, which is more stable than forming the full projector.
    The basis is assumed pairwise orthonormal; this is not re-verified.
    """
    r = np.array(u, dtype=np.complex128)
    if r.ndim != 1:
        raise DimensionError(f"expected a 1-D vector, got shape {r.shape}")
    for b in basis:
        b = np.asarray(b, dtype=np.complex128)
        if b.shape != r.shape:
            raise DimensionError(f"basis vector shape {b.shape} does not match {r.shape}")
        r = r - np.vdot(b, r) * b
    return r, float(np.linalg.norm(r))
