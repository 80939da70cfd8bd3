"""Quantum operations in Kraus form and density-matrix checks.

A quantum operation is kept as its list of Kraus matrices {E_k} and acts on
a matrix A as sum_k E_k A E_k^dagger. It is trace preserving when
sum_k E_k^dagger E_k equals the identity and trace nonincreasing when that
sum is dominated by the identity. Two operations with equal completeness
sums assign the same trace to every input; that coarse equality (eqsim) is
the right notion of "same total probability weight" here and is much weaker
than equality of the maps themselves.

Kraus lists are never minimized automatically: sums and compositions simply
concatenate or multiply out the lists, so the representation stays cheap
and predictable. Use compact() to drop numerically zero members.
"""

from __future__ import annotations

import numpy as np

from . import linalg
from .errors import DimensionError


class QuantumOperation:
    """Completely positive map given by a non-empty list of Kraus matrices."""

    __slots__ = ("kraus", "dim")

    def __init__(self, kraus):
        mats = [linalg.as_complex_matrix(k, "Kraus matrix") for k in kraus]
        if not mats:
            raise DimensionError("an operation needs at least one Kraus matrix")
        d = mats[0].shape[0]
        for k in mats:
            if k.shape != (d, d):
                raise DimensionError(
                    f"Kraus matrices must all be square of one size, got {k.shape} next to ({d}, {d})"
                )
        self.kraus = tuple(mats)
        self.dim = d

    @classmethod
    def identity(cls, dim: int) -> "QuantumOperation":
        return cls([np.eye(dim, dtype=np.complex128)])

    @classmethod
    def zero(cls, dim: int) -> "QuantumOperation":
        """The zero operation, canonically a single all-zero Kraus matrix."""
        return cls([np.zeros((dim, dim), dtype=np.complex128)])

    def __repr__(self) -> str:
        return f"QuantumOperation(dim={self.dim}, kraus={len(self.kraus)})"

    def apply(self, a) -> np.ndarray:
        """sum_k E_k a E_k^dagger."""
        a = np.asarray(a, dtype=np.complex128)
        if a.shape != (self.dim, self.dim):
            raise DimensionError(f"operand shape {a.shape} does not match dim {self.dim}")
        out = np.zeros((self.dim, self.dim), dtype=np.complex128)
        for k in self.kraus:
            out += k @ a @ k.conj().T
        return out

    def completeness_sum(self) -> np.ndarray:
        """sum_k E_k^dagger E_k."""
        out = np.zeros((self.dim, self.dim), dtype=np.complex128)
        for k in self.kraus:
            out += k.conj().T @ k
        return out

    def is_trace_preserving(self, tol: float | None = None) -> bool:
        i = np.eye(self.dim)
        return linalg.max_abs(self.completeness_sum() - i) <= linalg.resolve_tol(tol)

    def is_trace_nonincreasing(self, tol: float | None = None) -> bool:
        i = np.eye(self.dim)
        return linalg.is_positive_semidefinite(i - self.completeness_sum(), tol)

    def superop_matrix(self) -> np.ndarray:
        """Matrix of the map on row-stacked vectors: sum_k E_k (x) conj(E_k).

        Satisfies superop_matrix() @ vec(rho) == vec(apply(rho)) and is a
        homomorphism: the matrix of a sum is the sum of matrices, the matrix
        of a composition is the product.
        """
        d2 = self.dim * self.dim
        out = np.zeros((d2, d2), dtype=np.complex128)
        for k in self.kraus:
            out += np.kron(k, k.conj())
        return out

    def is_zero(self, tol: float | None = None) -> bool:
        tol = linalg.resolve_tol(tol)
        return all(np.linalg.norm(k) <= tol for k in self.kraus)

    def compact(self, tol: float | None = None) -> "QuantumOperation":
        """Drop Kraus matrices of Frobenius norm <= tol; zero stays canonical."""
        tol = linalg.resolve_tol(tol)
        kept = [k for k in self.kraus if np.linalg.norm(k) > tol]
        if not kept:
            return QuantumOperation.zero(self.dim)
        return QuantumOperation(kept)


def op_sum(e: QuantumOperation, f: QuantumOperation) -> QuantumOperation:
    """Pointwise sum: the Kraus lists concatenate.

    The sum of two trace-nonincreasing operations may exceed the identity in
    its completeness sum; that is legitimate for intermediate values and is
    caught by model validators where it matters.
    """
    if e.dim != f.dim:
        raise DimensionError(f"operation dims differ: {e.dim} vs {f.dim}")
    return QuantumOperation(e.kraus + f.kraus)


def op_compose(e: QuantumOperation, f: QuantumOperation) -> QuantumOperation:
    """Composition e after f: Kraus matrices are all products E_j F_k."""
    if e.dim != f.dim:
        raise DimensionError(f"operation dims differ: {e.dim} vs {f.dim}")
    return QuantumOperation([a @ b for a in e.kraus for b in f.kraus])


def eqsim(e: QuantumOperation, f: QuantumOperation, tol: float | None = None) -> bool:
    """Trace equivalence: equal completeness sums within tol.

    Holds exactly when Tr(e(rho)) == Tr(f(rho)) for every density matrix rho.
    """
    if e.dim != f.dim:
        raise DimensionError(f"operation dims differ: {e.dim} vs {f.dim}")
    diff = e.completeness_sum() - f.completeness_sum()
    return linalg.max_abs(diff) <= linalg.resolve_tol(tol)


def density_defects(m) -> tuple[float, float, float]:
    """(hermiticity defect, negative-eigenvalue magnitude, trace excess over 1).

    A partial density matrix is positive semidefinite with trace at most 1;
    the third component is max(0, Tr - 1) and ignores the imaginary part of
    the trace only after the hermiticity defect has accounted for it.
    """
    a = np.asarray(m, dtype=np.complex128)
    herm, neg = linalg.psd_defects(a)
    excess = max(0.0, float(np.trace(a).real) - 1.0)
    return herm, neg, excess


def is_partial_density(m, tol: float | None = None) -> bool:
    tol = linalg.resolve_tol(tol)
    herm, neg, excess = density_defects(m)
    return herm <= tol and neg <= tol and excess <= tol
