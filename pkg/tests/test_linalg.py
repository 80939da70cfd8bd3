import numpy as np
import pytest

from hqmc import linalg
from hqmc.errors import DimensionError


def test_vec_row_stacking():
    m = np.array([[1, 2], [3, 4]], dtype=complex)
    assert np.array_equal(linalg.vec(m), np.array([1, 2, 3, 4], dtype=complex))
    e01 = np.zeros((2, 2), dtype=complex)
    e01[0, 1] = 1
    assert np.array_equal(linalg.vec(e01), np.array([0, 1, 0, 0], dtype=complex))


def test_vec_rejects_non_square():
    with pytest.raises(DimensionError):
        linalg.vec(np.zeros((2, 3)))


def test_unvec_inverts_vec():
    rng = np.random.default_rng(0)
    for d in (1, 2, 3, 5):
        m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        assert linalg.max_abs(linalg.unvec(linalg.vec(m)) - m) == 0.0


def test_unvec_rejects_non_square_length():
    with pytest.raises(DimensionError):
        linalg.unvec(np.zeros(5))


def test_vec_of_product_identity():
    # vec(A X B) = (A kron B^T) vec(X)
    rng = np.random.default_rng(1)
    for _ in range(200):
        d = int(rng.integers(1, 5))
        a, x, b = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
                   for _ in range(3))
        lhs = linalg.vec(a @ x @ b)
        rhs = linalg.kron(a, b.T) @ linalg.vec(x)
        assert linalg.max_abs(lhs - rhs) <= 1e-10


def test_trace_pairing_identity():
    # tr(A B) = vec(A^T) . vec(B)
    rng = np.random.default_rng(2)
    for _ in range(200):
        d = int(rng.integers(1, 5))
        a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        b = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        lhs = np.trace(a @ b)
        rhs = linalg.vec(a.T) @ linalg.vec(b)
        assert abs(lhs - rhs) <= 1e-10


def test_dagger():
    m = np.array([[1 + 2j, 3], [4j, 5]])
    assert np.array_equal(linalg.dagger(m), np.array([[1 - 2j, -4j], [3, 5]]))


def test_hermiticity_defect():
    h = np.array([[1, 2 + 1j], [2 - 1j, 3]])
    assert linalg.hermiticity_defect(h) == 0.0
    assert linalg.hermiticity_defect(h + np.array([[0, 1e-3], [0, 0]])) > 1e-4


def test_psd_checks():
    assert linalg.is_positive_semidefinite(np.diag([1.0, 0.0]))
    assert not linalg.is_positive_semidefinite(np.diag([1.0, -1e-3]))
    assert linalg.is_hermitian(np.eye(3))
    assert not linalg.is_hermitian(np.array([[0, 1], [0, 0]]))


def test_as_complex_matrix_validates():
    m = linalg.as_complex_matrix([[1, 2], [3, 4]], "m")
    assert m.dtype == np.complex128
    assert not m.flags.writeable
    with pytest.raises(DimensionError):
        linalg.as_complex_matrix([1, 2, 3], "m")
    with pytest.raises(ValueError):
        linalg.as_complex_matrix([[np.nan, 0], [0, 0]], "m")


def test_gram_schmidt_residual():
    e0 = np.array([1, 0, 0], dtype=complex)
    e1 = np.array([0, 1, 0], dtype=complex)
    r, n = linalg.gram_schmidt_residual(np.array([2, 3, 0], dtype=complex), [e0, e1])
    assert n <= 1e-12
    r, n = linalg.gram_schmidt_residual(np.array([0, 0, 4], dtype=complex), [e0, e1])
    assert abs(n - 4.0) <= 1e-12
    assert linalg.max_abs(r - np.array([0, 0, 4])) <= 1e-12


def test_gram_schmidt_residual_orthogonal_component():
    rng = np.random.default_rng(3)
    basis = []
    for _ in range(4):
        v = rng.normal(size=8) + 1j * rng.normal(size=8)
        r, n = linalg.gram_schmidt_residual(v, basis)
        # residual is orthogonal to every basis member
        for b in basis:
            assert abs(np.vdot(b, r)) <= 1e-9
        assert abs(np.linalg.norm(r) - n) <= 1e-12
        basis.append(r / n)


def test_default_tol_roundtrip():
    old = linalg.get_default_tol()
    try:
        linalg.set_default_tol(1e-6)
        assert linalg.get_default_tol() == 1e-6
        assert linalg.resolve_tol(None) == 1e-6
        assert linalg.resolve_tol(1e-3) == 1e-3
    finally:
        linalg.set_default_tol(old)
    with pytest.raises(ValueError):
        linalg.resolve_tol(-1.0)
