import numpy as np
import pytest

from hqmc import linalg
from hqmc.errors import DimensionError
from hqmc.operations import (
    QuantumOperation,
    density_defects,
    eqsim,
    is_partial_density,
    op_compose,
    op_sum,
)

from _gen import column_pieces, random_density, random_unitary

P0 = np.diag([1.0, 0.0]).astype(complex)
P1 = np.diag([0.0, 1.0]).astype(complex)


def test_apply_projector():
    e = QuantumOperation([P0])
    rho = np.array([[0.5, 0.5], [0.5, 0.5]], dtype=complex)
    out = e.apply(rho)
    assert linalg.max_abs(out - np.diag([0.5, 0.0])) <= 1e-12


def test_identity_and_zero():
    i = QuantumOperation.identity(3)
    z = QuantumOperation.zero(3)
    rho = random_density(np.random.default_rng(0), 3)
    assert linalg.max_abs(i.apply(rho) - rho) == 0.0
    assert linalg.max_abs(z.apply(rho)) == 0.0
    assert i.is_trace_preserving()
    assert z.is_trace_nonincreasing()
    assert not z.is_trace_preserving()
    assert z.is_zero()
    assert len(z.kraus) == 1


def test_superop_matrix_example():
    e = QuantumOperation([P0])
    assert linalg.max_abs(e.superop_matrix() - np.diag([1.0, 0, 0, 0])) == 0.0


def test_superop_matrix_agrees_with_apply():
    rng = np.random.default_rng(1)
    for _ in range(100):
        d = int(rng.integers(1, 4))
        k = int(rng.integers(1, 4))
        e = QuantumOperation([rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
                              for _ in range(k)])
        rho = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        lhs = e.superop_matrix() @ linalg.vec(rho)
        assert linalg.max_abs(lhs - linalg.vec(e.apply(rho))) <= 1e-10


def test_superop_homomorphism():
    # sum of operations maps to sum of matrices, composition to product
    rng = np.random.default_rng(2)
    for _ in range(100):
        d = int(rng.integers(1, 4))
        e = QuantumOperation([rng.normal(size=(d, d)) for _ in range(2)])
        f = QuantumOperation([rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))])
        s = op_sum(e, f).superop_matrix()
        assert linalg.max_abs(s - (e.superop_matrix() + f.superop_matrix())) <= 1e-10
        c = op_compose(e, f).superop_matrix()
        assert linalg.max_abs(c - e.superop_matrix() @ f.superop_matrix()) <= 1e-10


def test_orthogonal_composition_is_zero():
    e0 = QuantumOperation([P0])
    e1 = QuantumOperation([P1])
    assert op_compose(e1, e0).is_zero()
    assert not op_compose(e0, e0).is_zero()


def test_trace_preserving_and_nonincreasing():
    u = random_unitary(np.random.default_rng(3), 3)
    e = QuantumOperation([u])
    assert e.is_trace_preserving()
    assert e.is_trace_nonincreasing()
    half = QuantumOperation([u / np.sqrt(2)])
    assert not half.is_trace_preserving()
    assert half.is_trace_nonincreasing()
    big = QuantumOperation([1.1 * u])
    assert not big.is_trace_nonincreasing()


def test_completeness_pieces():
    rng = np.random.default_rng(4)
    pieces = column_pieces(rng, 2, 3)
    total = QuantumOperation([np.eye(2) * 0])
    for b in pieces:
        total = op_sum(total, QuantumOperation([b]))
    assert total.is_trace_preserving()


def test_eqsim():
    rng = np.random.default_rng(5)
    u = random_unitary(rng, 2)
    v = random_unitary(rng, 2)
    # distinct unitaries induce distinct operations with equal completeness sums
    assert eqsim(QuantumOperation([u]), QuantumOperation([v]))
    assert not eqsim(QuantumOperation([u]), QuantumOperation([v / 2.0]))


def test_compact_drops_negligible_kraus():
    e = QuantumOperation([P0, 1e-13 * P1])
    c = e.compact()
    assert len(c.kraus) == 1
    assert len(e.kraus) == 2
    z = QuantumOperation([1e-13 * P0]).compact()
    assert z.is_zero()
    assert len(z.kraus) == 1


def test_dim_mismatch_rejected():
    with pytest.raises(DimensionError):
        QuantumOperation([np.eye(2), np.eye(3)])
    e = QuantumOperation([np.eye(2)])
    with pytest.raises(DimensionError):
        e.apply(np.eye(3))
    with pytest.raises(DimensionError):
        op_sum(QuantumOperation([np.eye(2)]), QuantumOperation([np.eye(3)]))


def test_empty_kraus_rejected():
    with pytest.raises(ValueError):
        QuantumOperation([])


def test_density_defects():
    herm, neg, excess = density_defects(np.diag([0.5, 0.5]))
    assert herm == neg == excess == 0.0
    _, _, excess = density_defects(np.diag([0.8, 0.8]))
    assert abs(excess - 0.6) <= 1e-12
    _, neg, _ = density_defects(np.diag([1.0, -0.2]))
    assert abs(neg - 0.2) <= 1e-12
    assert is_partial_density(np.diag([0.3, 0.2]))
    assert not is_partial_density(np.diag([0.3, -0.2]))
    assert not is_partial_density(np.diag([0.8, 0.8]))
