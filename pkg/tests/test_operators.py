import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sensorphonon.errors import DimensionMismatch, NonHermitianInput
from sensorphonon.operators import (
    IDENTITY2,
    SIGMA_X,
    devec,
    hermitian_eig,
    kron,
    sandwich_superop,
    vec,
)

from conftest import random_hermitian


def test_kron_identity():
    np.testing.assert_array_equal(kron(IDENTITY2, IDENTITY2), np.eye(4))


def test_kron_basis_action():
    g0 = np.kron([1, 0], [1, 0])
    e0 = np.kron([0, 1], [1, 0])
    np.testing.assert_array_equal(kron(SIGMA_X, IDENTITY2) @ g0, e0)


def test_kron_mixed_product(rng):
    a, b, c, d = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(4))
    lhs = kron(a, b) @ kron(c, d)
    # oracle: entrywise definition of the Kronecker product
    ac, bd = a @ c, b @ d
    rhs = np.empty((4, 4), dtype=complex)
    for i in range(2):
        for j in range(2):
            rhs[2 * i : 2 * i + 2, 2 * j : 2 * j + 2] = ac[i, j] * bd
    np.testing.assert_allclose(lhs, rhs, rtol=0, atol=1e-12 * np.max(np.abs(rhs)))


def test_kron_bilinear(rng):
    a, b, c = (rng.normal(size=(3, 3)) for _ in range(3))
    np.testing.assert_allclose(kron(a + 2 * b, c), kron(a, c) + 2 * kron(b, c), atol=1e-12)


def test_kron_rejects_non_square():
    with pytest.raises(DimensionMismatch):
        kron(np.zeros((2, 3)), IDENTITY2)


def test_eig_identity():
    d = hermitian_eig(IDENTITY2)
    np.testing.assert_allclose(d.values, [1.0, 1.0])


def test_eig_pauli_x():
    d = hermitian_eig(0.5 * 0.05 * SIGMA_X)
    np.testing.assert_allclose(d.values, [-0.025, 0.025], atol=1e-15)


def test_eig_reconstruction_and_unitarity(rng):
    h = random_hermitian(rng, 8)
    d = hermitian_eig(h)
    scale = np.max(np.abs(h))
    assert np.max(np.abs(d.reconstruct() - h)) <= 1e-12 * scale
    v = d.vectors
    assert np.max(np.abs(v.conj().T @ v - np.eye(8))) <= 1e-12
    assert np.all(np.diff(d.values) >= 0)


def test_eig_gaps_table(rng):
    d = hermitian_eig(random_hermitian(rng, 4))
    assert d.gaps[2, 1] == d.values[2] - d.values[1]


def test_eig_deterministic(rng):
    h = random_hermitian(rng, 6)
    a, b = hermitian_eig(h), hermitian_eig(h.copy())
    np.testing.assert_array_equal(a.values, b.values)
    np.testing.assert_array_equal(a.vectors, b.vectors)


def test_eig_phase_fixed(rng):
    d = hermitian_eig(random_hermitian(rng, 5))
    for k in range(5):
        col = d.vectors[:, k]
        first = col[np.argmax(np.abs(col) > 1e-8)]
        assert abs(first.imag) < 1e-14 and first.real > 0


def test_eig_rejects_non_hermitian():
    with pytest.raises(NonHermitianInput):
        hermitian_eig(np.array([[0, 1], [0, 0]], dtype=complex))


def test_eig_unitary_invariance(rng):
    h = random_hermitian(rng, 6)
    q, _ = np.linalg.qr(rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6)))
    a = hermitian_eig(h).values
    b = hermitian_eig(q @ h @ q.conj().T, rtol=1e-9).values
    np.testing.assert_allclose(a, b, atol=1e-10)


def test_eig_symmetrization_invariance(rng):
    h = random_hermitian(rng, 4)
    noisy = h + 1e-13 * rng.normal(size=(4, 4))
    np.testing.assert_allclose(hermitian_eig(h).values, hermitian_eig(noisy).values, atol=1e-12)


def test_sandwich_identity():
    np.testing.assert_array_equal(sandwich_superop(np.eye(3), np.eye(3)), np.eye(9))


def test_vec_roundtrip(rng):
    rho = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    np.testing.assert_array_equal(devec(vec(rho)), rho)


def test_vec_is_column_stacking():
    rho = np.array([[1, 2], [3, 4]])
    np.testing.assert_array_equal(vec(rho), [1, 3, 2, 4])


def test_sandwich_matches_direct_product(rng):
    a, b, rho = (rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)) for _ in range(3))
    direct = a @ rho @ b
    via = devec(sandwich_superop(a, b) @ vec(rho))
    assert np.max(np.abs(via - direct)) <= 1e-12 * np.max(np.abs(direct))


def test_sandwich_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        sandwich_superop(np.eye(2), np.eye(3))


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 8), seed=st.integers(0, 2**32 - 1))
def test_column_stacking_consistency(n, seed):
    rng = np.random.default_rng(seed)
    a, b, rho = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)) for _ in range(3))
    direct = a @ rho @ b
    via = devec(sandwich_superop(a, b) @ vec(rho), n)
    assert np.max(np.abs(via - direct)) <= 1e-12 * max(np.max(np.abs(direct)), 1.0) * n
