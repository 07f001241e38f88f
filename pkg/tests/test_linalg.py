import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from htprivacy import linalg, quantum
from htprivacy.errors import DimensionOverflow, NotHermitian, NotPSD

from _support import KET0, MIXED, PAULI_X, PAULI_Z, PLUS, random_hermitian


def test_diagonal_input_is_sorted():
    vals, vecs = linalg.hermitian_eig(np.diag([3.0, 1.0, 2.0]))
    np.testing.assert_allclose(vals, [1, 2, 3])
    # columns of a permutation matrix
    assert np.allclose(np.abs(vecs), np.eye(3)[:, [1, 2, 0]])


def test_pauli_x_spectrum():
    np.testing.assert_allclose(linalg.eigvalsh(PAULI_X), [-1, 1], atol=1e-15)


@pytest.mark.parametrize("dim", [1, 2, 3, 8, 17, 32, 64])
def test_reconstruction_and_unitarity(dim):
    a = random_hermitian(np.random.default_rng(dim), dim)
    vals, vecs = linalg.hermitian_eig(a)
    assert np.all(np.diff(vals) >= 0)
    assert np.linalg.norm(vecs @ np.diag(vals) @ vecs.conj().T - a) <= 1e-10 * max(1, np.linalg.norm(a))
    assert np.linalg.norm(vecs.conj().T @ vecs - np.eye(dim)) <= 1e-12 * dim


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), dim=st.integers(1, 10))
def test_eigenvalues_match_lapack(seed, dim):
    a = random_hermitian(np.random.default_rng(seed), dim)
    np.testing.assert_allclose(linalg.eigvalsh(a), np.linalg.eigvalsh(a), atol=1e-11)


def test_degenerate_spectrum():
    u = quantum.random_unitary(5, 3)
    a = u @ np.diag([1, 1, 1, -2, -2]) @ u.conj().T
    vals, vecs = linalg.hermitian_eig(a)
    np.testing.assert_allclose(vals, [-2, -2, 1, 1, 1], atol=1e-12)
    assert np.linalg.norm(vecs @ np.diag(vals) @ vecs.conj().T - a) < 1e-11


def test_unitary_conjugation_invariance():
    rng = np.random.default_rng(5)
    a = random_hermitian(rng, 6)
    u = quantum.random_unitary(6, rng)
    np.testing.assert_allclose(linalg.eigvalsh(u @ a @ u.conj().T), linalg.eigvalsh(a), atol=1e-10)


def test_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        linalg.hermitian_eig(np.array([[0, 1], [0, 0]]))


def test_rejects_oversized():
    with pytest.raises(DimensionOverflow):
        linalg.hermitian_eig(np.eye(65))


@pytest.mark.parametrize(
    "matrix, expected",
    [(PAULI_Z, 1.0), (-np.eye(3), 0.0), (KET0 - MIXED, 0.5)],
)
def test_positive_part_trace(matrix, expected):
    assert linalg.positive_part_trace(matrix) == pytest.approx(expected, abs=1e-14)


@pytest.mark.parametrize(
    "matrix, expected",
    [(PAULI_Z, 2.0), (np.zeros((3, 3)), 0.0), (KET0 - PLUS, np.sqrt(2))],
)
def test_trace_norm(matrix, expected):
    assert linalg.trace_norm(matrix) == pytest.approx(expected, abs=1e-13)


def test_trace_norm_non_hermitian_matches_svd():
    rng = np.random.default_rng(11)
    a = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    assert linalg.trace_norm(a) == pytest.approx(np.linalg.svd(a, compute_uv=False).sum(), rel=1e-10)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), dim=st.integers(1, 8))
def test_trace_norm_splits_into_positive_parts(seed, dim):
    a = random_hermitian(np.random.default_rng(seed), dim)
    split = linalg.positive_part_trace(a) + linalg.positive_part_trace(-a)
    assert abs(linalg.trace_norm(a) - split) <= 1e-10


def test_support_projector_examples():
    np.testing.assert_allclose(linalg.support_projector(MIXED), np.eye(2), atol=1e-14)
    np.testing.assert_allclose(linalg.support_projector(KET0), KET0, atol=1e-14)
    np.testing.assert_allclose(linalg.support_projector(np.diag([0.999, 0.001])), np.eye(2), atol=1e-14)


def test_support_projector_fixes_psd_matrix():
    rng = np.random.default_rng(2)
    for rank in range(1, 6):
        a = np.asarray(quantum.random_density(5, rank, rng))
        p = linalg.support_projector(a)
        assert np.linalg.norm(p @ a @ p - a) <= 1e-9
        assert np.trace(p).real == pytest.approx(rank, abs=1e-9)


def test_support_projector_rejects_negative():
    with pytest.raises(NotPSD):
        linalg.support_projector(np.diag([1.0, -0.1]))


def test_inv_sqrt_examples():
    np.testing.assert_allclose(linalg.inv_sqrt_on_support(np.eye(3)), np.eye(3), atol=1e-14)
    np.testing.assert_allclose(linalg.inv_sqrt_on_support(np.diag([4.0, 0.0])), np.diag([0.5, 0.0]), atol=1e-14)


def test_inv_sqrt_reconstructs_identity():
    a = np.asarray(quantum.random_density(6, seed=8)) * 3
    b = linalg.inv_sqrt_on_support(a)
    assert np.linalg.norm(b @ a @ b - np.eye(6)) <= 1e-8


def test_hermitian_function_square_root():
    a = np.asarray(quantum.random_density(4, seed=1))
    root = linalg.hermitian_function(a, lambda v: np.sqrt(np.clip(v, 0, None)))
    assert np.linalg.norm(root @ root - a) < 1e-12


def test_kron_examples():
    np.testing.assert_array_equal(linalg.kron(np.eye(2), np.eye(2)), np.eye(4))
    expected = np.zeros((4, 4))
    expected[1, 1] = 1
    np.testing.assert_array_equal(linalg.kron(KET0, np.diag([0.0, 1.0])), expected)


def test_kron_trace_and_spectrum():
    rng = np.random.default_rng(4)
    for da, db in [(2, 2), (2, 3)]:
        a, b = random_hermitian(rng, da), random_hermitian(rng, db)
        k = linalg.kron(a, b)
        assert abs(np.trace(k) - np.trace(a) * np.trace(b)) <= 1e-12 * max(1, abs(np.trace(k)))
        products = np.sort(np.outer(linalg.eigvalsh(a), linalg.eigvalsh(b)).ravel())
        np.testing.assert_allclose(linalg.eigvalsh(k), products, atol=1e-9)


def test_kron_overflow():
    with pytest.raises(DimensionOverflow):
        linalg.kron(np.eye(8), np.eye(9))
