import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hfstruct.linalg import ContractError, eigh, loewdin_half_inverse, svd


def random_hermitian(rng, n):
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return A + A.conj().T


def test_eigh_identity():
    w, V = eigh(np.eye(4))
    assert np.max(np.abs(w - 1)) < 1e-15


def test_eigh_diagonal_sorted():
    w, _ = eigh(np.diag([3.0, 1.0, 2.0]))
    assert np.allclose(w, [1, 2, 3], atol=1e-14)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(1, 12))
def test_eigh_residual_and_unitarity(seed, n):
    A = random_hermitian(np.random.default_rng(seed), n)
    w, V = eigh(A)
    scale = np.linalg.norm(A, 2)
    assert np.all(np.diff(w) >= 0)
    assert np.max(np.linalg.norm(A @ V - V * w, axis=0)) <= 1e-10 * scale
    assert np.max(np.abs(V.conj().T @ V - np.eye(n))) <= 1e-10


def test_eigh_rejects_non_hermitian():
    with pytest.raises(ContractError):
        eigh(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(ContractError):
        eigh(np.ones((2, 3)))
    with pytest.raises(ContractError):
        eigh(np.array([[np.nan, 0], [0, 1.0]]))


def test_svd_zero_matrix():
    _, s, _ = svd(np.zeros((3, 3)))
    assert np.all(s == 0)


def test_svd_orthogonal_matrix():
    Q, _ = np.linalg.qr(np.random.default_rng(1).normal(size=(6, 6)))
    _, s, _ = svd(Q)
    assert np.max(np.abs(s - 1)) <= 1e-12


@pytest.mark.parametrize("seed", range(5))
def test_svd_reconstruction(seed):
    A = np.random.default_rng(seed).normal(size=(20, 20))
    U, s, V = svd(A)
    assert np.all(np.diff(s) <= 0)
    assert np.linalg.norm(A - U @ np.diag(s) @ V.T, 2) <= 1e-10 * np.linalg.norm(A, 2)
    assert np.max(np.abs(U.T @ U - np.eye(20))) <= 1e-10
    assert np.max(np.abs(V.T @ V - np.eye(20))) <= 1e-10


def test_loewdin_identity_and_diagonal():
    assert np.allclose(loewdin_half_inverse(np.eye(3)), np.eye(3), atol=1e-15)
    assert np.allclose(loewdin_half_inverse(np.diag([4.0, 1.0])), np.diag([0.5, 1.0]), atol=1e-15)


@pytest.mark.parametrize("seed", range(5))
def test_loewdin_random_spd(seed):
    B = np.random.default_rng(seed).normal(size=(7, 7))
    S = B @ B.T + 0.1 * np.eye(7)
    X = loewdin_half_inverse(S)
    assert np.array_equal(X, X.T)
    assert np.max(np.abs(X.T @ S @ X - np.eye(7))) <= 1e-10


def test_loewdin_rejects_indefinite():
    with pytest.raises(ContractError):
        loewdin_half_inverse(np.diag([1.0, -1.0]))
