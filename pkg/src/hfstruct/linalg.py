"""
Dense linear-algebra kernels with explicit contracts.

The factorizations are LAPACK (through numpy); this module owns the input
checks and the post-conditions the rest of the package relies on.
"""

import numpy as np

HERMITIAN_TOL = 1e-10


class ContractError(ValueError):
    pass


def _norm(A):
    return float(np.linalg.norm(A, 2)) if A.size else 0.0


def _require_finite(A, name):
    if not np.all(np.isfinite(A)):
        raise ContractError(f"{name}: non-finite entries")


def eigh(A):
    """
    Eigen-decomposition of a Hermitian matrix.

    Returns eigenvalues in ascending order and a unitary matrix whose columns
    are the eigenvectors.
    """
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ContractError(f"eigh needs a square matrix, got shape {A.shape}")
    _require_finite(A, "eigh")
    scale = max(_norm(A), 1.0)
    if np.max(np.abs(A - A.conj().T), initial=0.0) > HERMITIAN_TOL * scale:
        raise ContractError("eigh: matrix is not Hermitian")
    return np.linalg.eigh(0.5 * (A + A.conj().T))


def svd(A):
    """Full SVD A = U diag(s) V^T with s descending; returns (U, s, V)."""
    A = np.asarray(A)
    _require_finite(A, "svd")
    U, s, Vh = np.linalg.svd(A)
    return U, s, Vh.conj().T


def loewdin_half_inverse(S):
    """Symmetric S^{-1/2}, so that X^T S X = I."""
    S = np.asarray(S, dtype=float)
    w, V = eigh(S)
    if w[0] <= 0:
        raise ContractError(f"overlap is not positive definite (min eigenvalue {w[0]:.3e})")
    X = (V / np.sqrt(w)) @ V.T
    return 0.5 * (X + X.T)
