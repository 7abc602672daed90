"""
Splitting of the realified derivative into a coercive part L and a
structured remainder M.

With E the spectral projector of h onto eigenvalues <= -split/2,

    L = [[H1 + R - Q, 0], [0, I]],     H1 = h (1 - E) - e_i
    M = [[H2 + S + Sbar, couplings], [couplings^T, -I]],   H2 = h E

On the range of 1 - E, h - e_i >= -split/2 + split; on the range of E the
block is -e_i >= split; R - Q is positive semidefinite. Hence L >= split/2
on the orbital coordinates whenever every e_i <= -split.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..hf_core import Hamiltonian, YVector, pair_operator_tensors
from ..linalg import eigh
from .jacobian import _block_diag, jacobian
from .realify import realify_operator

DEFAULT_SPLIT_CAP = 0.05


class SplitPreconditionError(ValueError):
    """Some orbital energy lies above -split, so L need not be coercive."""


@dataclass
class LMDecomposition:
    L: np.ndarray
    M: np.ndarray
    J: np.ndarray
    split: float
    h_eigenvalues: np.ndarray
    h_vectors: np.ndarray
    projector: np.ndarray      # E, complex n_b x n_b
    H1: np.ndarray             # realified, orbital coordinates
    H2: np.ndarray
    n_orbital_coords: int

    @property
    def n_split_eigenvalues(self) -> int:
        """Number of h-eigenvalues at or below -split/2."""
        return int(np.sum(self.h_eigenvalues <= -0.5 * self.split))

    def reconstruction_error(self) -> float:
        """||L + M - J|| / ||J|| (spectral norms)."""
        return float(np.linalg.norm(self.L + self.M - self.J, 2) / np.linalg.norm(self.J, 2))

    def lambda_min_L(self) -> float:
        k = self.n_orbital_coords
        return float(np.linalg.eigvalsh(self.L[:k, :k])[0])

    def h2_rank(self, rtol: float = 1e-10) -> int:
        """Complex rank of the per-orbital block h E."""
        return _rank(self.projector_h(), rtol)

    def h2_real_rank(self, rtol: float = 1e-10) -> int:
        """Rank of the realified H2 over all orbital blocks (2 N times h2_rank)."""
        return _rank(self.H2, rtol)

    def coupling_rank(self, rtol: float = 1e-10) -> int:
        """Rank of the constraint and e couplings of M (at most 2N)."""
        k = self.n_orbital_coords
        C = np.zeros_like(self.M)
        C[:k, k:] = self.M[:k, k:]
        C[k:, :k] = self.M[k:, :k]
        C[k:, k:] = self.M[k:, k:]
        return _rank(C, rtol)

    def projector_h(self) -> np.ndarray:
        w, V = self.h_eigenvalues, self.h_vectors
        keep = w <= -0.5 * self.split
        return (V[:, keep] * w[keep]) @ V[:, keep].conj().T


def _rank(A, rtol):
    s = np.linalg.svd(A, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def default_split(eps) -> float:
    """min(-max e_i, 0.05): the largest admissible split, capped."""
    return float(min(-np.max(eps), DEFAULT_SPLIT_CAP))


def lm_decomposition(y: YVector, ham: Hamiltonian, split: float | None = None) -> LMDecomposition:
    """
    L + M split of the realified derivative at [Phi, e].

    Raises
    ------
    SplitPreconditionError
        If the split is not positive or some e_i exceeds -split.
    """
    eps = y.scalars
    if split is None:
        split = default_split(eps)
    if not split > 0:
        raise SplitPreconditionError(
            f"split must be positive (largest orbital energy {np.max(eps):.6g})")
    if np.any(eps > -split):
        raise SplitPreconditionError(
            f"orbital energy {np.max(eps):.6g} exceeds -split = {-split:.6g}")

    jac = jacobian(y, ham)
    comp = jac.components
    n, N = y.orbitals.shape
    w, V = eigh(ham.h)
    keep = w <= -0.5 * split
    Eproj = V[:, keep] @ V[:, keep].conj().T
    h = ham.h
    hE = h @ Eproj
    H1 = _block_diag([realify_operator(h - hE - eps[i] * np.eye(n)) for i in range(N)], n)
    H2 = _block_diag([realify_operator(hE) for _ in range(N)], n)

    k = 2 * n * N
    L = np.zeros_like(jac.matrix)
    L[:k, :k] = H1 + comp["R"] - comp["Q"]
    L[k:, k:] = np.eye(N)
    M = np.zeros_like(jac.matrix)
    M[:k, :k] = H2 + comp["S"] + comp["Sbar"]
    M[:k, k:] = comp["coupling"]
    M[k:, :k] = comp["coupling"].T
    M[k:, k:] = -np.eye(N)

    return LMDecomposition(L, M, jac.matrix, float(split), w, V, Eproj, H1, H2, k)


def pair_positivity_samples(C, ham: Hamiltonian, n_samples: int = 100, seed: int = 0) -> np.ndarray:
    """
    <w, (Q_ii - S_ii) w> for seeded random unit w, every orbital i.

    Returns an (n_samples, N) array; the values are nonnegative in exact
    arithmetic.
    """
    C = np.asarray(C, dtype=complex)
    n, N = C.shape
    Q, S, _ = pair_operator_tensors(C, ham)
    rng = np.random.default_rng(seed)
    W = rng.normal(size=(n_samples, n)) + 1j * rng.normal(size=(n_samples, n))
    W /= np.linalg.norm(W, axis=1, keepdims=True)
    out = np.empty((n_samples, N))
    for i in range(N):
        D = Q[i, i] - S[i, i]
        out[:, i] = np.real(np.einsum("km,mn,kn->k", W.conj(), D, W))
    return out


def rq_positivity_samples(y: YVector, ham: Hamiltonian, n_samples: int = 100,
                          seed: int = 0) -> np.ndarray:
    """<W, (R - Q) W> in realified orbital coordinates for seeded random unit W."""
    comp = jacobian(y, ham).components
    A = comp["R"] - comp["Q"]
    rng = np.random.default_rng(seed)
    W = rng.normal(size=(n_samples, A.shape[0]))
    W /= np.linalg.norm(W, axis=1, keepdims=True)
    return np.einsum("ki,ij,kj->k", W, A, W)
