"""
Real coordinates for the orbital-plus-scalar space.

A point [Phi, e] maps to the real vector

    (sqrt2 Re c_1, sqrt2 Im c_1, ..., sqrt2 Re c_N, sqrt2 Im c_N, e_1, ..., e_N)

The sqrt(2) makes the Euclidean inner product equal to the pairing
<<y1, y2>> = sum 2 Re<phi1_i, phi2_i> + sum e1_i e2_i, so the realified
residual is exactly the Euclidean gradient of the Lagrangian and the
realified derivative is a symmetric matrix.
"""

from __future__ import annotations

import numpy as np

from ..hf_core import YVector

SQRT2 = np.sqrt(2.0)


def realify(y: YVector) -> np.ndarray:
    C = y.orbitals
    blocks = np.concatenate([C.real, C.imag], axis=0)  # (2n, N)
    return np.concatenate([SQRT2 * blocks.T.reshape(-1), y.scalars])


def derealify(v, n_basis: int, n_orbitals: int) -> YVector:
    v = np.asarray(v, dtype=float)
    if v.size != (2 * n_basis + 1) * n_orbitals:
        raise ValueError(f"vector of length {v.size} does not fit n_basis={n_basis}, "
                         f"N={n_orbitals}")
    blocks = v[: 2 * n_basis * n_orbitals].reshape(n_orbitals, 2 * n_basis).T / SQRT2
    C = blocks[:n_basis] + 1j * blocks[n_basis:]
    return YVector(C, v[2 * n_basis * n_orbitals:].copy())


def orbital_slice(i: int, n_basis: int) -> slice:
    return slice(2 * n_basis * i, 2 * n_basis * (i + 1))


def realify_operator(A, B=None) -> np.ndarray:
    """
    2n x 2n real matrix of w -> A w + B conj(w) acting on (Re w, Im w).

    The sqrt(2) coordinate scaling cancels for maps between orbital blocks.
    """
    A = np.asarray(A, dtype=complex)
    B = np.zeros_like(A) if B is None else np.asarray(B, dtype=complex)
    P, M = A + B, A - B
    return np.block([[P.real, -M.imag], [P.imag, M.real]])


def phase_tangent(y: YVector, j: int) -> np.ndarray:
    """Unit realified tangent of phi_j -> exp(i theta) phi_j at theta = 0."""
    C = y.orbitals
    if not 0 <= j < C.shape[1]:
        raise IndexError(f"orbital index {j} out of range")
    if np.linalg.norm(C[:, j]) == 0:
        raise ValueError(f"orbital {j} is zero; its phase orbit is degenerate")
    T = np.zeros_like(C)
    T[:, j] = 1j * C[:, j]
    v = realify(YVector(T, np.zeros(C.shape[1])))
    return v / np.linalg.norm(v)


def global_phase_tangent(y: YVector) -> np.ndarray:
    """Unit realified tangent of Phi -> exp(i theta) Phi."""
    v = realify(YVector(1j * y.orbitals, np.zeros(y.n_orbitals)))
    return v / np.linalg.norm(v)


def orbit_sample(y: YVector, theta) -> YVector:
    """phi_j -> exp(i theta_j) phi_j; ``theta`` is a scalar or one angle per orbital."""
    theta = np.broadcast_to(np.asarray(theta, dtype=float), (y.n_orbitals,))
    return YVector(y.orbitals * np.exp(1j * theta)[None, :], y.scalars.copy())
