"""
Analytic derivative of the residual map in realified coordinates.

For orbital i the residual is F_i = h phi_i + R_i phi_i - S_i phi_i - e_i phi_i,
where R_i and S_i sum the Coulomb and exchange operators of all orbitals
j != i (the j = i terms cancel on phi_i). Differentiating,

    d/dphi_i : h - e_i + R_i - S_i
    d/dphi_j : S_ij + Sbar_ij - Q_ij - Sbar_ji          (j != i)
    d/de_i   : -phi_i
    norm row : -2 Re<., phi_i>

Grouped as H + R - Q + S + Sbar on the orbital blocks, with H split at the
spectral point -split/2 of h into H1 (coercive) and H2 (finite rank).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..hf_core import Hamiltonian, YVector, pair_operator_tensors, residual_F
from .realify import SQRT2, derealify, orbital_slice, realify, realify_operator


@dataclass
class RealJacobian:
    matrix: np.ndarray
    n_basis: int
    n_orbitals: int
    components: dict = field(default_factory=dict, repr=False)

    @property
    def n_orbital_coords(self) -> int:
        return 2 * self.n_basis * self.n_orbitals

    @property
    def orbital_block(self) -> np.ndarray:
        k = self.n_orbital_coords
        return self.matrix[:k, :k]

    def symmetry_error(self) -> float:
        """||J - J^T|| / ||J|| (spectral norms)."""
        J = self.matrix
        return float(np.linalg.norm(J - J.T, 2) / np.linalg.norm(J, 2))


def _block_diag(blocks, n):
    N = len(blocks)
    out = np.zeros((2 * n * N, 2 * n * N))
    for i, b in enumerate(blocks):
        s = orbital_slice(i, n)
        out[s, s] = b
    return out


def orbital_components(y: YVector, ham: Hamiltonian) -> dict:
    """
    Realified orbital-block operators at [Phi, e]:
    ``H`` (h - e_i), ``R``, ``Q``, ``S``, ``Sbar``.
    """
    C = y.orbitals
    eps = y.scalars
    n, N = C.shape
    Q, S, B = pair_operator_tensors(C, ham)
    h = ham.h
    H = _block_diag([realify_operator(h - eps[i] * np.eye(n)) for i in range(N)], n)
    Rm = np.zeros_like(H)
    Qm = np.zeros_like(H)
    Sm = np.zeros_like(H)
    Bm = np.zeros_like(H)
    for i in range(N):
        si = orbital_slice(i, n)
        others = [j for j in range(N) if j != i]
        R_i = sum((Q[j, j] for j in others), np.zeros((n, n), complex))
        S_i = sum((S[j, j] for j in others), np.zeros((n, n), complex))
        Rm[si, si] = realify_operator(R_i)
        Sm[si, si] = realify_operator(-S_i)
        for j in others:
            sj = orbital_slice(j, n)
            Qm[si, sj] = realify_operator(Q[i, j])
            Sm[si, sj] = realify_operator(S[i, j])
            Bm[si, sj] = realify_operator(np.zeros((n, n)), B[i, j] - B[j, i])
    return {"H": H, "R": Rm, "Q": Qm, "S": Sm, "Sbar": Bm}


def coupling_columns(y: YVector) -> np.ndarray:
    """The e-columns -sqrt2 (Re phi_i, Im phi_i); their transposes are the norm rows."""
    C = y.orbitals
    n, N = C.shape
    E = np.zeros((2 * n * N, N))
    for i in range(N):
        s = orbital_slice(i, n)
        E[s, i] = -SQRT2 * np.concatenate([C[:, i].real, C[:, i].imag])
    return E


def jacobian(y: YVector, ham: Hamiltonian) -> RealJacobian:
    """Realified F'(Phi, e), assembled from the operator blocks."""
    comp = orbital_components(y, ham)
    orb = comp["H"] + comp["R"] - comp["Q"] + comp["S"] + comp["Sbar"]
    E = coupling_columns(y)
    N = y.n_orbitals
    J = np.block([[orb, E], [E.T, np.zeros((N, N))]])
    comp["coupling"] = E
    return RealJacobian(J, y.orbitals.shape[0], N, comp)


def residual_vector(v, ham: Hamiltonian, n_orbitals: int) -> np.ndarray:
    """Realified residual map as a function of realified coordinates."""
    y = derealify(v, ham.n_basis, n_orbitals)
    return realify(residual_F(y.orbitals, y.scalars, ham))


def finite_difference_jacobian(y: YVector, ham: Hamiltonian, h: float = 1e-4) -> np.ndarray:
    """Central-difference derivative of the realified residual, column by column."""
    z = realify(y)
    N = y.n_orbitals
    cols = []
    for k in range(z.size):
        dz = np.zeros_like(z)
        dz[k] = h
        cols.append((residual_vector(z + dz, ham, N) - residual_vector(z - dz, ham, N)) / (2 * h))
    return np.column_stack(cols)


def residual_extended(y: YVector, ham: Hamiltonian) -> np.ndarray:
    """Realified residual evaluated in long double (for step-size studies)."""
    C = y.orbitals.astype(np.clongdouble)
    eps = y.scalars.astype(np.longdouble)
    eri = ham.eri.astype(np.longdouble)
    P = C @ C.conj().T
    J = np.einsum("mnls,sl->mn", eri, P)
    K = np.einsum("msln,sl->mn", eri, P)
    R = (ham.h.astype(np.longdouble) + J - K) @ C - C * eps[None, :]
    blocks = np.concatenate([R.real, R.imag], axis=0)
    orb = np.sqrt(np.longdouble(2)) * blocks.T.reshape(-1)
    return np.concatenate([orb, 1 - np.sum(np.abs(C) ** 2, axis=0)])


def directional_errors(y: YVector, ham: Hamiltonian, J: np.ndarray, v,
                       steps=(1e-3, 1e-4)) -> np.ndarray:
    """
    ||(F(z + h v) - F(z - h v)) / 2h - J v|| for each step h, with F in
    long double so that the O(h^2) truncation error is visible.
    """
    z = realify(y)
    v = np.asarray(v, dtype=float)
    N, n = y.n_orbitals, y.orbitals.shape[0]
    Jv = J @ v
    out = []
    for h in steps:
        fp = residual_extended(derealify(z + h * v, n, N), ham)
        fm = residual_extended(derealify(z - h * v, n, N), ham)
        out.append(float(np.linalg.norm((fp - fm) / (2 * h) - Jv)))
    return np.array(out)
