"""
Hartree-Fock objects for spinless complex orbitals in an orthonormal basis.

An orbital set is an (n_basis, N) complex matrix ``C`` whose column i holds
the coefficients of orbital i. In the Loewdin-orthonormalized basis the L2
inner product is the plain complex dot product, so <phi_i, phi_j> is
``C[:, i].conj() @ C[:, j]``.

Two-electron integrals are (mn|ls) in chemists' notation over the real
orthonormal basis functions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .integrals import IntegralTables
from .linalg import eigh, loewdin_half_inverse


def _symmetrize_eri(eri):
    t = eri + eri.transpose(1, 0, 2, 3)
    t = t + t.transpose(0, 1, 3, 2)
    t = t + t.transpose(2, 3, 0, 1)
    return t / 8.0


@dataclass(frozen=True)
class Hamiltonian:
    """One- and two-electron operators in the orthonormalized basis."""

    h: np.ndarray
    eri: np.ndarray
    transform: np.ndarray  # X with X^T S X = I; AO coefficients = X @ C

    @classmethod
    def from_tables(cls, tables: IntegralTables) -> "Hamiltonian":
        X = loewdin_half_inverse(tables.overlap)
        h = X.T @ tables.h @ X
        h = 0.5 * (h + h.T)
        eri = np.einsum("pqrs,pi->iqrs", tables.eri, X, optimize=True)
        eri = np.einsum("iqrs,qj->ijrs", eri, X, optimize=True)
        eri = np.einsum("ijrs,rk->ijks", eri, X, optimize=True)
        eri = np.einsum("ijks,sl->ijkl", eri, X, optimize=True)
        eri = _symmetrize_eri(eri)
        for a in (h, eri):
            a.setflags(write=False)
        return cls(h, eri, X)

    @property
    def n_basis(self) -> int:
        return self.h.shape[0]

    def h_spectrum(self):
        return eigh(self.h)

    @property
    def lambda_min(self) -> float:
        return float(self.h_spectrum()[0][0])


@dataclass
class YVector:
    """An element [Phi, e] of the orbital-plus-scalar product space."""

    orbitals: np.ndarray  # (n_basis, N) complex
    scalars: np.ndarray   # (N,) real

    def __post_init__(self):
        self.orbitals = np.asarray(self.orbitals, dtype=complex)
        self.scalars = np.asarray(self.scalars, dtype=float).reshape(-1)
        if self.orbitals.ndim != 2 or self.orbitals.shape[1] != self.scalars.size:
            raise ValueError(f"orbital block {self.orbitals.shape} does not match "
                             f"{self.scalars.size} scalars")

    @property
    def n_orbitals(self) -> int:
        return self.scalars.size

    def __add__(self, other):
        return YVector(self.orbitals + other.orbitals, self.scalars + other.scalars)

    def __sub__(self, other):
        return YVector(self.orbitals - other.orbitals, self.scalars - other.scalars)

    def __mul__(self, k):
        return YVector(k * self.orbitals, k * self.scalars)

    __rmul__ = __mul__

    def norm(self) -> float:
        return float(np.sqrt(pairing(self, self)))


def pairing(y1: YVector, y2: YVector) -> float:
    """sum_i 2 Re<phi1_i, phi2_i> + sum_i e1_i e2_i."""
    if y1.orbitals.shape != y2.orbitals.shape:
        raise ValueError(f"pairing dimension mismatch: {y1.orbitals.shape} vs {y2.orbitals.shape}")
    return float(2.0 * np.real(np.vdot(y1.orbitals, y2.orbitals)) + y1.scalars @ y2.scalars)


def density(C) -> np.ndarray:
    """P = sum_i c_i c_i^dagger."""
    C = np.asarray(C, dtype=complex)
    return C @ C.conj().T


def coulomb_exchange(P, eri):
    """Coulomb and exchange matrices J[P], K[P] (both Hermitian for Hermitian P)."""
    J = np.einsum("mnls,sl->mn", eri, P, optimize=True)
    K = np.einsum("msln,sl->mn", eri, P, optimize=True)
    return J, K


def fock_from_density(P, ham: Hamiltonian) -> np.ndarray:
    J, K = coulomb_exchange(P, ham.eri)
    F = ham.h + J - K
    return 0.5 * (F + F.conj().T)


def fock(C, ham: Hamiltonian) -> np.ndarray:
    """F = h + R - S for the orbital set ``C``."""
    return fock_from_density(density(C), ham)


@dataclass(frozen=True)
class PairOperators:
    """
    Matrix forms of the pair operators for orbitals (i, j).

    ``Q`` and ``S`` act linearly (w -> Q @ w); the conjugate-linear map acts
    as w -> Sbar @ w.conj().
    """

    Q: np.ndarray
    S: np.ndarray
    Sbar: np.ndarray


def pair_operator_tensors(C, ham: Hamiltonian):
    """All pair operators at once, each indexed [i, j, mu, nu]."""
    C = np.asarray(C, dtype=complex)
    Cc = C.conj()
    Q = np.einsum("mnls,lj,si->ijmn", ham.eri, Cc, C, optimize=True)
    S = np.einsum("msln,si,lj->ijmn", ham.eri, C, Cc, optimize=True)
    B = np.einsum("msnl,si,lj->ijmn", ham.eri, C, C, optimize=True)
    return Q, S, B


def pair_operators(C, ham: Hamiltonian, i: int, j: int) -> PairOperators:
    """Pair operators for 0-based orbital indices ``i``, ``j``."""
    C = np.asarray(C, dtype=complex)
    N = C.shape[1]
    if not (0 <= i < N and 0 <= j < N):
        raise IndexError(f"orbital indices ({i}, {j}) out of range for N={N}")
    ci, cj = C[:, i], C[:, j]
    Q = np.einsum("mnls,l,s->mn", ham.eri, cj.conj(), ci, optimize=True)
    S = np.einsum("msln,s,l->mn", ham.eri, ci, cj.conj(), optimize=True)
    B = np.einsum("msnl,s,l->mn", ham.eri, ci, cj, optimize=True)
    return PairOperators(Q, S, B)


@dataclass(frozen=True)
class EnergyBreakdown:
    total: float
    core: float
    coulomb: float
    exchange: float
    J: np.ndarray  # pair Coulomb integrals J_ij
    K: np.ndarray  # pair exchange integrals K_ij

    def to_dict(self) -> dict:
        return {"total": self.total, "core": self.core, "coulomb": self.coulomb,
                "exchange": self.exchange, "J": self.J.tolist(), "K": self.K.tolist()}


def pair_integrals(C, ham: Hamiltonian):
    """J_ij = (ii|jj) and K_ij = (ij|ji) over orbitals (real for any C)."""
    C = np.asarray(C, dtype=complex)
    rho = np.einsum("mi,nj->ijmn", C.conj(), C, optimize=True)
    V = np.einsum("ijmn,mnls->ijls", rho, ham.eri, optimize=True)
    J = np.einsum("iils,jjls->ij", V, rho, optimize=True)
    K = np.einsum("ijls,jils->ij", V, rho, optimize=True)
    return J.real, K.real


def energy(C, ham: Hamiltonian) -> EnergyBreakdown:
    """
    Energy in pairwise form: sum_i <phi_i, h phi_i> + sum_{i<j} (J_ij - K_ij).

    ``coulomb`` and ``exchange`` are the full half-sums over all (i, j);
    their diagonal parts cancel.
    """
    C = np.asarray(C, dtype=complex)
    core = float(np.real(np.einsum("mi,mn,ni->", C.conj(), ham.h, C)))
    J, K = pair_integrals(C, ham)
    iu = np.triu_indices(C.shape[1], 1)
    total = core + float(np.sum(J[iu] - K[iu]))
    return EnergyBreakdown(total, core, 0.5 * float(J.sum()), 0.5 * float(K.sum()), J, K)


def energy_density_form(C, ham: Hamiltonian) -> float:
    """
    Energy from the density rho(x) and density matrix rho(x, y):

        tr(hP) + 1/2 (rho|rho) - 1/2 int |rho(x,y)|^2 / |x - y|.
    """
    P = density(C)
    core = np.real(np.trace(ham.h @ P))
    hartree = 0.5 * np.einsum("mn,ls,mnls->", P, P, ham.eri, optimize=True)
    exch = 0.5 * np.einsum("mn,sl,mlns->", P, P, ham.eri, optimize=True)
    return float(core + np.real(hartree) - np.real(exch))


def slater_energy(C, ham: Hamiltonian) -> float:
    """
    <Psi, H Psi> for the (unnormalized) Slater determinant of the columns of C.

    Equals :func:`energy` for orthonormal orbitals. For a general tuple the
    determinant picks up det(G) under C -> C G^{-1/2}, G = C^dagger C.
    """
    C = np.asarray(C, dtype=complex)
    G = C.conj().T @ C
    w, V = eigh(G)
    if w[0] <= 1e-14 * max(w[-1], 1.0):
        return 0.0
    C_orth = C @ ((V / np.sqrt(w)) @ V.conj().T)
    return float(np.prod(w)) * energy(C_orth, ham).total


def orbital_norms(C) -> np.ndarray:
    return np.sum(np.abs(np.asarray(C)) ** 2, axis=0)


def overlap_matrix(C) -> np.ndarray:
    C = np.asarray(C, dtype=complex)
    return C.conj().T @ C


def orthogonality_residual(C) -> float:
    D = overlap_matrix(C)
    off = D - np.diag(np.diag(D))
    return float(np.max(np.abs(off), initial=0.0))


def lagrangian_f(C, eps, ham: Hamiltonian) -> float:
    """E(Phi) - sum_i eps_i (||phi_i||^2 - 1)."""
    eps = np.asarray(eps, dtype=float)
    return energy(C, ham).total - float(eps @ (orbital_norms(C) - 1.0))


def residual_F(C, eps, ham: Hamiltonian) -> YVector:
    """[F(Phi) phi_i - eps_i phi_i ; 1 - ||phi_i||^2]."""
    C = np.asarray(C, dtype=complex)
    eps = np.asarray(eps, dtype=float)
    F = fock(C, ham)
    return YVector(F @ C - C * eps[None, :], 1.0 - orbital_norms(C))


def residual_norm(C, eps, ham: Hamiltonian) -> float:
    return residual_F(C, eps, ham).norm()


def orbital_energies_from(C, ham: Hamiltonian) -> np.ndarray:
    """eps_i = <phi_i, F(Phi) phi_i>."""
    C = np.asarray(C, dtype=complex)
    vals = np.einsum("mi,mn,ni->i", C.conj(), fock(C, ham), C)
    scale = max(1.0, float(np.max(np.abs(vals), initial=0.0)))
    if np.max(np.abs(vals.imag), initial=0.0) > 1e-12 * scale:
        raise ArithmeticError("orbital energies have a non-negligible imaginary part")
    return vals.real.copy()
