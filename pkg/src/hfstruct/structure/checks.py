"""
Pointwise checks at critical points: the drop-one energy identity,
orbital-energy bounds, the rescaling construction for non-orthogonal
tuples, and the gradient identity df = <<., F>>.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..hf_core import (Hamiltonian, YVector, energy, orbital_energies_from,
                       pairing, residual_F, slater_energy)
from ..linalg import eigh


def koopmans_residuals(C, eps, ham: Hamiltonian) -> np.ndarray:
    """
    E_N(Phi) - E_{N-1}(Phi without phi_k) - e_k for every k.

    The energy of zero orbitals is 0.
    """
    C = np.asarray(C, dtype=complex)
    N = C.shape[1]
    E = energy(C, ham).total
    out = np.empty(N)
    for k in range(N):
        rest = np.delete(C, k, axis=1)
        E_rest = energy(rest, ham).total if N > 1 else 0.0
        out[k] = E - E_rest - eps[k]
    return out


def koopmans_check(C, eps=None, ham: Hamiltonian | None = None) -> np.ndarray:
    """Drop-one residuals; ``eps`` defaults to <phi_k, F phi_k>."""
    if eps is None:
        eps = orbital_energies_from(C, ham)
    return koopmans_residuals(C, np.asarray(eps, dtype=float), ham)


@dataclass
class BoundsReport:
    lambda_min: float
    lower_margin: float           # min_i e_i - lambda_min
    lower_ok: bool
    gate_applies: bool | None     # E <= J_hat - eps_gate; None without J_hat
    upper_ok: bool | None         # all e_i <= -eps_gate + 1e-8 when the gate applies
    eps_gate: float
    j_threshold: float | None

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def bounds_check(eps, E: float, ham: Hamiltonian, j_threshold: float | None = None,
                 eps_gate: float = 0.1) -> BoundsReport:
    """
    Lower bound e_i >= lambda_min(h) - 1e-9, and, when E <= J_hat - eps_gate,
    the upper bound e_i <= -eps_gate + 1e-8.
    """
    eps = np.asarray(eps, dtype=float)
    lam = ham.lambda_min
    margin = float(np.min(eps) - lam)
    lower_ok = bool(margin >= -1e-9)
    if j_threshold is None:
        gate, upper = None, None
    else:
        gate = bool(E <= j_threshold - eps_gate)
        upper = bool(np.all(eps <= -eps_gate + 1e-8)) if gate else None
    return BoundsReport(lam, margin, lower_ok, gate, upper, eps_gate, j_threshold)


class SingularGramError(ValueError):
    pass


@dataclass
class RescalingResult:
    C: np.ndarray                 # orthonormal output
    gram_eigenvalues: np.ndarray
    energy_in: float              # Slater expectation of the input tuple
    energy_unitary: float         # after the unitary step alone
    energy_out: float
    pair_energy_in: float         # pairwise formula applied to the raw input
    fallback: bool                # input energy >= 0; monotonicity not asserted
    orthonormality_error: float

    @property
    def monotone(self) -> bool:
        return self.fallback or self.energy_out <= self.energy_in + 1e-10


def rescaling_construction(C_tilde, ham: Hamiltonian, norm_tol: float = 1e-10,
                           gram_tol: float = 1e-10) -> RescalingResult:
    """
    Orthonormalize norm-one orbitals by diagonalizing their Gram matrix
    D = U diag(lam) U^dagger and setting phi_i = (sum_j U_ji phi~_j) / sqrt(lam_i).

    Energies are Slater-determinant expectations, for which the unitary step
    is invariant and the rescaling multiplies by 1/det D >= 1, so a negative
    energy can only decrease.

    Raises
    ------
    ValueError
        If some input orbital does not have unit norm.
    SingularGramError
        If the smallest Gram eigenvalue is below ``gram_tol``.
    """
    Ct = np.asarray(C_tilde, dtype=complex)
    norms = np.sum(np.abs(Ct) ** 2, axis=0)
    if np.any(np.abs(norms - 1.0) > norm_tol):
        raise ValueError("input orbitals must have unit norm")
    D = Ct.conj().T @ Ct
    lam, U = eigh(D)
    if lam[0] < gram_tol:
        raise SingularGramError(f"Gram matrix is singular (min eigenvalue {lam[0]:.3e})")
    C_hat = Ct @ U
    C = C_hat / np.sqrt(lam)[None, :]
    E_in = slater_energy(Ct, ham)
    E_hat = slater_energy(C_hat, ham)
    E_out = energy(C, ham).total
    G = C.conj().T @ C
    err = float(np.max(np.abs(G - np.eye(G.shape[0]))))
    return RescalingResult(C, lam, E_in, E_hat, E_out, energy(Ct, ham).total,
                           bool(E_in >= 0), err)


@dataclass
class GradientReport:
    steps: tuple
    abs_errors: np.ndarray        # (n_dirs, 2)
    rel_errors: np.ndarray
    derivatives: np.ndarray       # <<v, F>>

    @property
    def max_abs(self):
        return self.abs_errors.max(axis=0)

    @property
    def max_rel(self):
        return self.rel_errors.max(axis=0)

    @property
    def observed_order(self) -> float:
        """log(err(h0)/err(h1)) / log(h0/h1) from the largest errors."""
        e0, e1 = self.max_abs
        if e0 == 0 or e1 == 0:
            return float("inf")
        return float(np.log(e0 / e1) / np.log(self.steps[0] / self.steps[1]))


def random_direction(n_basis: int, N: int, rng) -> YVector:
    v = YVector(rng.normal(size=(n_basis, N)) + 1j * rng.normal(size=(n_basis, N)),
                rng.normal(size=N))
    return v * (1.0 / v.norm())


def lagrangian_extended(y: YVector, ham: Hamiltonian) -> float:
    """
    f(Phi, e) evaluated in long double from the density-matrix form, so that
    central differences at small steps are limited by truncation, not roundoff.
    """
    C = y.orbitals.astype(np.clongdouble)
    eps = y.scalars.astype(np.longdouble)
    h = ham.h.astype(np.longdouble)
    eri = ham.eri.astype(np.longdouble)
    P = C @ C.conj().T
    core = np.einsum("mn,nm->", h, P)
    hartree = np.einsum("mn,ls,mnls->", P, P, eri)
    exch = np.einsum("mn,sl,mlns->", P, P, eri)
    norms = np.sum(np.abs(C) ** 2, axis=0)
    return (core + 0.5 * hartree - 0.5 * exch).real - np.sum(eps * (norms - 1))


def gradient_check(y: YVector, ham: Hamiltonian, n_dirs: int = 10, seed: int = 0,
                   steps=(1e-3, 1e-4)) -> GradientReport:
    """
    Central differences of f along seeded unit directions against <<v, F>>.

    f is quartic, so the central-difference error is exactly quadratic in
    the step up to roundoff.
    """
    rng = np.random.default_rng(seed)
    n, N = y.orbitals.shape
    F = residual_F(y.orbitals, y.scalars, ham)
    abs_err = np.zeros((n_dirs, len(steps)))
    rel_err = np.zeros_like(abs_err)
    exact = np.zeros(n_dirs)
    for k in range(n_dirs):
        v = random_direction(n, N, rng)
        exact[k] = pairing(v, F)
        for m, h in enumerate(steps):
            yp, ym = y + h * v, y - h * v
            fd = (lagrangian_extended(yp, ham) - lagrangian_extended(ym, ham)) / (2 * h)
            abs_err[k, m] = float(abs(fd - exact[k]))
            rel_err[k, m] = abs_err[k, m] / max(abs(exact[k]), 1.0)
    return GradientReport(tuple(steps), abs_err, rel_err, exact)
