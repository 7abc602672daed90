"""
Roothaan fixed-point iteration with density damping and a virtual level
shift, plus multistart search, deduplication and the (N-1)-electron
threshold estimate.

Convergence is judged on the critical-point residual sqrt(<<F, F>>) of the
aufbau orbitals, not on density changes.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .hf_core import (EnergyBreakdown, Hamiltonian, density, energy, fock_from_density,
                      orbital_energies_from, orbital_norms, orthogonality_residual,
                      residual_norm)
from .linalg import eigh

log = logging.getLogger(__name__)

DEGENERACY_TOL = 1e-10
OSCILLATION_WINDOW = 50
SHIFT_ANNEAL_RESIDUAL = 1e-4


@dataclass(frozen=True)
class ScfOptions:
    max_iter: int = 500
    residual_tol: float = 1e-9
    energy_tol: float = 1e-12
    damping: float = 0.3
    level_shift: float = 0.1
    seed: int = 0
    eps_gate: float = 0.1

    def __post_init__(self):
        if self.residual_tol <= 0 or self.energy_tol <= 0:
            raise ValueError("tolerances must be positive")
        if not 0.0 <= self.damping < 1.0:
            raise ValueError("damping must lie in [0, 1)")
        if self.level_shift < 0:
            raise ValueError("level shift must be nonnegative")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


@dataclass
class CriticalPointRecord:
    """A pair [Phi, e] found by the solver, with diagnostics and gate flags."""

    C: np.ndarray
    eps: np.ndarray
    energy: EnergyBreakdown
    residual_norm: float
    iterations: int
    converged: bool
    status: str  # "converged" | "max_iter" | "oscillation"
    orthogonality_residual: float
    below_threshold: bool | None = None
    b_eps_member: bool | None = None
    eps_gate: float | None = None
    j_threshold: float | None = None
    seed: int | None = None

    @property
    def n_electrons(self) -> int:
        return self.C.shape[1]

    @property
    def E(self) -> float:
        return self.energy.total

    def feasible(self, tol: float = 1e-9) -> bool:
        return bool(np.all(np.abs(orbital_norms(self.C) - 1.0) <= tol))


def classify(record: CriticalPointRecord, j_threshold: float | None,
             eps_gate: float | None) -> CriticalPointRecord:
    """Attach the basis-set gate flags E < J(N-1) and all eps_i < -eps_gate."""
    record.j_threshold = j_threshold
    record.below_threshold = None if j_threshold is None else bool(record.E < j_threshold)
    record.eps_gate = eps_gate
    record.b_eps_member = None if eps_gate is None else bool(np.all(record.eps < -eps_gate))
    return record


def initial_guess(ham: Hamiltonian, N: int, mode: str = "core", seed: int = 0) -> np.ndarray:
    """
    Core guess (lowest N eigenvectors of h) or a seeded random rotation of it.

    The random mode applies exp(i H) for a random Hermitian H on the whole
    basis, then independent phases per orbital; the result is orthonormal.
    """
    n = ham.n_basis
    if N > n:
        raise ValueError(f"cannot place {N} orbitals in a basis of size {n}")
    if N < 1:
        raise ValueError("need at least one orbital")
    _, V = eigh(ham.h)
    C = V[:, :N].astype(complex)
    if mode == "core":
        return C
    if mode != "random":
        raise ValueError(f"unknown guess mode {mode!r}")
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    H = 0.5 * (A + A.conj().T)
    w, U = np.linalg.eigh(H)
    rot = (U * np.exp(1j * w)) @ U.conj().T
    phases = np.exp(2j * np.pi * rng.random(N))
    C = rot @ C * phases[None, :]
    Q, R = np.linalg.qr(C)
    # QR re-orthonormalizes against roundoff; keep the column phases of C
    d = np.diag(R)
    return Q * (d / np.abs(d))[None, :]


def _aufbau(F, N, C_prev):
    """
    Lowest-N eigenvectors of F. A degenerate cluster straddling the
    occupation boundary is resolved by maximal overlap with the previous
    occupied space, then by eigenvector index.
    """
    w, V = eigh(F)
    if N == len(w) or w[N] - w[N - 1] >= DEGENERACY_TOL:
        return V[:, :N], w[:N]
    lo = N - 1
    while lo > 0 and w[N - 1] - w[lo - 1] < DEGENERACY_TOL:
        lo -= 1
    hi = N
    while hi < len(w) and w[hi] - w[N - 1] < DEGENERACY_TOL:
        hi += 1
    cluster = V[:, lo:hi]
    m = N - lo
    if C_prev is not None:
        U, _, _ = np.linalg.svd(cluster.conj().T @ C_prev)
        chosen = cluster @ U[:, :m]
    else:
        chosen = cluster[:, :m]
    C = np.hstack([V[:, :lo], chosen])
    return C, w[:N]


def _two_cycle(energies) -> bool:
    if len(energies) < OSCILLATION_WINDOW + 2:
        return False
    e = np.asarray(energies[-(OSCILLATION_WINDOW + 2):])
    period2 = np.abs(e[2:] - e[:-2])
    step = np.abs(e[1:-1] - e[:-2])
    return bool(np.all(period2 < 1e-10) and np.all(step > 1e-8))


def scf_solve(ham: Hamiltonian, N: int, guess=None, opts: ScfOptions | None = None,
              j_threshold: float | None = None) -> CriticalPointRecord:
    """
    Iterate Phi -> aufbau(F(P)) to a zero of the residual map.

    Returns the converged record, or the best iterate with ``converged``
    False and ``status`` "max_iter" or "oscillation".
    """
    opts = opts or ScfOptions()
    C = initial_guess(ham, N) if guess is None else np.asarray(guess, dtype=complex)
    if C.shape != (ham.n_basis, N):
        raise ValueError(f"guess has shape {C.shape}, expected {(ham.n_basis, N)}")
    if np.any(np.abs(orbital_norms(C) - 1.0) > 1e-8):
        raise ValueError("initial guess is not feasible (orbital norms differ from 1)")

    P_in = density(C)
    P_occ = P_in
    shift = opts.level_shift
    energies = []
    best = None
    status = "max_iter"
    E_prev = None
    C_prev = C
    it = 0
    for it in range(1, opts.max_iter + 1):
        F = fock_from_density(P_in, ham)
        if shift > 0:
            F = F + shift * (np.eye(ham.n_basis) - P_occ)
        C_new, _ = _aufbau(F, N, C_prev)
        eps = orbital_energies_from(C_new, ham)
        res = residual_norm(C_new, eps, ham)
        E = energy(C_new, ham).total
        energies.append(E)
        if best is None or res < best[2]:
            best = (C_new, eps, res, it)
        log.debug("scf %3d  E=%.12f  res=%.3e  shift=%.3g", it, E, res, shift)
        if res < SHIFT_ANNEAL_RESIDUAL:
            shift = 0.0
        if res <= opts.residual_tol and E_prev is not None and abs(E - E_prev) <= opts.energy_tol:
            status = "converged"
            best = (C_new, eps, res, it)
            break
        if _two_cycle(energies):
            status = "oscillation"
            break
        E_prev = E
        C_prev = C_new
        P_occ = density(C_new)
        P_in = (1.0 - opts.damping) * P_occ + opts.damping * P_in

    C_best, eps_best, res_best, _ = best
    record = CriticalPointRecord(
        C=C_best, eps=eps_best, energy=energy(C_best, ham), residual_norm=res_best,
        iterations=it, converged=status == "converged", status=status,
        orthogonality_residual=orthogonality_residual(C_best), seed=opts.seed)
    return classify(record, j_threshold, opts.eps_gate)


def density_distance(a: CriticalPointRecord, b: CriticalPointRecord) -> float:
    return float(np.linalg.norm(density(a.C) - density(b.C)))


def same_solution(a: CriticalPointRecord, b: CriticalPointRecord) -> bool:
    """Dedup relation: energy within 1e-8, sorted orbital energies within 1e-6,
    density matrices within 1e-5 (Frobenius)."""
    if a.n_electrons != b.n_electrons:
        return False
    return (abs(a.E - b.E) <= 1e-8
            and np.max(np.abs(np.sort(a.eps) - np.sort(b.eps))) <= 1e-6
            and density_distance(a, b) <= 1e-5)


@dataclass
class SolutionCatalog:
    records: list[CriticalPointRecord] = field(default_factory=list)
    run_log: list[dict] = field(default_factory=list)

    def insert(self, record: CriticalPointRecord) -> bool:
        """Add ``record`` unless an equivalent one is present; keep sorted by E."""
        if any(same_solution(record, r) for r in self.records):
            return False
        self.records.append(record)
        self.records.sort(key=lambda r: (r.E, r.seed if r.seed is not None else -1))
        return True

    def __len__(self):
        return len(self.records)


def multistart_search(ham: Hamiltonian, N: int, n_starts: int,
                      opts: ScfOptions | None = None,
                      j_threshold: float | None = None) -> SolutionCatalog:
    """
    Run ``n_starts`` SCF solves: start 0 from the core guess, start k >= 1
    from the random guess seeded with ``opts.seed + k``.
    """
    if n_starts < 1:
        raise ValueError("n_starts must be >= 1")
    opts = opts or ScfOptions()
    catalog = SolutionCatalog()
    for k in range(n_starts):
        seed = opts.seed + k
        guess = initial_guess(ham, N, "core" if k == 0 else "random", seed)
        rec = scf_solve(ham, N, guess, replace(opts, seed=seed), j_threshold)
        catalog.run_log.append({"seed": seed, "converged": rec.converged, "E": rec.E,
                                "iterations": rec.iterations, "residual": rec.residual_norm})
        if rec.converged:
            catalog.insert(rec)
        else:
            log.info("start %d (seed %d) did not converge: %s", k, seed, rec.status)
    return catalog


@dataclass
class ThresholdEstimate:
    j_hat: float
    n_electrons: int
    n_starts: int
    best: CriticalPointRecord


def threshold_j(ham: Hamiltonian, n_electrons: int, n_starts: int = 4,
                opts: ScfOptions | None = None) -> ThresholdEstimate:
    """
    Basis-set estimate of J(n_electrons): the lowest converged energy over a
    multistart search. It is an upper bound on the infimum over the basis.
    """
    if n_electrons < 1:
        raise ValueError("threshold needs at least one electron")
    catalog = multistart_search(ham, n_electrons, n_starts, opts)
    if not catalog.records:
        raise RuntimeError(f"no start converged for {n_electrons} electron(s)")
    best = catalog.records[0]
    return ThresholdEstimate(best.E, n_electrons, n_starts, best)
