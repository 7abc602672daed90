"""
Numerical kernel of the derivative, predictor-corrector continuation along
kernel directions, and the local manifold probe at a critical point.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from ..hf_core import Hamiltonian, YVector, energy, orthogonality_residual, residual_norm
from ..linalg import svd
from .jacobian import jacobian, residual_vector
from .realify import derealify, global_phase_tangent, phase_tangent, realify

DEFAULT_RANK_TOL = 1e-7
GAP_THRESHOLD = 10.0
GAP_CAP = 1e300


class AmbiguousRank(UserWarning):
    """The singular values show no clear gap at the rank threshold."""


class CorrectorDiverged(RuntimeError):
    pass


class StepCollapsed(RuntimeError):
    pass


class ProbePreconditionError(ValueError):
    pass


@dataclass
class KernelBasis:
    vectors: np.ndarray          # (dim, d), orthonormal columns
    singular_values: np.ndarray  # descending
    rank_tol: float
    gap: float
    ambiguous: bool

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


def kernel_basis(J, rank_tol_rel: float = DEFAULT_RANK_TOL) -> KernelBasis:
    """
    Right singular vectors of J with singular value <= rank_tol_rel * sigma_max.

    ``gap`` is (smallest retained sigma) / (largest kernel sigma); with an
    empty kernel it is sigma_min / (rank_tol_rel * sigma_max). A gap below 10
    emits :class:`AmbiguousRank` and sets ``ambiguous``.
    """
    J = np.asarray(J, dtype=float)
    _, s, V = svd(J)
    smax = s[0] if s.size else 0.0
    cut = rank_tol_rel * smax
    d = int(np.sum(s <= cut))
    r = s.size - d
    tiny = np.finfo(float).tiny
    if d == 0:
        gap = s[-1] / max(cut, tiny)
    elif r == 0:
        gap = GAP_CAP
    else:
        gap = s[r - 1] / max(s[r], tiny)
    gap = float(min(gap, GAP_CAP))
    ambiguous = gap < GAP_THRESHOLD
    if ambiguous:
        warnings.warn(f"no clear singular-value gap at rank {r} (ratio {gap:.3g})", AmbiguousRank,
                      stacklevel=2)
    return KernelBasis(V[:, r:], s, rank_tol_rel, gap, ambiguous)


@dataclass
class StepResult:
    point: YVector
    iterations: int
    residual: float
    distance: float


def continue_step(y: YVector, tangent, delta: float, ham: Hamiltonian,
                  kernel: KernelBasis | None = None, tol: float = 1e-9,
                  max_iter: int = 20) -> StepResult:
    """
    Predictor y + delta * tangent, then Newton corrections restricted to the
    orthogonal complement of the kernel at y (minimum-norm least squares).

    Raises
    ------
    ValueError
        If y is not a solution or the tangent is outside the kernel.
    CorrectorDiverged
        If the residual is not below ``tol`` after ``max_iter`` corrections.
    StepCollapsed
        If the corrected point lies within delta/2 of y.
    """
    N = y.n_orbitals
    z0 = realify(y)
    r0 = residual_vector(z0, ham, N)
    if np.linalg.norm(r0) > tol:
        raise ValueError(f"start point is not a solution (residual {np.linalg.norm(r0):.3e})")
    if delta == 0:
        return StepResult(derealify(z0, ham.n_basis, N), 0, float(np.linalg.norm(r0)), 0.0)
    if kernel is None:
        kernel = kernel_basis(jacobian(y, ham).matrix)
    Z = kernel.vectors
    v = np.asarray(tangent, dtype=float)
    v = v / np.linalg.norm(v)
    if np.linalg.norm(v - Z @ (Z.T @ v)) > 1e-6:
        raise ValueError("tangent is not in the kernel")

    P = np.eye(z0.size) - Z @ Z.T
    z = z0 + delta * v
    r = residual_vector(z, ham, N)
    it = 0
    while np.linalg.norm(r) > tol:
        if it == max_iter:
            raise CorrectorDiverged(f"residual {np.linalg.norm(r):.3e} after {it} corrections")
        J = jacobian(derealify(z, ham.n_basis, N), ham).matrix
        step = np.linalg.lstsq(J @ P, -r, rcond=1e-10)[0]
        z = z + P @ step
        r = residual_vector(z, ham, N)
        it += 1
    if it < max_iter:
        # one polishing step, kept only if it helps
        J = jacobian(derealify(z, ham.n_basis, N), ham).matrix
        z1 = z + P @ np.linalg.lstsq(J @ P, -r, rcond=1e-10)[0]
        r1 = residual_vector(z1, ham, N)
        if np.linalg.norm(r1) < np.linalg.norm(r):
            z, r, it = z1, r1, it + 1
    dist = float(np.linalg.norm(z - z0))
    if dist < 0.5 * abs(delta):
        raise StepCollapsed(f"corrected point is {dist:.3e} from start (delta {delta:g})")
    return StepResult(derealify(z, ham.n_basis, N), it, float(np.linalg.norm(r)), dist)


@dataclass
class ContinuationOutcome:
    direction: str
    delta: float
    outcome: str            # "landed" | "diverged" | "collapsed"
    iterations: int
    final_residual: float | None
    distance: float | None
    energy_drift: float | None = None
    orthogonality_residual: float | None = None

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class ManifoldReport:
    kernel_dim: int
    sigma_gap: float
    sigma_max: float
    ambiguous_rank: bool
    phase_tangent_residuals: list[float]
    phase_tangents_independent: bool
    continuation: list[ContinuationOutcome] = field(default_factory=list)
    non_isolated: bool = False
    verdict: str = "inconclusive"

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["continuation"] = [c.to_dict() for c in self.continuation]
        return d


def _attempt(y, v, delta, ham, kernel, tol, label, E0):
    try:
        res = continue_step(y, v, delta, ham, kernel, tol)
    except CorrectorDiverged:
        return ContinuationOutcome(label, delta, "diverged", 20, None, None)
    except StepCollapsed:
        return ContinuationOutcome(label, delta, "collapsed", 0, None, None)
    C = res.point.orbitals
    return ContinuationOutcome(label, delta, "landed", res.iterations, res.residual, res.distance,
                               abs(energy(C, ham).total - E0), orthogonality_residual(C))


def manifold_probe(y: YVector, ham: Hamiltonian, delta: float = 1e-2, tol: float = 1e-9,
                   rank_tol: float = DEFAULT_RANK_TOL) -> ManifoldReport:
    """
    Local structure of the solution set at a critical point.

    Extracts the kernel, checks the N phase tangents against it, and tries
    one continuation step at +-delta along the global phase and along every
    kernel vector. ``non_isolated`` is set when some step lands at a distinct
    point with residual <= tol; an ambiguous rank makes the verdict
    "inconclusive".
    """
    res0 = residual_norm(y.orbitals, y.scalars, ham)
    if res0 > tol:
        raise ProbePreconditionError(f"point is not converged (residual {res0:.3e} > {tol:g})")
    J = jacobian(y, ham).matrix
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AmbiguousRank)
        kb = kernel_basis(J, rank_tol)
    smax = float(kb.singular_values[0])
    N = y.n_orbitals
    T = np.column_stack([phase_tangent(y, j) for j in range(N)])
    tangent_res = [float(np.linalg.norm(J @ T[:, j]) / smax) for j in range(N)]
    independent = bool(np.linalg.svd(T, compute_uv=False)[-1] > 1e-8)

    report = ManifoldReport(kb.dim, kb.gap, smax, kb.ambiguous, tangent_res, independent)
    E0 = energy(y.orbitals, ham).total
    if kb.dim > 0:
        directions = [("global_phase", global_phase_tangent(y))]
        directions += [(f"kernel[{k}]", kb.vectors[:, k]) for k in range(kb.dim)]
        for label, v in directions:
            for sgn in (1.0, -1.0):
                report.continuation.append(_attempt(y, v, sgn * delta, ham, kb, tol, label, E0))
    report.non_isolated = any(c.outcome == "landed" and c.final_residual <= tol
                              and c.distance >= 0.5 * delta
                              for c in report.continuation)
    if kb.ambiguous:
        report.verdict = "inconclusive"
    else:
        report.verdict = "non_isolated" if report.non_isolated else "no_step_landed"
    return report


def continue_path(y: YVector, ham: Hamiltonian, direction="phase", delta: float = 1e-2,
                  steps: int = 10, tol: float = 1e-9,
                  rank_tol: float = DEFAULT_RANK_TOL) -> list[StepResult]:
    """
    Repeated continuation steps. ``direction`` is "phase" (global phase) or
    an integer kernel index at the start point; later tangents are the
    previous step direction projected onto the local kernel.
    """
    path = []
    prev = None
    cur = y
    for _ in range(steps):
        kb = kernel_basis(jacobian(cur, ham).matrix, rank_tol)
        if direction == "phase":
            v = global_phase_tangent(cur)
        else:
            if prev is None:
                k = int(direction)
                if not 0 <= k < kb.dim:
                    raise IndexError(f"kernel index {k} out of range (dim {kb.dim})")
                v = kb.vectors[:, k]
            else:
                # carry the previous step direction into the new kernel
                Z = kb.vectors
                v = Z @ (Z.T @ prev)
                v /= np.linalg.norm(v)
        step = continue_step(cur, v, delta, ham, kb, tol)
        prev = (realify(step.point) - realify(cur)) / step.distance
        path.append(step)
        cur = step.point
    return path
