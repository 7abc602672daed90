"""Assembly of one- and two-electron integral tables over a contracted basis."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .basis import BasisSet, MoleculeSpec
from .boys import boys_f0
from .primitives import TWO_PI_5_2, gaussian_product

LINEAR_DEPENDENCE_TOL = 1e-10


class LinearDependenceError(ValueError):
    """The basis overlap matrix is numerically singular."""

    def __init__(self, message, shells, min_eigenvalue):
        super().__init__(message)
        self.shells = shells
        self.min_eigenvalue = min_eigenvalue


@dataclass(frozen=True)
class IntegralTables:
    overlap: np.ndarray
    kinetic: np.ndarray
    nuclear: np.ndarray
    eri: np.ndarray
    min_overlap_eigenvalue: float

    @property
    def h(self) -> np.ndarray:
        return self.kinetic + self.nuclear

    @property
    def n_basis(self) -> int:
        return self.overlap.shape[0]


@dataclass(frozen=True)
class _PairData:
    """Primitive-pair data for every canonical basis pair (mu >= nu), zero padded."""

    index: np.ndarray   # (npair, 2)
    p: np.ndarray       # (npair, kmax)
    P: np.ndarray       # (npair, kmax, 3)
    K: np.ndarray       # (npair, kmax): weight_a * weight_b * exp(-mu R^2)
    mu_r2: np.ndarray   # (npair, kmax): reduced exponent times |A - B|^2
    red: np.ndarray     # (npair, kmax): reduced exponent a b / (a + b)


def _pair_data(basis: BasisSet) -> _PairData:
    shells = basis.shells
    n = len(shells)
    pairs = [(m, v) for m in range(n) for v in range(m + 1)]
    kmax = max(s.n_primitives for s in shells) ** 2
    npair = len(pairs)
    p = np.ones((npair, kmax))
    P = np.zeros((npair, kmax, 3))
    K = np.zeros((npair, kmax))
    mu_r2 = np.zeros((npair, kmax))
    red = np.zeros((npair, kmax))
    for I, (m, v) in enumerate(pairs):
        sm, sv = shells[m], shells[v]
        a = np.repeat(sm.exponents, sv.n_primitives)
        b = np.tile(sv.exponents, sm.n_primitives)
        w = np.repeat(sm.weights, sv.n_primitives) * np.tile(sv.weights, sm.n_primitives)
        pp, PP, KK = gaussian_product(a, np.broadcast_to(sm.center, (a.size, 3)),
                                      b, np.broadcast_to(sv.center, (b.size, 3)))
        k = a.size
        r2 = float(np.sum((sm.center - sv.center) ** 2))
        p[I, :k] = pp
        P[I, :k] = PP
        K[I, :k] = w * KK
        red[I, :k] = a * b / pp
        mu_r2[I, :k] = red[I, :k] * r2
    return _PairData(np.array(pairs), p, P, K, mu_r2, red)


def _unpack_pairs(values, index, n):
    out = np.empty((n, n))
    out[index[:, 0], index[:, 1]] = values
    out[index[:, 1], index[:, 0]] = values
    return out


def _one_electron(pd: _PairData, molecule: MoleculeSpec | None, n: int):
    S_prim = (np.pi / pd.p) ** 1.5 * pd.K
    S = np.zeros(len(pd.index))
    T = np.zeros(len(pd.index))
    V = np.zeros(len(pd.index))
    for k in range(pd.p.shape[1]):
        S += S_prim[:, k]
        T += pd.red[:, k] * (3.0 - 2.0 * pd.mu_r2[:, k]) * S_prim[:, k]
        if molecule is not None:
            acc = np.zeros(len(pd.index))
            for nuc in molecule.nuclei:
                d = pd.P[:, k] - nuc.position
                acc -= nuc.charge * boys_f0(pd.p[:, k] * np.sum(d * d, axis=1))
            V += 2.0 * np.pi / pd.p[:, k] * pd.K[:, k] * acc
    return (_unpack_pairs(S, pd.index, n), _unpack_pairs(T, pd.index, n),
            _unpack_pairs(V, pd.index, n))


def _eri_rows(pd: _PairData, rows: slice) -> np.ndarray:
    """(IJ) block of pair-pair repulsion integrals for bra pairs in ``rows``.

    Primitive contributions are accumulated in a fixed (k, l) order with
    elementwise operations only, so any row partition yields identical bits.
    """
    p, P, K = pd.p[rows], pd.P[rows], pd.K[rows]
    kmax = pd.p.shape[1]
    out = np.zeros((p.shape[0], pd.p.shape[0]))
    for k in range(kmax):
        pk = p[:, k][:, None]
        Pk = P[:, k][:, None, :]
        Kk = K[:, k][:, None]
        if not np.any(Kk):
            continue
        for l in range(kmax):
            q = pd.p[:, l][None, :]
            Kl = pd.K[:, l][None, :]
            d = Pk - pd.P[:, l][None, :, :]
            t = pk * q / (pk + q) * np.sum(d * d, axis=2)
            out += TWO_PI_5_2 / (pk * q * np.sqrt(pk + q)) * Kk * Kl * boys_f0(t)
    return out


def _eri(pd: _PairData, n: int, workers: int) -> np.ndarray:
    npair = len(pd.index)
    if workers <= 1 or npair < 2:
        G = _eri_rows(pd, slice(0, npair))
    else:
        bounds = np.linspace(0, npair, min(workers, npair) + 1).astype(int)
        chunks = [slice(lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:])]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            G = np.vstack(list(pool.map(lambda s: _eri_rows(pd, s), chunks)))
    # canonical storage: the lower triangle (I >= J) is authoritative
    G = np.tril(G) + np.tril(G, -1).T
    pidx = np.empty((n, n), dtype=int)
    pidx[pd.index[:, 0], pd.index[:, 1]] = np.arange(npair)
    pidx[pd.index[:, 1], pd.index[:, 0]] = np.arange(npair)
    return G[pidx[:, :, None, None], pidx[None, None, :, :]]


def _check_dependence(S: np.ndarray, basis: BasisSet) -> float:
    evals, evecs = np.linalg.eigh(S)
    lam = float(evals[0])
    if lam < LINEAR_DEPENDENCE_TOL:
        v = np.abs(evecs[:, 0])
        bad = [i for i in np.flatnonzero(v > 0.1 * v.max())]
        names = [basis.shells[i].label(i) for i in bad]
        raise LinearDependenceError(
            f"basis is linearly dependent (min overlap eigenvalue {lam:.3e}); "
            f"offending shells: {', '.join(names)}", bad, lam)
    return lam


def build_tables(molecule: MoleculeSpec | None, basis: BasisSet, workers: int = 1) -> IntegralTables:
    """
    Assemble S, T, V and the dense ERI tensor.

    ``workers`` threads split the ERI pair rows; the result is bit-identical
    for every worker count.
    """
    n = basis.size
    pd = _pair_data(basis)
    S, T, V = _one_electron(pd, molecule, n)
    lam = _check_dependence(S, basis)
    eri = _eri(pd, n, workers)
    for a in (S, T, V, eri):
        a.setflags(write=False)
    return IntegralTables(S, T, V, eri, lam)
