"""
Closed-form integrals over unnormalized s-type primitives exp(-a |r - A|^2).

All functions broadcast: exponents may be arrays of any common shape and the
matching centers carry a trailing axis of length 3.
"""

import numpy as np

from .boys import boys_f0

TWO_PI_5_2 = 2.0 * np.pi**2.5


def _check_positive(*exps):
    for a in exps:
        if np.any(np.asarray(a) <= 0):
            raise ValueError("Gaussian exponents must be positive")


def _sqdist(A, B):
    d = np.asarray(A, float) - np.asarray(B, float)
    return np.sum(d * d, axis=-1)


def gaussian_product(a, A, b, B):
    """Return (p, P, K) with exp(-a|r-A|^2) exp(-b|r-B|^2) = K exp(-p|r-P|^2)."""
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    p = a + b
    P = (a[..., None] * np.asarray(A, float) + b[..., None] * np.asarray(B, float)) / p[..., None]
    K = np.exp(-a * b / p * _sqdist(A, B))
    return p, P, K


def overlap_prim(a, A, b, B):
    _check_positive(a, b)
    p, _, K = gaussian_product(a, A, b, B)
    return (np.pi / p) ** 1.5 * K


def kinetic_prim(a, A, b, B):
    """<g_a| -Laplacian/2 |g_b> (Hartree atomic units)."""
    _check_positive(a, b)
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    mu = a * b / (a + b)
    r2 = _sqdist(A, B)
    return mu * (3.0 - 2.0 * mu * r2) * overlap_prim(a, A, b, B)


def _nuclei_list(molecule):
    if molecule is None:
        return []
    if hasattr(molecule, "nuclei"):
        return [(n.charge, n.position) for n in molecule.nuclei]
    return [(float(z), np.asarray(pos, float)) for z, pos in molecule]


def nuclear_prim(a, A, b, B, molecule):
    """
    <g_a| V |g_b> with V(x) = -sum_j Z_j / |x - X_j|.

    ``molecule`` is a MoleculeSpec or any iterable of (Z, position) pairs;
    an empty list (or all-zero charges) gives 0.
    """
    _check_positive(a, b)
    p, P, K = gaussian_product(a, A, b, B)
    total = np.zeros(np.shape(p))
    for Z, C in _nuclei_list(molecule):
        total = total - Z * boys_f0(p * _sqdist(P, C))
    return 2.0 * np.pi / p * K * total


def eri_prim(a, A, b, B, c, C, d, D):
    """Electron repulsion integral (ab|cd) in chemists' notation."""
    _check_positive(a, b, c, d)
    p, P, Kab = gaussian_product(a, A, b, B)
    q, Q, Kcd = gaussian_product(c, C, d, D)
    rho = p * q / (p + q)
    return TWO_PI_5_2 / (p * q * np.sqrt(p + q)) * Kab * Kcd * boys_f0(rho * _sqdist(P, Q))
