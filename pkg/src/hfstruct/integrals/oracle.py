"""
Numerical-quadrature reference values for s-type primitive integrals.

Nothing here uses the Gaussian product theorem or the Boys function: the
integrands are evaluated pointwise from their definitions.

* overlap, kinetic: products of 1D integrals, each by adaptive ``quad``.
* nuclear, eri: the Coulomb kernel is written as

      1/|s| = 2/sqrt(pi) * int_0^inf exp(-u^2 |s|^2) du,

  which makes the spatial integral separable. Each 1D factor
  G_k(u) = int f_k(s) exp(-u^2 s^2) ds is done by the trapezoid rule on a fine
  grid (spectrally accurate for smooth, rapidly decaying integrands) while
  exp(-u^2 s^2) is wide, and by Gauss-Hermite in v = u s once it is narrow.
  The outer u integral is Gauss-Legendre after u = u0 tau / (1 - tau).
  Every value is recomputed with doubled resolution; disagreement beyond
  the target accuracy (relative once |value| > 1) raises :class:`OracleAccuracyError`.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import quad

TARGETS = {"overlap": 1e-10, "kinetic": 1e-10, "nuclear": 1e-10, "eri": 1e-6}
_WINDOW = 6.5  # exp(-42) ~ 6e-19


class OracleAccuracyError(RuntimeError):
    pass


def _gauss1d(a, A):
    return lambda x: np.exp(-a * (x - A) ** 2)


def _window(a, A, b, B):
    lo = max(A - _WINDOW / np.sqrt(a), B - _WINDOW / np.sqrt(b))
    hi = min(A + _WINDOW / np.sqrt(a), B + _WINDOW / np.sqrt(b))
    return lo, hi


def _quad(f, lo, hi, points=None):
    if hi <= lo:
        return 0.0, 0.0
    pts = None
    if points is not None:
        pts = [x for x in points if lo < x < hi] or None
    # full_output keeps quadpack's roundoff notice out of the warning stream;
    # the returned error estimate is checked by the caller instead
    val, err, *_ = quad(f, lo, hi, epsabs=1e-14, epsrel=1e-12, limit=400, points=pts,
                        full_output=1)
    return val, err


def _overlap_1d(a, A, b, B):
    lo, hi = _window(a, A, b, B)
    ga, gb = _gauss1d(a, A), _gauss1d(b, B)
    return _quad(lambda x: ga(x) * gb(x), lo, hi, points=[A, B])


def _gradient_1d(a, A, b, B):
    """int g_a'(x) g_b'(x) dx with the derivatives of the integrand taken by hand."""
    lo, hi = _window(a, A, b, B)
    ga, gb = _gauss1d(a, A), _gauss1d(b, B)
    return _quad(lambda x: (-2 * a * (x - A) * ga(x)) * (-2 * b * (x - B) * gb(x)),
                 lo, hi, points=[A, B])


def _one_electron(kind, a, A, b, B):
    S = []
    err = 0.0
    for k in range(3):
        v, e = _overlap_1d(a, A[k], b, B[k])
        S.append(v)
        err += e
    if kind == "overlap":
        return S[0] * S[1] * S[2], err
    D = []
    for k in range(3):
        v, e = _gradient_1d(a, A[k], b, B[k])
        D.append(v)
        err += e
    # <a| -Laplacian/2 |b> = 1/2 int grad a . grad b
    return 0.5 * (D[0] * S[1] * S[2] + S[0] * D[1] * S[2] + S[0] * S[1] * D[2]), err


class _Profile:
    """Sampled 1D factor f(s) of a separable Coulomb integral."""

    def __init__(self, func, lo, hi, width):
        self.func = func
        self.lo = lo
        self.hi = hi
        self.width = width


def _coulomb_separable(profiles, refine: int):
    """int d^3 s  prod_k f_k(s_k) / |s| for three 1D profiles."""
    width = min(p.width for p in profiles)
    spread = max(max(abs(p.lo), abs(p.hi)) for p in profiles)
    u0 = 1.0 / np.hypot(width, 0.25 * spread)
    n_u = 96 * refine
    tau, wt = np.polynomial.legendre.leggauss(n_u)
    tau = 0.5 * (tau + 1.0)
    wt = 0.5 * wt
    u = u0 * tau / (1.0 - tau)
    du = u0 / (1.0 - tau) ** 2
    vh, wh = np.polynomial.hermite.hermgauss(60 * refine)

    total = np.ones_like(u)
    for prof in profiles:
        h = 0.08 * prof.width / refine
        s = np.arange(prof.lo, prof.hi + h, h)
        fs = prof.func(s)
        u_switch = 0.25 / h
        G = np.empty_like(u)
        wide = u <= u_switch
        # trapezoid (endpoints are negligible)
        G[wide] = h * (np.exp(-np.outer(u[wide] ** 2, s**2)) @ fs)
        narrow = ~wide
        if np.any(narrow):
            un = u[narrow]
            pts = vh[None, :] / un[:, None]
            G[narrow] = (prof.func(pts.ravel()).reshape(pts.shape) @ wh) / un
        total *= G
    return 2.0 / np.sqrt(np.pi) * np.sum(wt * du * total)


def _density_profile(a, A, b, B):
    """f(s) = g_a(C + s) g_b(C + s) relative to a point C, as a closure factory."""
    ga, gb = _gauss1d(a, A), _gauss1d(b, B)
    return lambda x: ga(x) * gb(x)


def _nuclear_profiles(a, A, b, B, C):
    profs = []
    for k in range(3):
        rho = _density_profile(a, A[k], b, B[k])
        lo, hi = _window(a, A[k], b, B[k])
        profs.append(_Profile(lambda s, rho=rho, c=C[k]: rho(c + s), lo - C[k], hi - C[k],
                              1.0 / np.sqrt(2 * (a + b))))
    return profs


def _eri_profiles(a, A, b, B, c, C, d, D, refine: int):
    profs = []
    for k in range(3):
        rho1 = _density_profile(a, A[k], b, B[k])
        rho2 = _density_profile(c, C[k], d, D[k])
        lo1, hi1 = _window(a, A[k], b, B[k])
        lo2, hi2 = _window(c, C[k], d, D[k])
        if hi1 <= lo1 or hi2 <= lo2:
            profs.append(_Profile(lambda s: np.zeros_like(s), -1.0, 1.0, 1.0))
            continue
        ht = 0.25 / np.sqrt(a + b + c + d) / refine
        t = np.arange(lo2, hi2 + ht, ht)
        r2 = rho2(t)

        # f(s) = int rho1(t + s) rho2(t) dt, trapezoid over t
        def corr(s, t=t, r2=r2, rho1=rho1, ht=ht):
            s = np.asarray(s, float)
            out = np.empty(s.shape)
            flat = s.ravel()
            res = out.ravel()
            for lo in range(0, flat.size, 4096):
                blk = flat[lo:lo + 4096]
                res[lo:lo + 4096] = ht * (rho1(blk[:, None] + t[None, :]) @ r2)
            return out

        width = np.sqrt(1.0 / (2 * (a + b)) + 1.0 / (2 * (c + d)))
        profs.append(_Profile(corr, lo1 - hi2, hi1 - lo2, width))
    return profs


def _normalize_args(args):
    out = []
    for k, x in enumerate(args):
        out.append(np.asarray(x, float).reshape(3) if k % 2 else float(x))
    return out


def quadrature_oracle(kind: str, *args, nuclei=None, check: bool = True) -> float:
    """
    Reference value of a primitive integral by numerical quadrature.

    Parameters
    ----------
    kind : {"overlap", "kinetic", "nuclear", "eri"}
    *args : alternating exponent / center, two primitives for one-electron
        kinds and four for ``"eri"``.
    nuclei : iterable of (Z, position) or MoleculeSpec, for ``"nuclear"``.
    check : bool
        Recompute at doubled resolution and raise OracleAccuracyError when
        the two disagree by more than a tenth of the target accuracy. The
        target is absolute for values of magnitude up to 1 and relative above.
    """
    if kind not in TARGETS:
        raise ValueError(f"unknown integral kind {kind!r}")
    want = 4 if kind == "eri" else 2
    if len(args) != 2 * want:
        raise ValueError(f"{kind} needs {want} (exponent, center) pairs")
    args = _normalize_args(args)
    if any(x <= 0 for x in args[0::2]):
        raise ValueError("Gaussian exponents must be positive")
    target = TARGETS[kind]

    if kind in ("overlap", "kinetic"):
        val, err = _one_electron(kind, *args)
        if check and err > 0.1 * target * max(1.0, abs(val)):
            raise OracleAccuracyError(f"{kind}: quad error estimate {err:.2e} above target")
        return float(val)

    def evaluate(refine):
        if kind == "nuclear":
            if nuclei is None:
                return 0.0
            items = [(n.charge, n.position) for n in nuclei.nuclei] \
                if hasattr(nuclei, "nuclei") else list(nuclei)
            total = 0.0
            for Z, C in items:
                if Z == 0:
                    continue
                C = np.asarray(C, float)
                total -= Z * _coulomb_separable(_nuclear_profiles(*args, C), refine)
            return total
        return _coulomb_separable(_eri_profiles(*args, refine=refine), refine)

    val = evaluate(1)
    if check:
        fine = evaluate(2)
        if abs(fine - val) > 0.1 * target * max(1.0, abs(fine)):
            raise OracleAccuracyError(
                f"{kind}: refinement changed value by {abs(fine - val):.2e}")
        val = fine
    return float(val)
