"""
Acceptance criteria 1-11 at their stated tolerances.

Each test stores (passed, detail) in ``conftest.ACCEPTANCE``; the terminal
summary prints one PASS/FAIL line per criterion.
"""

import time
import warnings

import numpy as np
import pytest

import conftest
from conftest import SYSTEMS, random_orbitals, two_center
from hfstruct.cli import main
from hfstruct.hf_core import YVector, energy, slater_energy
from hfstruct.integrals import (eri_prim, kinetic_prim, nuclear_prim, overlap_prim,
                                quadrature_oracle)
from hfstruct.scf import ScfOptions, initial_guess, scf_solve
from hfstruct.structure import (AmbiguousRank, SplitPreconditionError, bounds_check,
                                continue_path, directional_errors, finite_difference_jacobian,
                                gradient_check, jacobian, kernel_basis, koopmans_check,
                                lm_decomposition, manifold_probe, pair_positivity_samples,
                                phase_tangent, rescaling_construction, rq_positivity_samples)
from test_cli import DATA, EVEN, H2, HE2


def record(k, ok, detail):
    conftest.ACCEPTANCE[k] = (bool(ok), detail)
    assert ok, detail


def converged(corpus):
    return [(label, ham, rec) for label, ham, rec in corpus if rec.converged]


def random_point(rng, n, N):
    C = random_orbitals(rng, n, N) * rng.uniform(0.8, 1.2, N)
    return YVector(C, rng.normal(size=N))


# 1 -------------------------------------------------------------------------

def test_criterion_01_integral_oracle():
    rng = np.random.default_rng(2024)
    n_configs = 50
    worst = {"overlap": 0.0, "kinetic": 0.0, "nuclear": 0.0, "eri": 0.0}
    t0 = time.perf_counter()
    for _ in range(n_configs):
        a = rng.uniform(0.2, 3.0, 4)
        P = rng.uniform(-1.0, 1.0, (4, 3))
        nuc = [(rng.uniform(0.5, 3.0), rng.uniform(-1.0, 1.0, 3))]
        pairs = {
            "overlap": (overlap_prim(a[0], P[0], a[1], P[1]),
                        quadrature_oracle("overlap", a[0], P[0], a[1], P[1])),
            "kinetic": (kinetic_prim(a[0], P[0], a[1], P[1]),
                        quadrature_oracle("kinetic", a[0], P[0], a[1], P[1])),
            "nuclear": (nuclear_prim(a[0], P[0], a[1], P[1], nuc),
                        quadrature_oracle("nuclear", a[0], P[0], a[1], P[1], nuclei=nuc)),
            "eri": (eri_prim(a[0], P[0], a[1], P[1], a[2], P[2], a[3], P[3]),
                    quadrature_oracle("eri", a[0], P[0], a[1], P[1], a[2], P[2], a[3], P[3])),
        }
        for kind, (closed, ref) in pairs.items():
            worst[kind] = max(worst[kind], abs(closed - ref))
    elapsed = time.perf_counter() - t0
    ok = (max(worst["overlap"], worst["kinetic"], worst["nuclear"]) <= 1e-10
          and worst["eri"] <= 1e-6 and elapsed < 60)
    detail = (f"{n_configs} configs; max err S {worst['overlap']:.1e} T {worst['kinetic']:.1e} "
              f"V {worst['nuclear']:.1e} ERI {worst['eri']:.1e}; {elapsed:.1f} s")
    record(1, ok, detail)


# 2 -------------------------------------------------------------------------

def test_criterion_02_gradient_identity(he2_ham):
    rng = np.random.default_rng(7)
    worst_ratio, worst_abs = 0.0, 0.0
    for p in range(20):
        y = random_point(rng, he2_ham.n_basis, 3)
        rep = gradient_check(y, he2_ham, 10, seed=100 + p, steps=(1e-3, 1e-4))
        e0, e1 = rep.abs_errors[:, 0], rep.abs_errors[:, 1]
        ratio = np.where(e0 > 0, e1 / np.where(e0 > 0, e0, 1), 0.0)
        worst_ratio = max(worst_ratio, float(ratio.max()))
        worst_abs = max(worst_abs, float(e1.max()))
    ok = worst_ratio <= 0.02 and worst_abs <= 1e-6
    record(2, ok, f"20 points x 10 dirs; max err(1e-4)/err(1e-3) {worst_ratio:.4f}, "
                  f"max abs err {worst_abs:.1e}")


# 3 -------------------------------------------------------------------------

def test_criterion_03_solver_correctness():
    worst = 0.0
    for _, make, _ in SYSTEMS:
        ham = make()
        rec = scf_solve(ham, 1)
        assert rec.converged
        worst = max(worst, abs(rec.E - ham.lambda_min), abs(rec.eps[0] - ham.lambda_min))
    _, h2 = two_center(1.0, 1.4, 2)
    rec2 = scf_solve(h2, 2, initial_guess(h2, 2, "core"), ScfOptions(max_iter=500))
    ok = worst <= 1e-10 and rec2.converged and rec2.residual_norm <= 1e-9 \
        and rec2.iterations <= 500
    record(3, ok, f"N=1 on {len(SYSTEMS)} bases: max |E - lam_min|, |e1 - lam_min| {worst:.1e}; "
                  f"H2 N=2 residual {rec2.residual_norm:.1e} in {rec2.iterations} iterations")


# 4 -------------------------------------------------------------------------

def test_criterion_04_koopmans(record_corpus):
    recs = converged(record_corpus)
    worst = max(float(np.max(np.abs(koopmans_check(r.C, r.eps, ham)))) for _, ham, r in recs)
    record(4, worst <= 1e-8, f"{len(recs)} converged records; max drop-one residual {worst:.1e}")


# 5 -------------------------------------------------------------------------

def test_criterion_05_orbital_energy_bounds(record_corpus):
    recs = converged(record_corpus)
    lower_fail, gated, upper_fail = 0, 0, 0
    worst_margin = np.inf
    for _, ham, r in recs:
        b = bounds_check(r.eps, r.E, ham, r.j_threshold, 0.1)
        worst_margin = min(worst_margin, b.lower_margin)
        lower_fail += not b.lower_ok
        if b.gate_applies:
            gated += 1
            upper_fail += not b.upper_ok
    ok = lower_fail == 0 and upper_fail == 0 and gated > 0
    record(5, ok, f"{len(recs)} records; min(e_i) - lam_min >= {worst_margin:.3f}; "
                  f"{gated} gated records, {upper_fail} upper-bound failures")


# 6 -------------------------------------------------------------------------

def test_criterion_06_positivity(he2_ham, h2_ham):
    worst = np.inf
    count = 0
    for ham, N in ((he2_ham, 3), (h2_ham, 2)):
        rng = np.random.default_rng(31)
        for k in range(5):
            y = random_point(rng, ham.n_basis, N)
            pair = pair_positivity_samples(y.orbitals, ham, 100, seed=k)
            rq = rq_positivity_samples(y, ham, 100, seed=k)
            worst = min(worst, float(pair.min()), float(rq.min()))
            count += pair.size + rq.size
    record(6, worst >= -1e-12, f"{count} sampled forms; minimum {worst:.2e}")


# 7 -------------------------------------------------------------------------

def test_criterion_07_jacobian(he2_ham, record_corpus):
    rng = np.random.default_rng(77)
    points = [(he2_ham, random_point(rng, he2_ham.n_basis, 3)) for _ in range(3)]
    points += [(ham, YVector(r.C, r.eps)) for _, ham, r in converged(record_corpus)[:3]]
    worst_entry, worst_sym, worst_ratio, exact = 0.0, 0.0, 0.0, 0
    for ham, y in points:
        jac = jacobian(y, ham)
        worst_entry = max(worst_entry,
                          float(np.max(np.abs(finite_difference_jacobian(y, ham, 1e-4)
                                              - jac.matrix))))
        worst_sym = max(worst_sym, jac.symmetry_error())
        for _ in range(5):
            v = rng.normal(size=jac.matrix.shape[0])
            e = directional_errors(y, ham, jac.matrix, v / np.linalg.norm(v), (1e-3, 1e-4))
            if e.max() <= 1e-10:
                # quadratic residual (one orbital): differences are exact up to roundoff
                exact += 1
                continue
            worst_ratio = max(worst_ratio, e[1] / e[0])
    ok = worst_entry <= 1e-6 and worst_sym <= 1e-10 and worst_ratio <= 0.02
    record(7, ok, f"{len(points)} points; max entry err {worst_entry:.1e}, "
                  f"||J-J^T||/||J|| {worst_sym:.1e}, decay ratio {worst_ratio:.4f} "
                  f"({exact} directions exact to roundoff)")


# 8 -------------------------------------------------------------------------

def test_criterion_08_lm_decomposition(record_corpus):
    checked, skipped = 0, 0
    worst_recon, worst_margin, rank_ok = 0.0, np.inf, True
    for _, ham, r in converged(record_corpus):
        try:
            lm = lm_decomposition(YVector(r.C, r.eps), ham)
        except SplitPreconditionError:
            skipped += 1
            continue
        checked += 1
        worst_recon = max(worst_recon, lm.reconstruction_error())
        worst_margin = min(worst_margin, lm.lambda_min_L() - lm.split / 2)
        rank_ok &= lm.h2_rank() == int(np.sum(lm.h_eigenvalues <= -lm.split / 2))
    ok = checked > 0 and worst_recon <= 1e-10 and worst_margin >= -1e-8 and rank_ok
    record(8, ok, f"{checked} admissible records ({skipped} inadmissible skipped); "
                  f"recon {worst_recon:.1e}, min(lam_min(L) - split/2) {worst_margin:.3f}, "
                  f"H2 rank matches: {rank_ok}")


# 9 -------------------------------------------------------------------------

def test_criterion_09_kernel_manifold(record_corpus):
    recs = converged(record_corpus)
    worst_tan, min_gap, dims_ok, probe_ok = 0.0, np.inf, True, True
    worst_res, worst_drift = 0.0, 0.0
    for _, ham, r in recs:
        y = YVector(r.C, r.eps)
        J = jacobian(y, ham).matrix
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", AmbiguousRank)
            kb = kernel_basis(J, 1e-7)
            probe = manifold_probe(y, ham, 1e-2, 1e-9, 1e-7)
        smax = kb.singular_values[0]
        for j in range(r.n_electrons):
            worst_tan = max(worst_tan, float(np.linalg.norm(J @ phase_tangent(y, j))) / smax)
        dims_ok &= kb.dim >= r.n_electrons
        min_gap = min(min_gap, kb.gap)
        probe_ok &= probe.non_isolated
        path = continue_path(y, ham, "phase", 1e-2, 10, 1e-9, 1e-7)
        worst_res = max(worst_res, max(s.residual for s in path))
        worst_drift = max(worst_drift, max(abs(energy(s.point.orbitals, ham).total - r.E)
                                           for s in path))
    ok = (worst_tan <= 1e-8 and dims_ok and min_gap >= 10 and probe_ok
          and worst_res <= 1e-9 and worst_drift <= 1e-8)
    record(9, ok, f"{len(recs)} records; max ||Jv||/sigma_max {worst_tan:.1e}, dim >= N: "
                  f"{dims_ok}, min gap {min_gap:.1e}, non_isolated: {probe_ok}; phase path "
                  f"residual {worst_res:.1e}, energy drift {worst_drift:.1e}")


# 10 ------------------------------------------------------------------------

def test_criterion_10_rescaling(he2_ham, h2_ham):
    rng = np.random.default_rng(10)
    worst_orth, worst_rise, n = 0.0, -np.inf, 0
    while n < 50:
        ham, N = (he2_ham, 3) if n % 2 else (h2_ham, 2)
        _, V = ham.h_spectrum()
        C = V[:, :N] + rng.uniform(0.2, 1.0) * random_orbitals(rng, ham.n_basis, N, False)
        C /= np.linalg.norm(C, axis=0)
        if slater_energy(C, ham) >= 0:
            continue
        res = rescaling_construction(C, ham)
        worst_orth = max(worst_orth, res.orthonormality_error)
        worst_rise = max(worst_rise, res.energy_out - res.energy_in)
        n += 1
    ok = worst_orth <= 1e-10 and worst_rise <= 1e-10
    record(10, ok, f"{n} tuples; orthonormality err {worst_orth:.1e}, "
                   f"max E_out - E_in {worst_rise:.2e}")


# 11 ------------------------------------------------------------------------

def test_criterion_11_reproducibility(tmp_path):
    common = ["--molecule", str(HE2), "--basis", str(EVEN), "--n-starts", "3", "--seed", "5"]
    rec = tmp_path / "rec.json"
    assert main(["scf", *common, "--out", str(rec)]) == 0
    commands = {
        "scf": ["scf", *common],
        "search": ["search", *common],
        "threshold": ["threshold", *common],
        "analyze": ["analyze", *common, "--record", str(rec)],
        "continue": ["continue", *common, "--record", str(rec), "--steps", "3"],
    }
    same = {}
    for name, argv in commands.items():
        outs = []
        for k in range(2):
            p = tmp_path / f"{name}{k}.json"
            assert main(argv + ["--out", str(p)]) == 0
            outs.append(p.read_bytes())
        same[name] = outs[0] == outs[1]
    record(11, all(same.values()),
           "byte-identical reruns: " + ", ".join(f"{k} {'yes' if v else 'NO'}"
                                                 for k, v in same.items()))
