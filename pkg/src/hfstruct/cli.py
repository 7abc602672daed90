"""
Command-line front end.

Exit codes: 0 success, 1 input error, 2 solver did not converge (record
still written), 3 an analysis check failed.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from pathlib import Path

import numpy as np

from . import files
from .files import InputError
from .hf_core import Hamiltonian, YVector, energy, residual_norm
from .integrals import LinearDependenceError, build_tables
from .scf import ScfOptions, multistart_search, scf_solve, threshold_j
from .structure import (AmbiguousRank, CorrectorDiverged, SplitPreconditionError, StepCollapsed,
                        bounds_check, continue_path, jacobian, koopmans_check, lm_decomposition,
                        manifold_probe, pair_positivity_samples, rq_positivity_samples)

EXIT_OK, EXIT_INPUT, EXIT_NOT_CONVERGED, EXIT_CHECK_FAILED = 0, 1, 2, 3

log = logging.getLogger("hfstruct")


def _options(args) -> ScfOptions:
    return ScfOptions(max_iter=args.max_iter, residual_tol=args.tol, damping=args.damping,
                      level_shift=args.level_shift, seed=args.seed, eps_gate=args.eps_gate)


def _setup(args):
    mol, basis, hashes = files.load_inputs(args.molecule, args.basis)
    try:
        tables = build_tables(mol, basis)
    except LinearDependenceError as exc:
        raise InputError(f"{args.basis}: {exc}") from None
    return mol, Hamiltonian.from_tables(tables), hashes


def _threshold(ham, N, n_starts, opts):
    """J_hat(N-1) for the basis-set gate, or None for one electron."""
    if N < 2:
        return None
    try:
        return threshold_j(ham, N - 1, n_starts, opts).j_hat
    except RuntimeError as exc:
        log.warning("threshold estimate unavailable: %s", exc)
        return None


def _load_record(args, ham, hashes):
    d = files.read_json(args.record, files.RECORD_SCHEMA)
    if d["inputs"] != hashes:
        raise InputError(f"{args.record}: record was produced from different input files")
    rec = files.record_from_dict(d, ham)
    if not rec.converged:
        raise InputError(f"{args.record}: record is not converged (status {rec.status})")
    if not rec.feasible(1e-9):
        raise InputError(f"{args.record}: orbitals violate the norm constraints "
                         "(record is not feasible)")
    res = residual_norm(rec.C, rec.eps, ham)
    if res > args.tol:
        raise InputError(f"{args.record}: residual {res:.3e} exceeds tolerance {args.tol:g}")
    return rec


def _write(path, data, schema):
    text = files.dumps(data, schema)
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _write_log(path, runs):
    if path is None:
        return
    with open(path, "w") as fh:
        for r in runs:
            fh.write(json.dumps(r, sort_keys=True) + "\n")


def cmd_scf(args) -> int:
    mol, ham, hashes = _setup(args)
    opts = _options(args)
    N = mol.n_electrons
    if N > ham.n_basis:
        raise InputError(f"{args.molecule}: {N} electrons do not fit a basis of size "
                         f"{ham.n_basis}")
    j_hat = _threshold(ham, N, args.n_starts, opts)
    rec = scf_solve(ham, N, None, opts, j_hat)
    _write(args.out, files.record_to_dict(rec, hashes), files.RECORD_SCHEMA)
    print(f"{rec.status}: E = {rec.E:.12f}  residual = {rec.residual_norm:.3e}  "
          f"iterations = {rec.iterations}", file=sys.stderr)
    return EXIT_OK if rec.converged else EXIT_NOT_CONVERGED


def structure_report(rec, ham, delta=1e-2, tol=1e-9, rank_tol=1e-7, n_samples=100,
                     seed=0) -> dict:
    """All structure checks at a converged record, as a JSON-ready dict."""
    y = YVector(rec.C, rec.eps)
    jac = jacobian(y, ham)
    probe = manifold_probe(y, ham, delta, tol, rank_tol)
    N = rec.n_electrons
    checks = {
        "jacobian_symmetric": jac.symmetry_error() <= 1e-10,
        "phase_tangents_in_kernel": max(probe.phase_tangent_residuals) <= 1e-8,
        "phase_tangents_independent": probe.phase_tangents_independent,
        "kernel_dim_at_least_N": probe.kernel_dim >= N,
        "non_isolated": probe.non_isolated,
    }
    try:
        lm = lm_decomposition(y, ham)
        lam_L = lm.lambda_min_L()
        lm_out = {"admissible": True, "split": lm.split, "lambda_min_L": lam_L,
                  "reconstruction_err": lm.reconstruction_error(),
                  "h2_rank": lm.h2_rank(), "h2_real_rank": lm.h2_real_rank(),
                  "n_h_eigenvalues_below_split": lm.n_split_eigenvalues,
                  "coupling_rank": lm.coupling_rank()}
        checks["lm_reconstruction"] = lm_out["reconstruction_err"] <= 1e-10
        checks["lm_coercive"] = lam_L >= 0.5 * lm.split - 1e-8
        checks["lm_h2_rank"] = lm_out["h2_rank"] == lm.n_split_eigenvalues
        checks["lm_coupling_rank"] = lm_out["coupling_rank"] <= 2 * N
    except SplitPreconditionError as exc:
        lm_out = {"admissible": False, "split": float(min(-np.max(rec.eps), 0.05)),
                  "lambda_min_L": None, "reconstruction_err": None, "reason": str(exc)}
    kp = koopmans_check(rec.C, rec.eps, ham)
    checks["koopmans"] = bool(np.max(np.abs(kp)) <= 1e-8)
    b = bounds_check(rec.eps, rec.E, ham, rec.j_threshold,
                     rec.eps_gate if rec.eps_gate is not None else 0.1)
    checks["lower_bound"] = b.lower_ok
    if b.gate_applies:
        checks["upper_gate"] = bool(b.upper_ok)
    pos_pair = float(pair_positivity_samples(rec.C, ham, n_samples, seed).min())
    pos_rq = float(rq_positivity_samples(y, ham, n_samples, seed).min())
    checks["pair_positivity"] = pos_pair >= -1e-12
    checks["rq_positivity"] = pos_rq >= -1e-12
    return {
        "kind": "structure_report",
        "n_electrons": N,
        "energy": rec.E,
        "kernel_dim": probe.kernel_dim,
        "sigma_gap": probe.sigma_gap,
        "sigma_max": probe.sigma_max,
        "ambiguous_rank": probe.ambiguous_rank,
        "jacobian_symmetry_error": jac.symmetry_error(),
        "phase_tangent_residuals": probe.phase_tangent_residuals,
        "lm": lm_out,
        "koopmans": [float(x) for x in kp],
        "bounds": {"lower_ok": b.lower_ok, "lower_margin": b.lower_margin,
                   "lambda_min_h": b.lambda_min,
                   "upper_gate": b.upper_ok if b.gate_applies else None,
                   "gate_applies": b.gate_applies, "eps_gate": b.eps_gate,
                   "j_threshold": b.j_threshold},
        "positivity": {"pair_min": pos_pair, "rq_min": pos_rq, "n_samples": n_samples},
        "continuation": [c.to_dict() for c in probe.continuation],
        "non_isolated": probe.non_isolated,
        "verdict": probe.verdict,
        "checks": {k: bool(v) for k, v in checks.items()},
    }


def cmd_analyze(args) -> int:
    _, ham, hashes = _setup(args)
    rec = _load_record(args, ham, hashes)
    report = structure_report(rec, ham, args.delta, args.tol, args.rank_tol, seed=args.seed)
    _write(args.out, report, files.REPORT_SCHEMA)
    failed = [k for k, ok in report["checks"].items() if not ok]
    if failed:
        print("failed checks: " + ", ".join(failed), file=sys.stderr)
        return EXIT_CHECK_FAILED
    print(f"all {len(report['checks'])} checks passed; kernel dim {report['kernel_dim']}, "
          f"verdict {report['verdict']}", file=sys.stderr)
    return EXIT_OK


def cmd_search(args) -> int:
    mol, ham, hashes = _setup(args)
    opts = _options(args)
    N = mol.n_electrons
    j_hat = _threshold(ham, N, args.n_starts, opts)
    cat = multistart_search(ham, N, args.n_starts, opts, j_hat)
    _write_log(args.log, cat.run_log)
    out = {"kind": "solution_catalog", "n_electrons": N, "n_starts": args.n_starts,
           "records": [files.record_to_dict(r, hashes) for r in cat.records],
           "runs": cat.run_log}
    _write(args.out, out, files.CATALOG_SCHEMA)
    print(f"{len(cat.records)} distinct solution(s) from {args.n_starts} start(s)",
          file=sys.stderr)
    return EXIT_OK


def cmd_threshold(args) -> int:
    mol, ham, hashes = _setup(args)
    n = args.n_electrons if args.n_electrons is not None else mol.n_electrons - 1
    if n < 1:
        raise InputError("threshold needs at least one electron (N-1 >= 1)")
    try:
        est = threshold_j(ham, n, args.n_starts, _options(args))
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    out = {"kind": "threshold_estimate", "j_hat": est.j_hat, "n_electrons": n,
           "n_starts": args.n_starts, "best": files.record_to_dict(est.best, hashes)}
    _write(args.out, out, files.THRESHOLD_SCHEMA)
    print(f"J_hat({n}) = {est.j_hat:.12f}", file=sys.stderr)
    return EXIT_OK


def cmd_continue(args) -> int:
    _, ham, hashes = _setup(args)
    rec = _load_record(args, ham, hashes)
    direction = args.direction
    if direction != "phase":
        try:
            direction = int(direction)
        except ValueError:
            raise InputError(f"--direction must be 'phase' or a kernel index, got "
                             f"{direction!r}") from None
    try:
        path = continue_path(YVector(rec.C, rec.eps), ham, direction, args.delta, args.steps,
                             args.tol, args.rank_tol)
    except (CorrectorDiverged, StepCollapsed) as exc:
        print(f"continuation failed: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    except IndexError as exc:
        raise InputError(str(exc)) from None
    points = [{"step": k + 1, "orbitals": files.complex_to_json(s.point.orbitals),
               "orbital_energies": [float(e) for e in s.point.scalars],
               "residual": s.residual, "energy": energy(s.point.orbitals, ham).total,
               "distance": s.distance, "corrector_iterations": s.iterations}
              for k, s in enumerate(path)]
    out = {"kind": "continuation_path", "direction": str(args.direction), "delta": args.delta,
           "start_energy": rec.E, "points": points}
    _write(args.out, out, files.PATH_SCHEMA)
    print(f"{len(points)} point(s) written", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--molecule", required=True, help="molecule JSON file")
    common.add_argument("--basis", required=True, help="basis JSON file")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--max-iter", type=int, default=500)
    common.add_argument("--tol", type=float, default=1e-9, help="residual tolerance")
    common.add_argument("--level-shift", type=float, default=0.1)
    common.add_argument("--damping", type=float, default=0.3)
    common.add_argument("--n-starts", type=int, default=4)
    common.add_argument("--eps-gate", type=float, default=0.1)
    common.add_argument("--rank-tol", type=float, default=1e-7)
    common.add_argument("--delta", type=float, default=1e-2)
    common.add_argument("--out", default=None, help="output JSON (stdout if omitted)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="hfstruct",
                                description="Hartree-Fock critical points and their structure")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("scf", parents=[common], help="solve from the core guess")
    a = sub.add_parser("analyze", parents=[common], help="structure checks at a record")
    a.add_argument("--record", required=True)
    s = sub.add_parser("search", parents=[common], help="multistart search")
    s.add_argument("--log", default=None, help="JSON-lines run log")
    t = sub.add_parser("threshold", parents=[common], help="estimate J(N-1)")
    t.add_argument("--n-electrons", type=int, default=None,
                   help="electron count (default: molecule's N - 1)")
    c = sub.add_parser("continue", parents=[common], help="continuation path from a record")
    c.add_argument("--record", required=True)
    c.add_argument("--direction", default="phase", help="'phase' or a kernel index")
    c.add_argument("--steps", type=int, default=10)
    return p


COMMANDS = {"scf": cmd_scf, "analyze": cmd_analyze, "search": cmd_search,
            "threshold": cmd_threshold, "continue": cmd_continue}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        _options(args)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", AmbiguousRank)
            return COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
