"""
JSON file formats: molecule and basis inputs, solver records, reports.

Complex arrays are stored as {"real": [...], "imag": [...]}. Writers sort
keys and use a fixed indent so that equal content gives equal bytes.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import jsonschema
import numpy as np

from .hf_core import EnergyBreakdown, energy
from .integrals import BasisSet, MoleculeSpec, Shell
from .scf import CriticalPointRecord


class InputError(Exception):
    """Bad input file; the message carries file and location diagnostics."""


_NUMBER = {"type": "number"}
_VEC3 = {"type": "array", "items": _NUMBER, "minItems": 3, "maxItems": 3}

MOLECULE_SCHEMA = {
    "type": "object",
    "required": ["nuclei", "n_electrons"],
    "properties": {
        "nuclei": {
            "type": "array", "minItems": 1,
            "items": {"type": "object", "required": ["Z", "pos"],
                      "properties": {"Z": {"type": "number", "exclusiveMinimum": 0}, "pos": _VEC3}},
        },
        "n_electrons": {"type": "integer", "minimum": 1},
    },
}

BASIS_SCHEMA = {
    "type": "object",
    "required": ["shells"],
    "properties": {
        "shells": {
            "type": "array", "minItems": 1,
            "items": {
                "type": "object", "required": ["center_index", "primitives"],
                "properties": {
                    "center_index": {"type": "integer", "minimum": 0},
                    "primitives": {
                        "type": "array", "minItems": 1,
                        "items": {"type": "object", "required": ["exponent", "coefficient"],
                                  "properties": {"exponent": {"type": "number",
                                                              "exclusiveMinimum": 0},
                                                 "coefficient": _NUMBER}},
                    },
                },
            },
        },
    },
}

_MATRIX = {"type": "array", "items": {"type": "array", "items": _NUMBER}}
_COMPLEX = {"type": "object", "required": ["real", "imag"],
            "properties": {"real": _MATRIX, "imag": _MATRIX}}
_NULLABLE_NUMBER = {"type": ["number", "null"]}
_NULLABLE_BOOL = {"type": ["boolean", "null"]}

RECORD_SCHEMA = {
    "type": "object",
    "required": ["kind", "n_electrons", "n_basis", "orbitals", "orbital_energies", "energy",
                 "residual_norm", "iterations", "converged", "status",
                 "orthogonality_residual", "gates", "seed", "inputs"],
    "properties": {
        "kind": {"const": "critical_point_record"},
        "n_electrons": {"type": "integer", "minimum": 1},
        "n_basis": {"type": "integer", "minimum": 1},
        "orbitals": _COMPLEX,
        "orbital_energies": {"type": "array", "items": _NUMBER},
        "energy": {"type": "object", "required": ["total", "core", "coulomb", "exchange"],
                   "properties": {k: _NUMBER for k in ("total", "core", "coulomb", "exchange")}},
        "residual_norm": _NUMBER,
        "iterations": {"type": "integer"},
        "converged": {"type": "boolean"},
        "status": {"enum": ["converged", "max_iter", "oscillation"]},
        "orthogonality_residual": _NUMBER,
        "gates": {"type": "object",
                  "required": ["below_threshold", "b_eps_member", "eps_gate", "j_threshold"],
                  "properties": {"below_threshold": _NULLABLE_BOOL,
                                 "b_eps_member": _NULLABLE_BOOL,
                                 "eps_gate": _NULLABLE_NUMBER,
                                 "j_threshold": _NULLABLE_NUMBER}},
        "seed": {"type": ["integer", "null"]},
        "inputs": {"type": "object", "required": ["molecule_sha256", "basis_sha256"]},
    },
}

CATALOG_SCHEMA = {
    "type": "object",
    "required": ["kind", "n_electrons", "n_starts", "records", "runs"],
    "properties": {
        "kind": {"const": "solution_catalog"},
        "records": {"type": "array", "items": RECORD_SCHEMA},
        "runs": {"type": "array", "items": {
            "type": "object",
            "required": ["seed", "converged", "E", "iterations", "residual"]}},
    },
}

THRESHOLD_SCHEMA = {
    "type": "object",
    "required": ["kind", "j_hat", "n_electrons", "n_starts", "best"],
    "properties": {"kind": {"const": "threshold_estimate"}, "j_hat": _NUMBER,
                   "n_electrons": {"type": "integer"}, "n_starts": {"type": "integer"},
                   "best": RECORD_SCHEMA},
}

_OUTCOME = {
    "type": "object",
    "required": ["direction", "delta", "outcome", "iterations", "final_residual"],
    "properties": {"direction": {"type": "string"}, "delta": _NUMBER,
                   "outcome": {"enum": ["landed", "diverged", "collapsed"]},
                   "final_residual": _NULLABLE_NUMBER},
}

REPORT_SCHEMA = {
    "type": "object",
    "required": ["kind", "kernel_dim", "sigma_gap", "phase_tangent_residuals", "lm",
                 "koopmans", "bounds", "continuation", "non_isolated", "checks"],
    "properties": {
        "kind": {"const": "structure_report"},
        "kernel_dim": {"type": "integer", "minimum": 0},
        "sigma_gap": _NUMBER,
        "phase_tangent_residuals": {"type": "array", "items": _NUMBER},
        "lm": {"type": "object", "required": ["admissible", "split"],
               "properties": {"admissible": {"type": "boolean"}, "split": _NUMBER,
                              "lambda_min_L": _NULLABLE_NUMBER,
                              "reconstruction_err": _NULLABLE_NUMBER}},
        "koopmans": {"type": "array", "items": _NUMBER},
        "bounds": {"type": "object", "required": ["lower_ok", "upper_gate"],
                   "properties": {"lower_ok": {"type": "boolean"},
                                  "upper_gate": _NULLABLE_BOOL}},
        "continuation": {"type": "array", "items": _OUTCOME},
        "non_isolated": {"type": "boolean"},
        "verdict": {"enum": ["non_isolated", "no_step_landed", "inconclusive"]},
        "checks": {"type": "object", "additionalProperties": {"type": "boolean"}},
    },
}

PATH_SCHEMA = {
    "type": "object",
    "required": ["kind", "direction", "delta", "points"],
    "properties": {
        "kind": {"const": "continuation_path"},
        "points": {"type": "array", "items": {
            "type": "object", "required": ["step", "orbitals", "orbital_energies", "residual",
                                           "energy", "distance"],
            "properties": {"orbitals": _COMPLEX, "residual": _NUMBER, "energy": _NUMBER}}},
    },
}


def _where(path) -> str:
    out = ""
    for p in path:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else str(p))
    return out or "<root>"


def read_json(path, schema=None):
    """Parse a JSON file, raising :class:`InputError` with line/field diagnostics."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"{path}: cannot read ({exc.strerror})") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: malformed JSON ({exc.msg})") from None
    if schema is not None:
        err = jsonschema.exceptions.best_match(jsonschema.Draft202012Validator(schema)
                                               .iter_errors(data))
        if err is not None:
            raise InputError(f"{path}: field {_where(err.absolute_path)}: {err.message}")
    return data


def dumps(data, schema=None) -> str:
    """Deterministic JSON text, validated against ``schema`` if given."""
    if schema is not None:
        jsonschema.validate(data, schema)
    return json.dumps(data, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json(path, data, schema=None) -> None:
    text = dumps(data, schema)
    Path(path).write_text(text)


def content_hash(data) -> str:
    """SHA-256 of the canonical JSON form (whitespace-insensitive)."""
    canon = json.dumps(data, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def molecule_from_dict(data, source="molecule") -> MoleculeSpec:
    try:
        return MoleculeSpec([(n["Z"], n["pos"]) for n in data["nuclei"]], data["n_electrons"])
    except ValueError as exc:
        raise InputError(f"{source}: {exc}") from None


def basis_from_dict(data, molecule: MoleculeSpec, source="basis") -> BasisSet:
    shells = []
    for k, sh in enumerate(data["shells"]):
        c = sh["center_index"]
        if c >= len(molecule.nuclei):
            raise InputError(f"{source}: field shells[{k}].center_index: {c} does not refer "
                             f"to one of the {len(molecule.nuclei)} nuclei")
        prims = sh["primitives"]
        try:
            shells.append(Shell(molecule.nuclei[c].position, [p["exponent"] for p in prims],
                                [p["coefficient"] for p in prims], c))
        except ValueError as exc:
            raise InputError(f"{source}: field shells[{k}]: {exc}") from None
    return BasisSet(shells)


def load_inputs(molecule_path, basis_path):
    """Read and validate both input files; returns (molecule, basis, hashes)."""
    mdata = read_json(molecule_path, MOLECULE_SCHEMA)
    bdata = read_json(basis_path, BASIS_SCHEMA)
    mol = molecule_from_dict(mdata, str(molecule_path))
    basis = basis_from_dict(bdata, mol, str(basis_path))
    hashes = {"molecule_sha256": content_hash(mdata), "basis_sha256": content_hash(bdata)}
    return mol, basis, hashes


def complex_to_json(A) -> dict:
    A = np.asarray(A, dtype=complex)
    return {"real": A.real.tolist(), "imag": A.imag.tolist()}


def complex_from_json(d) -> np.ndarray:
    return np.asarray(d["real"], dtype=float) + 1j * np.asarray(d["imag"], dtype=float)


def _num(x):
    return None if x is None else float(x)


def record_to_dict(rec: CriticalPointRecord, inputs: dict) -> dict:
    return {
        "kind": "critical_point_record",
        "n_electrons": rec.n_electrons,
        "n_basis": int(rec.C.shape[0]),
        "orbitals": complex_to_json(rec.C),
        "orbital_energies": [float(e) for e in rec.eps],
        "energy": energy_dict(rec.energy),
        "residual_norm": float(rec.residual_norm),
        "iterations": int(rec.iterations),
        "converged": bool(rec.converged),
        "status": rec.status,
        "orthogonality_residual": float(rec.orthogonality_residual),
        "gates": {"below_threshold": rec.below_threshold, "b_eps_member": rec.b_eps_member,
                  "eps_gate": _num(rec.eps_gate), "j_threshold": _num(rec.j_threshold),
                  "note": "basis-set gates: thresholds are finite-basis estimates"},
        "seed": rec.seed,
        "inputs": dict(inputs),
    }


def record_from_dict(d, ham) -> CriticalPointRecord:
    """Rebuild a record; the energy breakdown is recomputed from the orbitals."""
    C = complex_from_json(d["orbitals"])
    if C.shape != (d["n_basis"], d["n_electrons"]):
        raise InputError(f"record: orbital array has shape {C.shape}, expected "
                         f"{(d['n_basis'], d['n_electrons'])}")
    g = d["gates"]
    return CriticalPointRecord(
        C=C, eps=np.asarray(d["orbital_energies"], dtype=float), energy=energy(C, ham),
        residual_norm=d["residual_norm"], iterations=d["iterations"],
        converged=d["converged"], status=d["status"],
        orthogonality_residual=d["orthogonality_residual"],
        below_threshold=g["below_threshold"], b_eps_member=g["b_eps_member"],
        eps_gate=g["eps_gate"], j_threshold=g["j_threshold"], seed=d["seed"])


def energy_dict(e: EnergyBreakdown) -> dict:
    return {k: float(getattr(e, k)) for k in ("total", "core", "coulomb", "exchange")}
