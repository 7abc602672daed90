"""Molecule and contracted s-type Gaussian basis definitions."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Nucleus:
    charge: float
    position: np.ndarray

    def __post_init__(self):
        pos = np.asarray(self.position, dtype=float).reshape(3)
        object.__setattr__(self, "position", pos)
        object.__setattr__(self, "charge", float(self.charge))


@dataclass(frozen=True)
class MoleculeSpec:
    """Nuclear charges and positions (bohr) plus the electron count."""

    nuclei: tuple[Nucleus, ...]
    n_electrons: int

    def __post_init__(self):
        nuclei = tuple(
            n if isinstance(n, Nucleus) else Nucleus(*n) for n in self.nuclei
        )
        object.__setattr__(self, "nuclei", nuclei)
        if not nuclei:
            raise ValueError("molecule needs at least one nucleus")
        for k, nuc in enumerate(nuclei):
            if not nuc.charge > 0:
                raise ValueError(f"nuclei[{k}].Z must be positive, got {nuc.charge}")
        for a in range(len(nuclei)):
            for b in range(a):
                if np.allclose(nuclei[a].position, nuclei[b].position, rtol=0, atol=1e-12):
                    raise ValueError(f"nuclei[{a}] and nuclei[{b}] share a position")
        if int(self.n_electrons) != self.n_electrons or self.n_electrons < 1:
            raise ValueError(f"n_electrons must be a positive integer, got {self.n_electrons}")
        object.__setattr__(self, "n_electrons", int(self.n_electrons))

    @property
    def charges(self) -> np.ndarray:
        return np.array([n.charge for n in self.nuclei])

    @property
    def positions(self) -> np.ndarray:
        return np.array([n.position for n in self.nuclei]).reshape(-1, 3)

    def translated(self, shift) -> "MoleculeSpec":
        shift = np.asarray(shift, dtype=float)
        return MoleculeSpec(
            tuple(Nucleus(n.charge, n.position + shift) for n in self.nuclei),
            self.n_electrons,
        )


def primitive_norm(alpha):
    """Normalization constant of exp(-alpha r^2)."""
    return (2.0 * np.asarray(alpha) / np.pi) ** 0.75


@dataclass(frozen=True)
class Shell:
    """
    One contracted s function.

    ``coefficients`` multiply *normalized* primitives, as in published
    basis-set tables. ``weights`` are the final multipliers of the bare
    primitives exp(-alpha |r - center|^2), including the contraction
    renormalization so that the function has unit self-overlap.
    """

    center: np.ndarray
    exponents: np.ndarray
    coefficients: np.ndarray
    center_index: int | None = None
    weights: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        center = np.asarray(self.center, dtype=float).reshape(3)
        exps = np.atleast_1d(np.asarray(self.exponents, dtype=float))
        coefs = np.atleast_1d(np.asarray(self.coefficients, dtype=float))
        if exps.shape != coefs.shape or exps.ndim != 1 or exps.size == 0:
            raise ValueError("shell needs matching, nonempty exponent and coefficient lists")
        if np.any(exps <= 0) or not np.all(np.isfinite(exps)):
            raise ValueError(f"shell exponents must be positive, got {exps}")
        raw = coefs * primitive_norm(exps)
        p = exps[:, None] + exps[None, :]
        self_overlap = float(raw @ (np.pi / p) ** 1.5 @ raw)
        if not self_overlap > 0:
            raise ValueError("contracted function has zero norm")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "exponents", exps)
        object.__setattr__(self, "coefficients", coefs)
        object.__setattr__(self, "weights", raw / np.sqrt(self_overlap))

    @property
    def n_primitives(self) -> int:
        return self.exponents.size

    def translated(self, shift) -> "Shell":
        return Shell(self.center + np.asarray(shift, float), self.exponents,
                     self.coefficients, self.center_index)

    def label(self, index: int) -> str:
        where = f"center {self.center_index}" if self.center_index is not None else \
            "at (" + ", ".join(f"{c:g}" for c in self.center) + ")"
        return f"shell {index} ({where})"


@dataclass(frozen=True)
class BasisSet:
    shells: tuple[Shell, ...]

    def __post_init__(self):
        object.__setattr__(self, "shells", tuple(self.shells))
        if not self.shells:
            raise ValueError("basis set is empty")

    def __len__(self):
        return len(self.shells)

    def __iter__(self):
        return iter(self.shells)

    @property
    def size(self) -> int:
        return len(self.shells)

    def translated(self, shift) -> "BasisSet":
        return BasisSet(tuple(s.translated(shift) for s in self.shells))


# STO-3G 1s contraction for zeta = 1; exponents scale with zeta^2.
STO3G_1S_EXPONENTS = np.array([2.227660, 0.405771, 0.109818])
STO3G_1S_COEFFICIENTS = np.array([0.154329, 0.535328, 0.444635])


def sto3g_1s(center, zeta: float = 1.24, center_index: int | None = None) -> Shell:
    """STO-3G 1s shell; zeta=1.24 gives the standard hydrogen exponents."""
    return Shell(center, STO3G_1S_EXPONENTS * zeta**2, STO3G_1S_COEFFICIENTS, center_index)


def even_tempered(center, alpha0: float, ratio: float, n: int,
                  center_index: int | None = None) -> list[Shell]:
    """Uncontracted shells with exponents alpha0 * ratio**k, k = 0..n-1."""
    return [Shell(center, [alpha0 * ratio**k], [1.0], center_index) for k in range(n)]
