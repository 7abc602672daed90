"""One- and two-electron integrals over contracted s-type Gaussians."""

from .basis import (BasisSet, MoleculeSpec, Nucleus, Shell, even_tempered,
                    primitive_norm, sto3g_1s)
from .boys import boys_f0
from .oracle import OracleAccuracyError, quadrature_oracle
from .primitives import eri_prim, kinetic_prim, nuclear_prim, overlap_prim
from .tables import IntegralTables, LinearDependenceError, build_tables

__all__ = [
    "BasisSet", "MoleculeSpec", "Nucleus", "Shell", "even_tempered", "primitive_norm",
    "sto3g_1s", "boys_f0", "OracleAccuracyError", "quadrature_oracle", "eri_prim",
    "kinetic_prim", "nuclear_prim", "overlap_prim", "IntegralTables",
    "LinearDependenceError", "build_tables",
]
