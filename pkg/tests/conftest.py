import numpy as np
import pytest

from hfstruct.hf_core import Hamiltonian
from hfstruct.integrals import BasisSet, MoleculeSpec, build_tables, even_tempered, sto3g_1s
from hfstruct.scf import ScfOptions, multistart_search, threshold_j

ACCEPTANCE = {}


def two_center(Z, R, N, n_per=4, alpha0=0.15, ratio=2.5):
    """Two equal nuclei on the z axis with an even-tempered s basis on each."""
    mol = MoleculeSpec([(Z, [0.0, 0.0, -R / 2]), (Z, [0.0, 0.0, R / 2])], N)
    shells = [s for k, nuc in enumerate(mol.nuclei)
              for s in even_tempered(nuc.position, alpha0, ratio, n_per, k)]
    return mol, Hamiltonian.from_tables(build_tables(mol, BasisSet(shells)))


def h2_sto3g(N=2, R=1.4):
    mol = MoleculeSpec([(1.0, [0.0, 0.0, 0.0]), (1.0, [0.0, 0.0, R])], N)
    basis = BasisSet([sto3g_1s(n.position, center_index=k) for k, n in enumerate(mol.nuclei)])
    return mol, Hamiltonian.from_tables(build_tables(mol, basis))


def random_orbitals(rng, n, N, normalize=True):
    C = rng.normal(size=(n, N)) + 1j * rng.normal(size=(n, N))
    if normalize:
        C /= np.linalg.norm(C, axis=0)
    return C


@pytest.fixture(scope="session")
def h2_ham():
    return two_center(1.0, 1.4, 2)[1]


@pytest.fixture(scope="session")
def he2_ham():
    return two_center(2.0, 1.4, 3)[1]


@pytest.fixture(scope="session")
def sto3g_ham():
    return h2_sto3g()[1]


# (label, hamiltonian factory, electron counts)
SYSTEMS = [
    ("H2/even-tempered R=1.4", lambda: two_center(1.0, 1.4, 2)[1], (1, 2)),
    ("He2-like Z=2 R=1.4", lambda: two_center(2.0, 1.4, 3)[1], (2, 3)),
    ("Z=2 R=2.0", lambda: two_center(2.0, 2.0, 4)[1], (4,)),
    ("Z=1.5 R=2.0", lambda: two_center(1.5, 2.0, 3)[1], (3,)),
    ("H2/STO-3G", lambda: h2_sto3g()[1], (1, 2)),
]


@pytest.fixture(scope="session")
def record_corpus():
    """
    Converged records from multistart searches over the test systems, each
    classified against the basis-set threshold J_hat(N-1).
    """
    opts = ScfOptions(seed=11)
    out = []
    for label, make, counts in SYSTEMS:
        ham = make()
        for N in counts:
            j_hat = threshold_j(ham, N - 1, 4, opts).j_hat if N > 1 else None
            cat = multistart_search(ham, N, 4, opts, j_hat)
            for rec in cat.records:
                out.append((f"{label} N={N}", ham, rec))
    return out


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
