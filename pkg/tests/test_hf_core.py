import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_orbitals
from hfstruct.hf_core import (YVector, coulomb_exchange, density, energy, energy_density_form,
                              fock, lagrangian_f, orbital_energies_from, pair_operator_tensors,
                              pair_operators, pairing, residual_F, slater_energy)

seeds = st.integers(0, 2**31 - 1)
orbital_counts = st.integers(1, 4)


def random_unitary(rng, N):
    Q, R = np.linalg.qr(rng.normal(size=(N, N)) + 1j * rng.normal(size=(N, N)))
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def orthonormal(rng, n, N):
    Q, _ = np.linalg.qr(random_orbitals(rng, n, N))
    return Q


# --- density

def test_density_single_unit_vector():
    C = np.zeros((4, 1), complex)
    C[0, 0] = 1
    P = density(C)
    E = np.zeros((4, 4))
    E[0, 0] = 1
    assert np.array_equal(P, E)


@settings(max_examples=25, deadline=None)
@given(seeds, orbital_counts)
def test_density_gauge_invariance(seed, N):
    rng = np.random.default_rng(seed)
    C = random_orbitals(rng, 8, N)
    P = density(C)
    assert np.max(np.abs(P - P.conj().T)) <= 1e-12
    assert np.min(np.linalg.eigvalsh(P)) >= -1e-12
    assert abs(np.trace(P).real - N) <= 1e-12
    assert np.max(np.abs(density(C @ random_unitary(rng, N)) - P)) <= 1e-12
    phases = np.exp(1j * rng.uniform(0, 2 * np.pi, N))
    assert np.max(np.abs(density(C * phases) - P)) <= 1e-12


# --- Fock operator

def test_fock_of_empty_density_is_h(he2_ham):
    J, K = coulomb_exchange(np.zeros((8, 8)), he2_ham.eri)
    assert np.all(J == 0) and np.all(K == 0)


def test_one_orbital_self_interaction_cancels(he2_ham):
    c = random_orbitals(np.random.default_rng(0), 8, 1)
    assert abs(c[:, 0].conj() @ fock(c, he2_ham) @ c[:, 0]
               - c[:, 0].conj() @ he2_ham.h @ c[:, 0]) <= 1e-12


@settings(max_examples=20, deadline=None)
@given(seeds, orbital_counts)
def test_fock_from_pair_operators(he2_ham, seed, N):
    rng = np.random.default_rng(seed)
    C = random_orbitals(rng, 8, N)
    Q, S, _ = pair_operator_tensors(C, he2_ham)
    F_pairs = he2_ham.h + sum(Q[j, j] - S[j, j] for j in range(N))
    F = fock(C, he2_ham)
    assert np.max(np.abs(F - F_pairs)) <= 1e-12
    assert np.max(np.abs(F - F.conj().T)) <= 1e-12
    phases = np.exp(1j * rng.uniform(0, 2 * np.pi, N))
    assert np.max(np.abs(fock(C * phases, he2_ham) - F)) <= 1e-12
    assert np.max(np.abs(fock(C @ random_unitary(rng, N), he2_ham) - F)) <= 1e-12


# --- pair operators

def test_pair_operators_match_tensors(he2_ham):
    C = random_orbitals(np.random.default_rng(4), 8, 3)
    Q, S, B = pair_operator_tensors(C, he2_ham)
    for i, j in itertools.product(range(3), repeat=2):
        ops = pair_operators(C, he2_ham, i, j)
        assert np.max(np.abs(ops.Q - Q[i, j])) <= 1e-13
        assert np.max(np.abs(ops.S - S[i, j])) <= 1e-13
        assert np.max(np.abs(ops.Sbar - B[i, j])) <= 1e-13
    with pytest.raises(IndexError):
        pair_operators(C, he2_ham, 3, 0)


def test_pair_operator_definitions(he2_ham):
    """(S_ij w) = phi_i * V[phi_j^* w]; Sbar_ij w = phi_i * V[w^* phi_j]."""
    rng = np.random.default_rng(5)
    C = random_orbitals(rng, 8, 2)
    w = random_orbitals(rng, 8, 1)[:, 0]
    g = he2_ham.eri
    ops = pair_operators(C, he2_ham, 0, 1)
    ci, cj = C[:, 0], C[:, 1]
    # direct sums over basis products: (m s | l n) c_i[s] conj(c_j[l]) w[n]
    Sw = np.einsum("msln,s,l,n->m", g, ci, cj.conj(), w)
    Sbar_w = np.einsum("msnl,s,n,l->m", g, ci, w.conj(), cj)
    Qw = np.einsum("mnls,l,s,n->m", g, cj.conj(), ci, w)
    assert np.max(np.abs(ops.S @ w - Sw)) <= 1e-13
    assert np.max(np.abs(ops.Sbar @ w.conj() - Sbar_w)) <= 1e-13
    assert np.max(np.abs(ops.Q @ w - Qw)) <= 1e-13


def test_q_equals_s_on_own_orbital(he2_ham):
    C = random_orbitals(np.random.default_rng(6), 8, 3)
    for i in range(3):
        ops = pair_operators(C, he2_ham, i, i)
        assert np.max(np.abs(ops.Q @ C[:, i] - ops.S @ C[:, i])) <= 1e-13


def test_zero_orbitals_give_zero_operators(he2_ham):
    Q, S, B = pair_operator_tensors(np.zeros((8, 2)), he2_ham)
    assert not Q.any() and not S.any() and not B.any()


def test_q_minus_s_nonnegative(he2_ham):
    rng = np.random.default_rng(7)
    C = random_orbitals(rng, 8, 3)
    for i in range(3):
        ops = pair_operators(C, he2_ham, i, i)
        for _ in range(100):
            w = random_orbitals(rng, 8, 1)[:, 0]
            assert np.real(w.conj() @ (ops.Q - ops.S) @ w) >= -1e-12


# --- energy

def test_energy_of_nothing(he2_ham):
    assert energy(np.zeros((8, 2)), he2_ham).total == 0.0


def test_one_orbital_energy_is_core(he2_ham):
    c = random_orbitals(np.random.default_rng(8), 8, 1)
    e = energy(c, he2_ham)
    assert e.total == e.core
    assert abs(e.J[0, 0] - e.K[0, 0]) <= 1e-14


@settings(max_examples=30, deadline=None)
@given(seeds, orbital_counts, st.booleans())
def test_energy_forms_and_pair_tables(he2_ham, seed, N, feasible):
    rng = np.random.default_rng(seed)
    C = random_orbitals(rng, 8, N, normalize=feasible)
    e = energy(C, he2_ham)
    assert abs(e.total - energy_density_form(C, he2_ham)) <= 1e-10
    iu = np.triu_indices(N, 1)
    assert abs(e.total - (e.core + np.sum(e.J[iu] - e.K[iu]))) <= 1e-12
    assert np.all(e.J >= -1e-14)
    assert np.max(np.abs(np.diag(e.J) - np.diag(e.K))) <= 1e-12
    assert abs(e.coulomb - e.exchange - np.sum(e.J[iu] - e.K[iu])) <= 1e-10


@settings(max_examples=20, deadline=None)
@given(seeds, orbital_counts)
def test_energy_unitary_and_phase_invariance(he2_ham, seed, N):
    rng = np.random.default_rng(seed)
    C = orthonormal(rng, 8, N)
    E = energy(C, he2_ham).total
    assert abs(energy(C @ random_unitary(rng, N), he2_ham).total - E) <= 1e-10
    phases = np.exp(1j * rng.uniform(0, 2 * np.pi, N))
    assert abs(energy(C * phases, he2_ham).total - E) <= 1e-12


def slater_expectation_by_permutations(C, ham):
    """
    <Psi, H Psi> for Psi = (N!)^{-1/2} det[phi_i(x_j)], expanded over the
    permutation group with the non-orthogonal overlap matrix.
    """
    N = C.shape[1]
    D = C.conj().T @ C
    hm = C.conj().T @ ham.h @ C
    # <kl|mn> = int int phi_k^*(x) phi_l^*(y) phi_m(x) phi_n(y) / |x - y|
    V = np.einsum("ak,bm,cl,dn,abcd->klmn", C.conj(), C, C.conj(), C, ham.eri, optimize=True)
    total = 0.0
    for perm in itertools.permutations(range(N)):
        sign = np.linalg.det(np.eye(N)[list(perm)])
        for k in range(N):
            rest = np.prod([D[i, perm[i]] for i in range(N) if i != k])
            total += sign * hm[k, perm[k]] * rest
        for k, l in itertools.combinations(range(N), 2):
            rest = np.prod([D[i, perm[i]] for i in range(N) if i not in (k, l)])
            total += sign * V[k, l, perm[k], perm[l]] * rest
    return float(np.real(total))


@settings(max_examples=25, deadline=None)
@given(seeds, orbital_counts)
def test_slater_energy_against_permutation_expansion(he2_ham, seed, N):
    C = random_orbitals(np.random.default_rng(seed), 8, N)
    ref = slater_expectation_by_permutations(C, he2_ham)
    assert abs(slater_energy(C, he2_ham) - ref) <= 1e-10 * max(1.0, abs(ref))


def test_slater_energy_equals_energy_when_orthonormal(he2_ham):
    C = orthonormal(np.random.default_rng(9), 8, 3)
    assert abs(slater_energy(C, he2_ham) - energy(C, he2_ham).total) <= 1e-12


def test_slater_energy_of_dependent_tuple_is_zero(he2_ham):
    c = random_orbitals(np.random.default_rng(10), 8, 1)
    assert slater_energy(np.hstack([c, c]), he2_ham) == 0.0


# --- Lagrangian, pairing, residual

def test_lagrangian_equals_energy_when_feasible(he2_ham):
    C = random_orbitals(np.random.default_rng(11), 8, 2)
    eps = np.array([0.3, -1.1])
    assert abs(lagrangian_f(C, eps, he2_ham) - energy(C, he2_ham).total) <= 1e-14


def test_lagrangian_scaled_orbital(he2_ham):
    C = random_orbitals(np.random.default_rng(12), 8, 2)
    C[:, 1] *= np.sqrt(2)
    eps = np.array([0.3, -1.1])
    assert abs(lagrangian_f(C, eps, he2_ham) - (energy(C, he2_ham).total - eps[1])) <= 1e-12


def test_pairing_basics():
    rng = np.random.default_rng(13)
    a = YVector(random_orbitals(rng, 5, 2), rng.normal(size=2))
    b = YVector(random_orbitals(rng, 5, 2, False), rng.normal(size=2))
    zero = YVector(np.zeros((5, 2)), np.zeros(2))
    assert pairing(a, zero) == 0.0
    assert abs(pairing(a, b) - pairing(b, a)) <= 1e-14
    u = YVector(random_orbitals(rng, 5, 1), np.zeros(1))
    assert abs(pairing(u, u) - 2.0) <= 1e-14
    with pytest.raises(ValueError):
        pairing(a, YVector(np.zeros((4, 2)), np.zeros(2)))


def test_residual_shift_in_eps(he2_ham):
    rng = np.random.default_rng(14)
    C = random_orbitals(rng, 8, 3)
    eps = rng.normal(size=3)
    r0 = residual_F(C, eps, he2_ham)
    eps2 = eps.copy()
    eps2[1] += 0.25
    r1 = residual_F(C, eps2, he2_ham)
    d = r1.orbitals - r0.orbitals
    assert np.max(np.abs(d[:, 1] + 0.25 * C[:, 1])) <= 1e-14
    assert np.max(np.abs(d[:, [0, 2]])) == 0.0
    assert np.array_equal(r0.scalars, 1 - np.sum(np.abs(C) ** 2, axis=0))


def test_orbital_energies_of_one_ground_orbital(he2_ham):
    w, V = he2_ham.h_spectrum()
    eps = orbital_energies_from(V[:, :1], he2_ham)
    assert abs(eps[0] - w[0]) <= 1e-12


def test_orbital_energies_phase_invariant(he2_ham):
    rng = np.random.default_rng(15)
    C = random_orbitals(rng, 8, 3)
    e0 = orbital_energies_from(C, he2_ham)
    e1 = orbital_energies_from(C * np.exp(1j * rng.uniform(0, 6, 3)), he2_ham)
    assert np.max(np.abs(e0 - e1)) <= 1e-12
