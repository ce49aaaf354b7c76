import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from concordia.linalg import (HADAMARD, PAULI_X, Permutation, eigh, embed, group_degenerate, haar_local_unitary,
                              haar_unitary, is_unitary, kron, partial_trace, permutation_matrix, permute_subsystems,
                              random_permutation)

seeds = st.integers(0, 2**32 - 1)


def ket(*bits):
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[int("".join(map(str, bits)), 2)] = 1
    return v


def test_kron_examples():
    assert np.array_equal(kron(np.eye(2), np.eye(2)), np.eye(4))
    assert np.array_equal(kron(np.diag([1, 0]), np.diag([0, 1])), np.diag([0, 1, 0, 0]))
    np.testing.assert_allclose(kron(HADAMARD, HADAMARD) @ ket(0, 0), [0.5] * 4, atol=1e-15)


@given(seeds)
def test_kron_associative(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(3))
    np.testing.assert_allclose(kron(kron(a, b), c), kron(a, kron(b, c)), atol=1e-12)


def test_partial_trace_examples():
    p00 = np.outer(ket(0, 0), ket(0, 0))
    np.testing.assert_allclose(partial_trace(p00, [2, 2], [0]), np.diag([1, 0]))
    bell = (ket(0, 0) + ket(1, 1)) / np.sqrt(2)
    np.testing.assert_allclose(partial_trace(np.outer(bell, bell.conj()), [2, 2], [0]), np.eye(2) / 2, atol=1e-15)
    with pytest.raises(IndexError):
        partial_trace(p00, [2, 2], [2])


@given(seeds, st.sampled_from([(2, 3), (3, 2), (2, 2, 2)]))
def test_partial_trace_of_product_recovers_factors(seed, dims):
    rng = np.random.default_rng(seed)
    facs = []
    for d in dims:
        a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        r = a @ a.conj().T
        facs.append(r / np.trace(r))
    rho = kron(*facs)
    for j in range(len(dims)):
        np.testing.assert_allclose(partial_trace(rho, dims, [j]), facs[j], atol=1e-12)
    assert abs(np.trace(partial_trace(rho, dims, [0])) - 1) < 1e-12


def test_permute_and_embed_consistent():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(2, 2))
    b = rng.normal(size=(3, 3))
    np.testing.assert_allclose(permute_subsystems(kron(a, b), [2, 3], [1, 0]), kron(b, a))
    np.testing.assert_allclose(embed(a, [3, 2], [1]), kron(np.eye(3), a))


def test_eigh_examples():
    w, v = eigh(np.diag([3.0, 1.0]))
    np.testing.assert_allclose(w, [1, 3])
    np.testing.assert_allclose(np.abs(v), [[0, 1], [1, 0]])
    w, v = eigh(PAULI_X)
    np.testing.assert_allclose(w, [-1, 1], atol=1e-15)
    np.testing.assert_allclose(np.abs(v[:, 1] @ np.array([1, 1]) / np.sqrt(2)), 1, atol=1e-12)
    np.testing.assert_allclose(eigh(np.eye(4) / 4)[0], [0.25] * 4)
    with pytest.raises(ValueError):
        eigh(np.array([[0, 1], [0, 0]]))


@settings(max_examples=30)
@given(seeds, st.integers(1, 64))
def test_eigh_reconstructs(seed, d):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    h = a + a.conj().T
    w, v = eigh(h)
    assert np.all(np.diff(w) >= 0)
    np.testing.assert_allclose(v @ np.diag(w) @ v.conj().T, h, atol=1e-9)
    np.testing.assert_allclose(v.conj().T @ v, np.eye(d), atol=1e-8)


def test_group_degenerate():
    assert group_degenerate([0.25, 0.25 + 1e-12, 0.5]) == [[0, 1], [2]]


@given(seeds, st.lists(st.integers(2, 3), min_size=1, max_size=3))
def test_haar_local_unitary_deterministic_and_unitary(seed, dims):
    u = haar_local_unitary(dims, seed)
    assert np.array_equal(u, haar_local_unitary(dims, seed))
    np.testing.assert_allclose(u @ u.conj().T, np.eye(u.shape[0]), atol=1e-10)


def test_haar_second_moment_and_left_invariance():
    rng = np.random.default_rng(12345)
    us = np.array([haar_unitary(2, rng) for _ in range(10_000)])
    m = np.mean(np.abs(us[:, 0, 0]) ** 2)
    assert abs(m - 0.5) <= 0.01
    w = HADAMARD @ np.diag([1, 1j])
    wu = np.einsum("ij,njk->nik", w, us)
    # |u_00|^2 is uniform on [0, 1] for U(2); compare low moments of W U and U
    for k in (1, 2):
        assert abs(np.mean(np.abs(wu[:, 0, 0]) ** (2 * k)) - np.mean(np.abs(us[:, 0, 0]) ** (2 * k))) < 0.02


def test_permutation_examples():
    assert np.array_equal(permutation_matrix(Permutation.identity(4)), np.eye(4))
    cnot = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
    assert np.array_equal(permutation_matrix(Permutation.swap(4, 2, 3)), cnot)
    with pytest.raises(ValueError):
        Permutation((0, 0, 1))


@given(seeds, st.integers(1, 32))
def test_permutation_algebra(seed, d):
    p = random_permutation(d, seed)
    q = random_permutation(d, seed + 1)
    m = permutation_matrix(p)
    assert np.array_equal(m @ permutation_matrix(p.inverse()), np.eye(d))
    assert (m.sum(axis=0) == 1).all() and (m.sum(axis=1) == 1).all()
    assert np.array_equal(permutation_matrix(p.then(q)), permutation_matrix(q) @ m)
    t = np.arange(d, dtype=float)
    np.testing.assert_array_equal(p.apply_to_table(t), np.real(np.diag(m @ np.diag(t) @ m.T)))
    assert is_unitary(m)


def test_random_permutation_uniform_on_three():
    counts = {}
    for s in range(6000):
        p = random_permutation(3, s).map
        counts[p] = counts.get(p, 0) + 1
    assert len(counts) == 6
    assert all(abs(c / 6000 - 1 / 6) < 0.03 for c in counts.values())
