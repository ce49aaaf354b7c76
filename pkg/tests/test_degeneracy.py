import numpy as np
from hypothesis import given, settings, strategies as st

from concordia.degeneracy import (conditional_decomposition, degenerate_blocks, eastin_test, frase, reassemble,
                                  two_qubit_permutations)
from concordia.linalg import Permutation, random_permutation
from concordia.states import ConcordantState, DensityMatrix, LocalBasis, to_density

seeds = st.integers(0, 2**32 - 1)


def test_product_table_gives_proportional_conditionals():
    p = np.kron([0.2, 0.8], [0.3, 0.7])
    dec = conditional_decomposition(ConcordantState(LocalBasis.identity((2, 2)), p), [1])
    c0, c1 = (t.cond for t in dec.terms)
    np.testing.assert_allclose(c0 / np.trace(c0), c1 / np.trace(c1), atol=1e-12)


def test_correlated_table_conditionals():
    dec = conditional_decomposition(ConcordantState(LocalBasis.identity((2, 2)), [0.5, 0, 0, 0.5]), [1])
    np.testing.assert_allclose(dec.terms[0].cond, np.diag([0.5, 0]))
    np.testing.assert_allclose(dec.terms[1].cond, np.diag([0, 0.5]))
    assert [t.weight for t in dec.terms] == [0.5, 0.5]


def test_uniform_table_is_one_block():
    c = ConcordantState(LocalBasis.haar((2, 2), 1), [0.25] * 4)
    f = frase(conditional_decomposition(c, [1]))
    assert len(f.blocks) == 1 and f.blocks[0].rank == 2


def test_distinct_conditionals_stay_separate():
    c = ConcordantState(LocalBasis.identity((2, 2)), [0.1, 0.2, 0.3, 0.4])
    assert len(frase(conditional_decomposition(c, [1])).blocks) == 2


def test_superposition_mixture_has_rank2_block_on_first_qubit():
    # equal mixture of (|0> + |1>)|1> and (|0> - |1>)|1> is diagonal in Z x Z with p(01) = p(11)
    psi1 = np.kron([1, 1], [0, 1]) / np.sqrt(2)
    psi2 = np.kron([1, -1], [0, 1]) / np.sqrt(2)
    rho = 0.5 * np.outer(psi1, psi1) + 0.5 * np.outer(psi2, psi2)
    c = ConcordantState(LocalBasis.identity((2, 2)), np.real(np.diag(rho)))
    np.testing.assert_allclose(to_density(c).mat, rho, atol=1e-12)
    f = frase(conditional_decomposition(c, [0]))
    assert [b.rank for b in f.blocks] == [2]
    np.testing.assert_allclose(f.blocks[0].cond, np.diag([0, 0.5]))


@settings(max_examples=40, deadline=None)
@given(seeds, st.sampled_from([(2, 2), (2, 2, 2), (2, 3)]), st.booleans())
def test_decompositions_reassemble(seed, dims, degenerate):
    c = ConcordantState.random(dims, seed, degenerate=degenerate)
    rho = to_density(c).mat
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, len(dims)))
    support = sorted(rng.choice(len(dims), size=k, replace=False).tolist())
    dec = conditional_decomposition(c, support)
    assert abs(sum(np.trace(t.cond).real for t in dec.terms) - 1) < 1e-9
    np.testing.assert_allclose(reassemble(dec), rho, atol=1e-9)
    f = frase(dec)
    np.testing.assert_allclose(reassemble(f), rho, atol=1e-9)
    assert sorted(i for b in f.blocks for i in b.members) == list(range(len(dec.terms)))


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_block_count_monotone_in_tolerance(seed):
    c = ConcordantState.random((2, 2, 2), seed, degenerate=True)
    dec = conditional_decomposition(c, [2])
    counts = [len(frase(dec, tau).blocks) for tau in (1e-12, 1e-7, 1e-2, 0.1, 1.0, 10.0)]
    assert counts == sorted(counts, reverse=True)


def test_degenerate_blocks_of_table():
    assert degenerate_blocks([0.3, 0.3, 0.1, 0.1, 0.1, 0.05, 0.05, 0.0], (2, 2, 2)) == [[0, 1], [2, 3, 4], [5, 6], [7]]


def test_eastin_examples():
    ident = Permutation.identity(4)
    rho = DensityMatrix(np.diag([0.5, 0.25, 0.125, 0.125]), (2, 2))
    for seed in range(5):
        q = random_permutation(4, seed)
        p = random_permutation(4, seed + 100)
        assert eastin_test(rho, p, ident)
        assert eastin_test(np.eye(4) / 4, p, q)
    assert eastin_test(rho, ident, Permutation.swap(4, 2, 3))
    assert not eastin_test(rho, ident, Permutation.swap(4, 1, 2))


def index_oracle(table, p, q):
    pinv = p.inverse().map
    sigma = [pinv[q.map[p.map[i]]] for i in range(len(table))]
    return all(table[sigma[i]] == table[i] for i in range(len(table)))


@settings(max_examples=60, deadline=None)
@given(seeds, st.sampled_from([4, 8, 16]))
def test_eastin_matches_index_oracle(seed, d):
    rng = np.random.default_rng(seed)
    levels = rng.integers(1, 4, size=d).astype(float)
    table = levels / levels.sum()
    p = random_permutation(d, rng)
    same = np.flatnonzero(levels == levels[0])
    if len(same) > 1 and rng.random() < 0.5:
        # conjugate a swap of two equal entries back through p, so the test commutes
        swap = Permutation.swap(d, int(same[0]), int(same[1]))
        pinv = p.inverse().map
        q = Permutation(tuple(p.map[swap.map[pinv[j]]] for j in range(d)))
        assert eastin_test(np.diag(table), p, q)
    else:
        q = random_permutation(d, rng)
    assert eastin_test(np.diag(table), p, q) == index_oracle(table, p, q)


def test_two_qubit_permutations():
    perms = two_qubit_permutations(3, (0, 2))
    assert len(perms) == 24 and len({p.map for p in perms}) == 24
    for p in perms:
        # qubit 1 is untouched
        for i in range(8):
            assert (p.map[i] >> 1) & 1 == (i >> 1) & 1
