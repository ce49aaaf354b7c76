import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from concordia.errors import NotDiagonalInBasis
from concordia.linalg import HADAMARD, kron
from concordia.states import (ConcordantState, DensityMatrix, LocalBasis, SbsSpec, build_sbs, from_density,
                              to_density)

seeds = st.integers(0, 2**32 - 1)
shapes = st.lists(st.integers(2, 3), min_size=1, max_size=3)


def test_density_validation():
    with pytest.raises(ValueError):
        DensityMatrix(np.diag([0.5, 0.6]), (2,))
    with pytest.raises(ValueError):
        DensityMatrix(np.diag([1.5, -0.5]), (2,))
    with pytest.raises(ValueError):
        DensityMatrix(np.array([[0.5, 1], [0, 0.5]]), (2,))
    with pytest.raises(ValueError):
        DensityMatrix(np.eye(4) / 4, (2, 3))


def test_to_density_examples():
    c = ConcordantState(LocalBasis.identity((2, 2)), [1, 0, 0, 0])
    np.testing.assert_allclose(to_density(c).mat, np.diag([1, 0, 0, 0]))
    c = ConcordantState(LocalBasis((HADAMARD, np.eye(2))), [0.5, 0, 0, 0.5])
    plus, minus = np.array([1, 1]) / np.sqrt(2), np.array([1, -1]) / np.sqrt(2)
    e0, e1 = np.array([1, 0]), np.array([0, 1])
    a, b = np.kron(plus, e0), np.kron(minus, e1)
    np.testing.assert_allclose(to_density(c).mat, 0.5 * (np.outer(a, a) + np.outer(b, b)), atol=1e-15)


@given(seeds, shapes)
def test_spectrum_and_round_trip(seed, dims):
    c = ConcordantState.random(dims, seed)
    rho = to_density(c)
    np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(rho.mat)), np.sort(c.probs), atol=1e-9)
    back = from_density(rho, c.basis)
    np.testing.assert_allclose(back.probs, c.probs, atol=1e-9)
    np.testing.assert_allclose(to_density(back).mat, rho.mat, atol=1e-8)


def test_from_density_examples():
    u = LocalBasis.haar((2, 2), 4)
    np.testing.assert_allclose(from_density(DensityMatrix(np.eye(4) / 4, (2, 2)), u).probs, [0.25] * 4, atol=1e-12)
    bell = DensityMatrix.from_vector([1, 0, 0, 1], (2, 2))
    with pytest.raises(NotDiagonalInBasis):
        from_density(bell, LocalBasis.identity((2, 2)))


def test_table_view_is_subsystem0_major():
    p = np.arange(8, dtype=float) / 28
    c = ConcordantState(LocalBasis.identity((2, 2, 2)), p)
    assert c.table[1, 0, 1] == p[5]


def test_sbs_examples():
    rho = build_sbs(SbsSpec.orthogonal_records([0.3, 0.7], 1))
    np.testing.assert_allclose(rho.mat, np.diag([0.3, 0, 0, 0.7]))
    rho = build_sbs(SbsSpec.orthogonal_records([0.5, 0.5], 3))
    ghz_dephased = np.zeros((16, 16))
    ghz_dephased[0, 0] = ghz_dephased[15, 15] = 0.5
    np.testing.assert_allclose(rho.mat, ghz_dephased)
    np.testing.assert_allclose(rho.reduced([0]).mat, np.eye(2) / 2)


@settings(max_examples=25)
@given(st.lists(st.floats(0.01, 1), min_size=2, max_size=3), st.integers(1, 3))
def test_sbs_properties(w, n_frag):
    p = np.array(w) / sum(w)
    rho = build_sbs(SbsSpec.orthogonal_records(p, n_frag))
    np.testing.assert_allclose(rho.reduced([0]).mat, np.diag(p), atol=1e-12)
    d = len(p)
    for k in range(1, n_frag + 1):
        joint = np.real(np.diag(rho.reduced([0, k]).mat)).reshape(d, d)
        # reading fragment k identifies the pointer index with certainty
        np.testing.assert_allclose(joint, np.diag(p), atol=1e-12)


def test_sbs_with_mixed_records_is_block_diagonal():
    r0 = [np.diag([0.9, 0.1]), np.diag([0.8, 0.2])]
    r1 = [np.diag([0.2, 0.8]), np.eye(2) / 2]
    rho = build_sbs(SbsSpec([0.4, 0.6], (tuple(r0), tuple(r1))))
    m = rho.mat.reshape(2, 4, 2, 4)
    assert np.allclose(m[0, :, 1, :], 0)
    np.testing.assert_allclose(m[0, :, 0, :], 0.4 * kron(*r0))


def test_local_basis_rejects_non_unitary():
    with pytest.raises(ValueError):
        LocalBasis((np.array([[1, 1], [0, 1]]),))
