"""Conditional decompositions of concordant states, FRASE grouping, and the
permutation-commutator degeneracy test."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from math import prod
from typing import Sequence

import numpy as np

from .linalg import Permutation, dagger, kron, permutation_matrix, permute_subsystems
from .states import ConcordantState, DensityMatrix, LocalBasis

TAU_DEG = 1e-7


@dataclass(frozen=True, eq=False)
class ConditionalTerm:
    index: tuple[int, ...]   # basis multi-index on the support
    weight: float            # p_k
    cond: np.ndarray         # unnormalised conditional p_k * rho_{|k} on the complement
    proj: np.ndarray         # pi_k on the support, in the state's basis


@dataclass(frozen=True, eq=False)
class ConditionalDecomposition:
    dims: tuple[int, ...]
    support: tuple[int, ...]
    complement: tuple[int, ...]
    terms: tuple[ConditionalTerm, ...]


@dataclass(frozen=True, eq=False)
class FraseBlock:
    members: tuple[int, ...]  # positions in the decomposition's term list
    cond: np.ndarray
    proj: np.ndarray          # higher-rank Pi_k = sum of member projectors

    @property
    def rank(self) -> int:
        return len(self.members)


@dataclass(frozen=True, eq=False)
class FraseDecomposition:
    source: ConditionalDecomposition
    blocks: tuple[FraseBlock, ...]


def conditional_decomposition(c: ConcordantState, support: Sequence[int]) -> ConditionalDecomposition:
    """Split ``c`` as ``sum_k rho~_k (x) pi_k`` with ``pi_k`` running over the basis on ``support``.

    ``support`` may cover every subsystem, in which case each conditional is
    the 1x1 matrix ``[[p_k]]``.
    """
    n = len(c.dims)
    support = tuple(sorted(set(int(s) for s in support)))
    if not support or any(s < 0 or s >= n for s in support):
        raise ValueError(f"bad support {support} for {n} subsystems")
    comp = tuple(i for i in range(n) if i not in support)
    table = np.transpose(c.table, comp + support)
    comp_dims = [c.dims[i] for i in comp]
    sup_dims = [c.dims[i] for i in support]
    table = table.reshape(prod(comp_dims), prod(sup_dims))
    ua = kron(*(c.basis.units[i] for i in comp))
    ub = kron(*(c.basis.units[i] for i in support))
    terms = []
    for k in range(table.shape[1]):
        col = table[:, k]
        cond = (ua * col) @ dagger(ua)
        proj = np.outer(ub[:, k], ub[:, k].conj())
        terms.append(ConditionalTerm(tuple(int(x) for x in np.unravel_index(k, sup_dims)),
                                     float(col.sum()), cond, proj))
    return ConditionalDecomposition(tuple(c.dims), support, comp, tuple(terms))


def _assemble(dims, support, comp, pairs) -> np.ndarray:
    layout = list(comp) + list(support)
    total = sum(kron(cond, proj) for cond, proj in pairs)
    back = [layout.index(i) for i in range(len(dims))]
    return permute_subsystems(total, [dims[i] for i in layout], back)


def reassemble(dec: ConditionalDecomposition | FraseDecomposition) -> np.ndarray:
    """Rebuild the full density matrix in natural subsystem order."""
    if isinstance(dec, FraseDecomposition):
        src = dec.source
        pairs = [(b.cond, b.proj) for b in dec.blocks]
    else:
        src = dec
        pairs = [(t.cond, t.proj) for t in dec.terms]
    return _assemble(src.dims, src.support, src.complement, pairs)


def _find(parent, i):
    while parent[i] != i:
        parent[i] = parent[parent[i]]
        i = parent[i]
    return i


def frase(dec: ConditionalDecomposition, tau_deg: float = TAU_DEG) -> FraseDecomposition:
    """Merge support projectors whose unnormalised conditionals coincide.

    ``k1 ~ k2`` when ``||rho~_k1 - rho~_k2||_F <= tau_deg``; blocks are the
    transitive closure, merged in ascending index order.
    """
    m = len(dec.terms)
    parent = list(range(m))
    for i in range(m):
        for j in range(i + 1, m):
            if np.linalg.norm(dec.terms[i].cond - dec.terms[j].cond) <= tau_deg:
                ri, rj = _find(parent, i), _find(parent, j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)
    groups: dict[int, list[int]] = {}
    for i in range(m):
        groups.setdefault(_find(parent, i), []).append(i)
    blocks = []
    for root in sorted(groups):
        members = groups[root]
        cond = sum(dec.terms[i].cond for i in members) / len(members)
        proj = sum(dec.terms[i].proj for i in members)
        blocks.append(FraseBlock(tuple(members), cond, proj))
    return FraseDecomposition(dec, tuple(blocks))


def degenerate_blocks(probs: Sequence[float], dims: Sequence[int], tau_deg: float = TAU_DEG) -> list[list[int]]:
    """Flat-index blocks of equal probability in a diagonal table (FRASE over the full support)."""
    dims = tuple(dims)
    c = ConcordantState(LocalBasis.identity(dims), probs)
    f = frase(conditional_decomposition(c, range(len(dims))), tau_deg)
    return [list(b.members) for b in f.blocks]


def eastin_test(rho0, p_history: Permutation, q: Permutation, tol: float = 1e-9) -> bool:
    """``[P^dagger Q P, rho0] = 0`` within ``tol`` (Frobenius)."""
    m = rho0.mat if isinstance(rho0, DensityMatrix) else np.asarray(rho0)
    p = permutation_matrix(p_history)
    conj = p.T @ permutation_matrix(q) @ p
    if conj.shape != m.shape:
        raise ValueError("permutation and state dimensions differ")
    return bool(np.linalg.norm(conj @ m - m @ conj) <= tol)


def two_qubit_permutations(n_qubits: int, pair: Sequence[int]) -> list[Permutation]:
    """All 24 permutations of the four computational states of ``pair``, lifted to ``n_qubits``."""
    a, b = pair
    dims = (2,) * n_qubits
    idx = np.arange(2 ** n_qubits)
    bits = np.array(np.unravel_index(idx, dims)).T
    out = []
    for local in permutations(range(4)):
        new = bits.copy()
        src = 2 * bits[:, a] + bits[:, b]
        dst = np.array(local)[src]
        new[:, a], new[:, b] = dst // 2, dst % 2
        out.append(Permutation(tuple(np.ravel_multi_index(new.T, dims).tolist())))
    return out
