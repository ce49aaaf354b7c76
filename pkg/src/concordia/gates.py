"""Concordance-preserving gates ``G = U_out P B U_in^dagger``."""
from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Sequence

import numpy as np

from .degeneracy import degenerate_blocks
from .linalg import Permutation, dagger, haar_unitary, make_rng, permutation_matrix, require_unitary
from .states import DensityMatrix, LocalBasis

PHASE_TOL = 1e-8
BLOCK_TOL = 1e-9


@dataclass(frozen=True)
class BlockStructure:
    partition: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        part = tuple(tuple(sorted(int(i) for i in b)) for b in self.partition)
        flat = sorted(i for b in part for i in b)
        if flat != list(range(len(flat))) or any(len(b) == 0 for b in part):
            raise ValueError("blocks must partition 0..dim-1")
        object.__setattr__(self, "partition", part)

    @property
    def dim(self) -> int:
        return sum(len(b) for b in self.partition)

    def mask(self) -> np.ndarray:
        m = np.zeros((self.dim, self.dim), dtype=bool)
        for b in self.partition:
            m[np.ix_(b, b)] = True
        return m

    @classmethod
    def trivial(cls, dim: int) -> "BlockStructure":
        return cls(tuple((i,) for i in range(dim)))


@dataclass(frozen=True, eq=False)
class ConcordantGate:
    u_out: LocalBasis
    perm: Permutation
    block: np.ndarray
    u_in: LocalBasis
    support: tuple[int, ...]
    blocks: BlockStructure | None = None

    def __post_init__(self):
        d = prod(self.u_in.dims)
        if self.u_out.dims != self.u_in.dims or self.perm.dim != d:
            raise ValueError("gate factors have inconsistent dimensions")
        block = np.array(self.block, dtype=complex)
        if block.shape != (d, d):
            raise ValueError("block factor has wrong shape")
        require_unitary(block, what="block factor")
        if self.blocks is not None:
            off = np.linalg.norm(block[~self.blocks.mask()])
            if off > BLOCK_TOL:
                raise ValueError(f"block factor leaks across declared blocks ({off:.2e})")
        block.setflags(write=False)
        object.__setattr__(self, "block", block)
        object.__setattr__(self, "support", tuple(int(s) for s in self.support))
        if len(self.support) != len(self.u_in.dims):
            raise ValueError("support size does not match factor count")

    @classmethod
    def simple(cls, u_out: LocalBasis, perm: Permutation, u_in: LocalBasis, support=None) -> "ConcordantGate":
        """Gate with ``B = I``."""
        d = prod(u_in.dims)
        support = tuple(range(len(u_in.dims))) if support is None else support
        return cls(u_out, perm, np.eye(d, dtype=complex), u_in, support)


def compose(g: ConcordantGate) -> np.ndarray:
    """``U_out P B U_in^dagger`` on the gate's support."""
    return g.u_out.matrix() @ permutation_matrix(g.perm) @ g.block @ dagger(g.u_in.matrix())


def apply(rho: DensityMatrix, g_matrix: np.ndarray) -> DensityMatrix:
    g_matrix = np.asarray(g_matrix, dtype=complex)
    if g_matrix.shape != rho.mat.shape:
        raise ValueError("gate and state dimensions differ")
    require_unitary(g_matrix, what="gate")
    out = g_matrix @ rho.mat @ dagger(g_matrix)
    return DensityMatrix((out + dagger(out)) / 2, rho.dims)


def random_block_unitary(bs: BlockStructure, seed) -> np.ndarray:
    """Independent Haar unitaries on each block, zero coupling between blocks."""
    rng = make_rng(seed)
    u = np.zeros((bs.dim, bs.dim), dtype=complex)
    for b in bs.partition:
        u[np.ix_(b, b)] = haar_unitary(len(b), rng)
    return u


def phase_overlap(a: np.ndarray, b: np.ndarray) -> float:
    """``|Tr(a^dagger b)| / dim``: equals 1 iff ``a`` and ``b`` agree up to a global phase."""
    return float(abs(np.trace(dagger(a) @ b)) / a.shape[0])


def verify_decomposition(g_matrix: np.ndarray, g: ConcordantGate, mode: str = "exact",
                         tol: float = PHASE_TOL) -> bool:
    """Check that ``g`` reproduces ``g_matrix``.

    ``mode="exact"`` compares the unitaries up to a global phase.
    ``mode="projectors"`` only requires the same conjugation action on every
    computational projector rotated into ``u_in``.
    """
    g_matrix = np.asarray(g_matrix, dtype=complex)
    c = compose(g)
    if g_matrix.shape != c.shape:
        return False
    if mode == "exact":
        return phase_overlap(g_matrix, c) >= 1 - tol
    if mode != "projectors":
        raise ValueError(f"unknown mode {mode!r}")
    u = g.u_in.matrix()
    for k in range(c.shape[0]):
        v = u[:, k]
        x = np.outer(v, v.conj())
        if np.linalg.norm(g_matrix @ x @ dagger(g_matrix) - c @ x @ dagger(c)) > tol:
            return False
    return True


def computational_projectors(dims: Sequence[int]) -> list[np.ndarray]:
    d = prod(dims)
    out = []
    for k in range(d):
        x = np.zeros((d, d), dtype=complex)
        x[k, k] = 1
        out.append(x)
    return out


def block_structure_from_table(table: Sequence[float], dims: Sequence[int], tau_deg: float = 1e-7) -> BlockStructure:
    return BlockStructure(tuple(tuple(b) for b in degenerate_blocks(table, dims, tau_deg)))

