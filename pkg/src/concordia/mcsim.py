"""Monte-Carlo sampling of concordant circuits given in decomposed form, with a
dense reference simulator for checking it."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import prod
from typing import Sequence

import numpy as np

from .errors import TooLarge
from .linalg import Permutation, dagger, make_rng, permutation_matrix, random_permutation
from .states import LocalBasis

CHUNK = 1 << 15
DENSE_MAX_QUBITS = 10


@dataclass(frozen=True, eq=False)
class CircuitPlan:
    """Initial diagonal table, permutations in circuit order, final local rotation."""

    p0: np.ndarray
    perms: tuple[Permutation, ...]
    u_final: LocalBasis

    def __post_init__(self):
        p0 = np.array(self.p0, dtype=float).reshape(-1)
        d = prod(self.u_final.dims)
        if p0.size != d:
            raise ValueError(f"table has {p0.size} entries, basis acts on dimension {d}")
        if np.any(p0 < -1e-12) or abs(p0.sum() - 1) > 1e-9:
            raise ValueError("p0 is not a probability table")
        if any(p.dim != d for p in self.perms):
            raise ValueError("permutation dimension mismatch")
        p0 = np.clip(p0, 0, None)
        p0.setflags(write=False)
        object.__setattr__(self, "p0", p0)
        object.__setattr__(self, "perms", tuple(self.perms))

    @property
    def dims(self) -> tuple[int, ...]:
        return self.u_final.dims

    def composed(self) -> Permutation:
        total = Permutation.identity(self.p0.size)
        for p in self.perms:
            total = total.then(p)
        return total


@dataclass(frozen=True)
class SampleReport:
    counts: dict[int, int]   # flat outcome index -> count
    shots: int
    seed: int

    def distribution(self, dim: int) -> np.ndarray:
        out = np.zeros(dim)
        for k, c in self.counts.items():
            out[k] = c
        return out / self.shots


def _workers() -> int:
    env = os.environ.get("CONCORDIA_THREADS")
    if env:
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)


def _sample_chunk(plan: CircuitPlan, cdfs, mapping: np.ndarray, n: int, seed: int, chunk: int) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence([seed, chunk]))
    dims = plan.dims
    i = rng.choice(plan.p0.size, size=n, p=plan.p0)
    j = mapping[i]
    digits = np.unravel_index(j, dims)
    out = np.empty((len(dims), n), dtype=np.int64)
    for q, (cdf, col) in enumerate(zip(cdfs, digits)):
        u = rng.random(n)
        # per-qubit Born sampling from column ``col`` of |u_q|^2
        out[q] = (u[:, None] >= cdf[:, col].T[:, :-1]).sum(axis=1)
    return np.ravel_multi_index(tuple(out), dims)


def simulate(plan: CircuitPlan, shots: int, seed: int) -> SampleReport:
    """Sample ``shots`` measurement outcomes of the planned circuit.

    Shots are cut into fixed-size chunks seeded by ``(seed, chunk)``, so the
    counts do not depend on the number of worker threads.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    mapping = np.asarray(plan.composed().map)
    cdfs = [np.cumsum(np.abs(u) ** 2, axis=0) for u in plan.u_final.units]
    sizes = [min(CHUNK, shots - s) for s in range(0, shots, CHUNK)]
    with ThreadPoolExecutor(max_workers=_workers()) as pool:
        parts = list(pool.map(lambda a: _sample_chunk(plan, cdfs, mapping, a[1], seed, a[0]), enumerate(sizes)))
    idx, cnt = np.unique(np.concatenate(parts), return_counts=True)
    return SampleReport({int(k): int(c) for k, c in zip(idx, cnt)}, shots, seed)


def dense_reference(plan: CircuitPlan) -> np.ndarray:
    """Exact output distribution: diagonal of ``U P diag(p0) P^T U^dagger``."""
    if len(plan.dims) > DENSE_MAX_QUBITS:
        raise TooLarge(f"dense reference limited to {DENSE_MAX_QUBITS} subsystems")
    q = plan.composed().apply_to_table(plan.p0)
    u = plan.u_final.matrix()
    rho = (u * q) @ dagger(u)
    return np.clip(np.real(np.diag(rho)), 0, None)


def stepwise_dense(plan: CircuitPlan, bases: Sequence[LocalBasis]) -> np.ndarray:
    """Apply ``U_t P_t U_{t-1}^dagger`` one gate at a time (``bases`` holds ``U_0 .. U_s``
    with ``U_s = u_final``) and return the measured distribution."""
    if len(bases) != len(plan.perms) + 1:
        raise ValueError("need one basis per step plus the initial one")
    u0 = bases[0].matrix()
    rho = (u0 * plan.p0) @ dagger(u0)
    for prev, cur, p in zip(bases[:-1], bases[1:], plan.perms):
        g = cur.matrix() @ permutation_matrix(p) @ dagger(prev.matrix())
        rho = g @ rho @ dagger(g)
    return np.clip(np.real(np.diag(rho)), 0, None)


def tvd(p: Sequence[float], q: Sequence[float]) -> float:
    p = np.asarray(p, dtype=float).reshape(-1)
    q = np.asarray(q, dtype=float).reshape(-1)
    if p.shape != q.shape:
        raise ValueError("tables have different index sets")
    return 0.5 * float(np.abs(p - q).sum())


def random_plan(dims: Sequence[int], n_perms: int, seed) -> CircuitPlan:
    """Random table, ``n_perms`` uniform permutations and a Haar product rotation."""
    rng = make_rng(seed)
    d = prod(dims)
    p0 = rng.dirichlet(np.ones(d))
    perms = tuple(random_permutation(d, rng) for _ in range(n_perms))
    return CircuitPlan(p0, perms, LocalBasis.haar(dims, rng))
