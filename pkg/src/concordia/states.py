"""Density matrices, local product bases, concordant states and SBS states."""
from __future__ import annotations

from dataclasses import dataclass, field
from math import prod
from typing import Sequence

import numpy as np

from .errors import NotDiagonalInBasis
from .linalg import TOL_HERM, TOL_UNIT, dagger, haar_local_factors, is_unitary, kron, make_rng, partial_trace

TRACE_TOL = 1e-9
PSD_TOL = 1e-9
DIAG_TOL = 1e-8


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    mat: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        mat = _frozen(self.mat)
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "mat", mat)
        object.__setattr__(self, "dims", dims)
        d = prod(dims)
        if mat.shape != (d, d):
            raise ValueError(f"matrix of shape {mat.shape} does not match dims {dims}")
        if np.max(np.abs(mat - dagger(mat))) > TOL_HERM:
            raise ValueError("density matrix is not Hermitian")
        tr = np.trace(mat).real
        if abs(tr - 1) > TRACE_TOL:
            raise ValueError(f"density matrix has trace {tr!r}")
        # Cholesky of rho + eps*I exists iff the smallest eigenvalue exceeds -eps.
        try:
            np.linalg.cholesky((mat + dagger(mat)) / 2 + PSD_TOL * np.eye(d))
        except np.linalg.LinAlgError:
            raise ValueError("density matrix has a negative eigenvalue") from None

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @property
    def n(self) -> int:
        return len(self.dims)

    def reduced(self, keep) -> "DensityMatrix":
        keep = sorted(set(keep))
        return DensityMatrix(partial_trace(self.mat, self.dims, keep), tuple(self.dims[k] for k in keep))

    def purity(self) -> float:
        return float(np.real(np.trace(self.mat @ self.mat)))

    @classmethod
    def from_vector(cls, psi: Sequence[complex], dims: Sequence[int]) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()), tuple(dims))


@dataclass(frozen=True, eq=False)
class LocalBasis:
    """Product unitary ``U = u_0 (x) u_1 (x) ...``; column ``k`` of ``u_j`` is basis vector ``k`` on subsystem ``j``."""

    units: tuple[np.ndarray, ...]

    def __post_init__(self):
        units = tuple(_frozen(u) for u in self.units)
        for j, u in enumerate(units):
            if u.ndim != 2 or u.shape[0] != u.shape[1] or u.shape[0] < 2:
                raise ValueError(f"factor {j} has bad shape {u.shape}")
            if not is_unitary(u, TOL_UNIT):
                raise ValueError(f"factor {j} is not unitary")
        object.__setattr__(self, "units", units)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(u.shape[0] for u in self.units)

    def matrix(self) -> np.ndarray:
        return kron(*self.units)

    def restrict(self, subsystems: Sequence[int]) -> "LocalBasis":
        return LocalBasis(tuple(self.units[j] for j in subsystems))

    @classmethod
    def identity(cls, dims: Sequence[int]) -> "LocalBasis":
        return cls(tuple(np.eye(d, dtype=complex) for d in dims))

    @classmethod
    def haar(cls, dims: Sequence[int], seed) -> "LocalBasis":
        return cls(tuple(haar_local_factors(dims, seed)))


@dataclass(frozen=True, eq=False)
class ConcordantState:
    """``rho = U diag(probs) U^dagger`` with ``U`` a local product basis.

    ``probs`` is stored densely, flat, in the package's subsystem-0-major order.
    """

    basis: LocalBasis
    probs: np.ndarray

    def __post_init__(self):
        p = np.array(self.probs, dtype=float).reshape(-1)
        if p.size != prod(self.basis.dims):
            raise ValueError(f"{p.size} probabilities for dims {self.basis.dims}")
        if np.any(p < -PSD_TOL):
            raise ValueError("negative probability")
        if abs(p.sum() - 1) > TRACE_TOL:
            raise ValueError(f"probabilities sum to {p.sum()!r}")
        p = np.clip(p, 0.0, None)
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.basis.dims

    @property
    def table(self) -> np.ndarray:
        """Probabilities as an n-dimensional array indexed by ``(k_0, ..., k_{n-1})``."""
        return self.probs.reshape(self.dims)

    @classmethod
    def random(cls, dims: Sequence[int], seed, *, degenerate: bool = False) -> "ConcordantState":
        """Haar local basis with a Dirichlet table; ``degenerate`` quantises the table
        to a few repeated values so that degenerate blocks appear."""
        rng = make_rng(seed)
        basis = LocalBasis.haar(dims, rng)
        d = prod(dims)
        if degenerate:
            levels = rng.integers(0, 3, size=d).astype(float)
            if not levels.any():
                levels[0] = 1.0
            p = levels / levels.sum()
        else:
            p = rng.dirichlet(np.ones(d))
        return cls(basis, p)


def to_density(c: ConcordantState) -> DensityMatrix:
    u = c.basis.matrix()
    return DensityMatrix((u * c.probs) @ dagger(u), c.dims)


def from_density(rho: DensityMatrix, basis: LocalBasis, tol: float = DIAG_TOL) -> ConcordantState:
    """Read off the probability table of ``rho`` in a known product basis.

    Raises :class:`NotDiagonalInBasis` when the Frobenius norm of the
    off-diagonal part of ``U^dagger rho U`` exceeds ``tol``.
    """
    if basis.dims != rho.dims:
        raise ValueError(f"basis dims {basis.dims} != state dims {rho.dims}")
    u = basis.matrix()
    m = dagger(u) @ rho.mat @ u
    diag = np.real(np.diag(m))
    off = np.linalg.norm(m - np.diag(np.diag(m)))
    if off > tol:
        raise NotDiagonalInBasis(f"off-diagonal norm {off:.3e} exceeds {tol:g}")
    return ConcordantState(basis, diag)


@dataclass(frozen=True, eq=False)
class SbsSpec:
    """Spectrum-broadcast-structure recipe.

    ``fragment_states[i][k]`` is the record of pointer state ``i`` held by
    environment fragment ``k``.
    """

    pointer_probs: np.ndarray
    fragment_states: tuple[tuple[np.ndarray, ...], ...]
    system_dim: int | None = field(default=None)

    def __post_init__(self):
        p = np.asarray(self.pointer_probs, dtype=float)
        if np.any(p < 0) or abs(p.sum() - 1) > TRACE_TOL:
            raise ValueError("pointer_probs is not a distribution")
        sd = len(p) if self.system_dim is None else int(self.system_dim)
        if sd < len(p):
            raise ValueError("system_dim smaller than number of pointer states")
        frags = tuple(tuple(np.asarray(r, dtype=complex) for r in rec) for rec in self.fragment_states)
        if len(frags) != len(p):
            raise ValueError("need one record tuple per pointer state")
        shapes = {tuple(r.shape[0] for r in rec) for rec in frags}
        if len(shapes) != 1:
            raise ValueError("fragment dimensions differ between pointer states")
        for rec in frags:
            for r in rec:
                DensityMatrix(r, (r.shape[0],))
        object.__setattr__(self, "pointer_probs", p)
        object.__setattr__(self, "system_dim", sd)
        object.__setattr__(self, "fragment_states", frags)

    @property
    def dims(self) -> tuple[int, ...]:
        return (self.system_dim,) + tuple(r.shape[0] for r in self.fragment_states[0])

    @classmethod
    def orthogonal_records(cls, pointer_probs: Sequence[float], n_fragments: int) -> "SbsSpec":
        """Perfect records: fragment ``k`` of branch ``i`` holds ``|i><i|``."""
        p = np.asarray(pointer_probs, dtype=float)
        d = len(p)
        recs = []
        for i in range(d):
            ket = np.zeros((d, d), dtype=complex)
            ket[i, i] = 1
            recs.append(tuple(ket for _ in range(n_fragments)))
        return cls(p, tuple(recs))


def build_sbs(spec: SbsSpec) -> DensityMatrix:
    d = spec.system_dim
    total = None
    for i, (p, rec) in enumerate(zip(spec.pointer_probs, spec.fragment_states)):
        proj = np.zeros((d, d), dtype=complex)
        proj[i, i] = 1
        term = p * kron(proj, *rec)
        total = term if total is None else total + term
    return DensityMatrix(total, spec.dims)
