"""Dense complex linear algebra on multi-qudit Hilbert spaces.

Conventions used everywhere in the package:

* operators are plain ``numpy`` complex arrays of shape ``(D, D)``;
* a shape is a tuple of per-subsystem dimensions ``dims``;
* subsystem 0 is the most-significant tensor factor, so the basis index of
  ``|k_0 k_1 ... k_{n-1}>`` is ``np.ravel_multi_index(k, dims)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from math import prod
from typing import Iterable, Sequence

import numpy as np

from .errors import NonUnitary

TOL_HERM = 1e-9
TOL_UNIT = 1e-9
TOL_EIG = 1e-8
DEGEN_RTOL = 1e-7

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (PAULI_X, PAULI_Y, PAULI_Z)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def make_rng(seed) -> np.random.Generator:
    """PCG64 generator from an int, a SeedSequence, or an existing Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def kron(*ops: np.ndarray) -> np.ndarray:
    """Tensor product, argument order = subsystem order."""
    if not ops:
        return np.ones((1, 1), dtype=complex)
    return reduce(np.kron, (np.asarray(o, dtype=complex) for o in ops))


def _check_dims(mat: np.ndarray, dims: Sequence[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if mat.shape != (prod(dims), prod(dims)):
        raise ValueError(f"matrix shape {mat.shape} does not match dims {dims}")
    return dims


def partial_trace(rho: np.ndarray, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Trace out every subsystem not in ``keep``.

    Kept subsystems appear in ascending index order in the result.
    """
    dims = _check_dims(rho, dims)
    n = len(dims)
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= n for k in keep):
        raise IndexError(f"keep indices {keep} out of range for {n} subsystems")
    traced = [i for i in range(n) if i not in keep]
    order = keep + traced
    t = rho.reshape(dims + dims).transpose(order + [n + i for i in order])
    dk = prod(dims[i] for i in keep)
    dt = prod(dims[i] for i in traced)
    return np.einsum("ijkj->ik", t.reshape(dk, dt, dk, dt))


def permute_subsystems(op: np.ndarray, dims: Sequence[int], order: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors: subsystem ``i`` of the result is ``order[i]`` of ``op``."""
    dims = _check_dims(op, dims)
    n = len(dims)
    order = list(order)
    if sorted(order) != list(range(n)):
        raise ValueError(f"{order} is not a permutation of {n} subsystems")
    d = prod(dims)
    t = op.reshape(dims + dims).transpose(order + [n + o for o in order])
    return t.reshape(d, d)


def embed(op: np.ndarray, dims: Sequence[int], support: Sequence[int]) -> np.ndarray:
    """Lift ``op`` acting on ``support`` (in the listed order) to the full space."""
    dims = tuple(dims)
    support = list(support)
    rest = [i for i in range(len(dims)) if i not in support]
    layout = support + rest
    full = kron(op, np.eye(prod(dims[i] for i in rest)))
    back = [layout.index(i) for i in range(len(dims))]
    return permute_subsystems(full, [dims[i] for i in layout], back)


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def is_hermitian(h: np.ndarray, tol: float = TOL_HERM) -> bool:
    return bool(np.max(np.abs(h - dagger(h)), initial=0.0) <= tol)


def is_unitary(u: np.ndarray, tol: float = TOL_UNIT) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.max(np.abs(u @ dagger(u) - np.eye(u.shape[0]))) <= tol)


def require_unitary(u: np.ndarray, tol: float = TOL_UNIT, what: str = "matrix") -> None:
    if not is_unitary(u, tol):
        raise NonUnitary(f"{what} is not unitary within {tol:g}")


def eigh(h: np.ndarray, tol: float = TOL_HERM) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvector columns of a Hermitian matrix."""
    h = np.asarray(h, dtype=complex)
    if not is_hermitian(h, tol):
        raise ValueError("eigh requires a Hermitian matrix")
    return np.linalg.eigh((h + dagger(h)) / 2)


def group_degenerate(values: Sequence[float], rtol: float = DEGEN_RTOL) -> list[list[int]]:
    """Group indices whose values agree within ``rtol`` (relative to the largest magnitude).

    Grouping is the transitive closure over sorted neighbours; groups are
    returned sorted by their smallest index.
    """
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return []
    scale = max(float(np.max(np.abs(values))), 1.0)
    order = np.argsort(values, kind="stable")
    groups = [[int(order[0])]]
    for prev, cur in zip(order[:-1], order[1:]):
        if values[cur] - values[prev] <= rtol * scale:
            groups[-1].append(int(cur))
        else:
            groups.append([int(cur)])
    return sorted((sorted(g) for g in groups), key=lambda g: g[0])


def haar_unitary(d: int, rng) -> np.ndarray:
    """Haar-random element of U(d): complex Ginibre matrix, QR, phase-fixed diagonal."""
    rng = make_rng(rng)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


def haar_local_factors(dims: Sequence[int], seed) -> list[np.ndarray]:
    rng = make_rng(seed)
    return [haar_unitary(int(d), rng) for d in dims]


def haar_local_unitary(dims: Sequence[int], seed) -> np.ndarray:
    """Tensor product of independent Haar unitaries, one per subsystem."""
    return kron(*haar_local_factors(dims, seed))


@dataclass(frozen=True)
class Permutation:
    """Bijection on basis indices; its matrix sends ``|i>`` to ``|map[i]>``."""

    map: tuple[int, ...]

    def __post_init__(self):
        m = tuple(int(i) for i in self.map)
        if sorted(m) != list(range(len(m))):
            raise ValueError(f"not a bijection on 0..{len(m) - 1}: {m}")
        object.__setattr__(self, "map", m)

    @classmethod
    def identity(cls, dim: int) -> "Permutation":
        return cls(tuple(range(dim)))

    @classmethod
    def swap(cls, dim: int, a: int, b: int) -> "Permutation":
        m = list(range(dim))
        m[a], m[b] = m[b], m[a]
        return cls(tuple(m))

    @property
    def dim(self) -> int:
        return len(self.map)

    def inverse(self) -> "Permutation":
        inv = [0] * self.dim
        for i, j in enumerate(self.map):
            inv[j] = i
        return Permutation(tuple(inv))

    def then(self, other: "Permutation") -> "Permutation":
        """Apply ``self`` first, then ``other`` (matrix ``other @ self``)."""
        return Permutation(tuple(other.map[j] for j in self.map))

    def apply_to_table(self, table: np.ndarray) -> np.ndarray:
        """Diagonal of ``P diag(table) P^T``."""
        out = np.empty_like(np.asarray(table))
        out[list(self.map)] = table
        return out

    def matrix(self) -> np.ndarray:
        return permutation_matrix(self)


def permutation_matrix(p: Permutation | Sequence[int]) -> np.ndarray:
    if not isinstance(p, Permutation):
        p = Permutation(tuple(p))
    m = np.zeros((p.dim, p.dim), dtype=complex)
    m[list(p.map), np.arange(p.dim)] = 1.0
    return m


def random_permutation(dim: int, seed) -> Permutation:
    # Generator.permutation is a Fisher-Yates shuffle
    return Permutation(tuple(make_rng(seed).permutation(dim).tolist()))


def bloch_projector(n: Sequence[float]) -> np.ndarray:
    """Rank-1 qubit projector ``(I + n.sigma)/2`` for a unit Bloch vector."""
    n = np.asarray(n, dtype=float)
    return (np.eye(2) + sum(c * s for c, s in zip(n, PAULIS))) / 2


def bloch_vector(proj: np.ndarray) -> np.ndarray:
    return np.real([np.trace(proj @ s) for s in PAULIS])


def bloch_basis(n: Sequence[float]) -> np.ndarray:
    """Unitary whose columns are the +1 and -1 eigenvectors of ``n.sigma``.

    ``n`` is first oriented so that its leading nonzero component is positive,
    which makes ``(0, 0, 1)`` map to the identity and ``(1, 0, 0)`` to the
    Hadamard basis (up to column phases).
    """
    n = np.asarray(n, dtype=float)
    n = n / np.linalg.norm(n)
    for c in (n[2], n[0], n[1]):
        if abs(c) > 1e-12:
            if c < 0:
                n = -n
            break
    theta = np.arccos(np.clip(n[2], -1.0, 1.0))
    phi = np.arctan2(n[1], n[0])
    up = np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])
    down = np.array([-np.exp(-1j * phi) * np.sin(theta / 2), np.cos(theta / 2)])
    return np.column_stack([up, down])


def local_commutant_directions(op: np.ndarray, dims: Sequence[int], j: int, tol: float = 1e-9) -> np.ndarray:
    """Bloch vectors ``n`` with ``[I (x) n.sigma (x) I, op] = 0`` on qubit ``j``.

    Returns an orthonormal basis of the real solution space as rows of a
    ``(k, 3)`` array.  For a Hermitian ``op`` the solution set together with
    the identity is a *-subalgebra of M_2, so ``k`` is 0, 1 or 3.  Singular
    values up to ``tol * max(1, ||op||_F)`` count as zero.
    """
    dims = tuple(dims)
    if dims[j] != 2:
        raise ValueError(f"subsystem {j} has dimension {dims[j]}; only qubits are supported")
    cols = []
    for s in PAULIS:
        e = embed(s, dims, [j])
        c = (e @ op - op @ e).reshape(-1)
        cols.append(np.concatenate([c.real, c.imag]))
    a = np.column_stack(cols)
    _, sv, vt = np.linalg.svd(a, full_matrices=False)
    cut = tol * max(1.0, float(np.linalg.norm(op)))
    return vt[sv <= cut]
