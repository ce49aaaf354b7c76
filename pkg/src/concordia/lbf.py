"""Local Basis Finder: recover the post-gate local product basis from how a gate
acts on computational-basis projectors, or classify why it cannot."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from math import prod
from typing import Sequence

import numpy as np

from .io import local_basis_to_json
from .linalg import (HADAMARD, Permutation, bloch_basis, dagger, kron, local_commutant_directions, partial_trace,
                     permutation_matrix)
from .states import LocalBasis

NULL_TOL = 1e-9
ANGLE_TOL = 1e-6
DIAG_TOL = 1e-8


class Status(str, Enum):
    SUCCESS = "Success"
    AMBIGUOUS = "Ambiguous"
    INCOMPATIBLE = "Incompatible"


@dataclass(frozen=True)
class SolutionSet:
    """Rank-1 projectors on one qubit commuting with a transformed projector.

    ``kind`` is ``"unique"`` (one orthonormal basis, given by Bloch vector
    ``axis`` up to sign), ``"all"`` (unconstrained), ``"continuum"`` (a
    solution manifold of intermediate dimension) or ``"empty"``.
    """

    kind: str
    axis: tuple[float, float, float] | None = None

    def basis(self) -> np.ndarray:
        if self.kind != "unique":
            raise ValueError(f"{self.kind} solution set has no unique basis")
        return bloch_basis(self.axis)

    def projectors(self) -> list[np.ndarray]:
        u = self.basis()
        return [np.outer(u[:, k], u[:, k].conj()) for k in range(2)]

    def as_dict(self) -> dict:
        out = {"kind": self.kind}
        if self.axis is not None:
            out["axis"] = list(self.axis)
        return out


def same_basis(a: Sequence[float], b: Sequence[float], tol: float = ANGLE_TOL) -> bool:
    """Bloch axes ``a``, ``b`` define the same projector pair (sign ignored)."""
    return float(np.linalg.norm(np.cross(a, b))) <= tol and abs(float(np.dot(a, b))) > 0.5


@dataclass(frozen=True)
class ProjectorFamily:
    """Computational-basis projectors on the gate support, each a set of basis indices."""

    dims: tuple[int, ...]
    members: tuple[frozenset[int], ...]

    def __post_init__(self):
        members = tuple(frozenset(int(i) for i in m) for m in self.members)
        if len(set(members)) != len(members):
            raise ValueError("family members must be distinct")
        d = prod(self.dims)
        if any(not m or max(m) >= d or min(m) < 0 for m in members):
            raise ValueError("member outside the support's basis range")
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "dims", tuple(self.dims))

    @classmethod
    def rank1(cls, dims: Sequence[int]) -> "ProjectorFamily":
        return cls(tuple(dims), tuple(frozenset([k]) for k in range(prod(dims))))

    @classmethod
    def all_ranks(cls, dims: Sequence[int], max_rank: int | None = None) -> "ProjectorFamily":
        d = prod(dims)
        top = d if max_rank is None else max_rank
        members = [frozenset(c) for r in range(1, top + 1) for c in combinations(range(d), r)]
        return cls(tuple(dims), tuple(members))

    def matrix(self, member: frozenset[int]) -> np.ndarray:
        d = prod(self.dims)
        x = np.zeros((d, d), dtype=complex)
        idx = sorted(member)
        x[idx, idx] = 1
        return x


def transform_projector(g: np.ndarray, l_prev, x: np.ndarray) -> np.ndarray:
    """``G L X L^dagger G^dagger``."""
    lm = l_prev.matrix() if isinstance(l_prev, LocalBasis) else np.asarray(l_prev, dtype=complex)
    m = np.asarray(g, dtype=complex) @ lm
    out = m @ x @ dagger(m)
    return (out + dagger(out)) / 2


def commutant_rank1_solutions(x_tilde: np.ndarray, qubit: int, dims: Sequence[int],
                              tol: float = NULL_TOL) -> SolutionSet:
    """Solve ``[I (x) rho_j (x) I, x_tilde] = 0`` for rank-1 qubit projectors ``rho_j``.

    Writing ``rho_j = (I + n.sigma)/2`` turns the condition into a real linear
    system in ``n``; its null-space dimension classifies the solution set.
    """
    dirs = local_commutant_directions(x_tilde, dims, qubit, tol)
    k = len(dirs)
    if k == 0:
        return SolutionSet("empty")
    if k == 3:
        return SolutionSet("all")
    if k == 2:
        return SolutionSet("continuum")
    n = dirs[0] / np.linalg.norm(dirs[0])
    for c in (n[2], n[0], n[1]):
        if abs(c) > 1e-12:
            n = n if c > 0 else -n
            break
    return SolutionSet("unique", tuple(float(v) for v in n))


@dataclass(frozen=True)
class MemberReport:
    member: tuple[int, ...]
    per_qubit: tuple[SolutionSet, ...]

    def as_dict(self) -> dict:
        return {"member": list(self.member), "per_qubit": [s.as_dict() for s in self.per_qubit]}


@dataclass(frozen=True, eq=False)
class LbfOutcome:
    status: Status
    basis: LocalBasis | None
    report: tuple[MemberReport, ...]
    reason: str = ""
    axes: tuple = field(default=())

    def as_dict(self) -> dict:
        return {
            "status": self.status.value,
            "reason": self.reason,
            "basis": None if self.basis is None else local_basis_to_json(self.basis),
            "per_projector_report": [r.as_dict() for r in self.report],
        }


def _evaluate(g, l_prev, family, members, dims):
    reports, tildes = [], []
    for m in members:
        xt = transform_projector(g, l_prev, family.matrix(m))
        tildes.append(xt)
        reports.append(MemberReport(tuple(sorted(m)),
                                    tuple(commutant_rank1_solutions(xt, j, dims) for j in range(len(dims)))))
    return reports, tildes


def _collect(reports, axes, undecided):
    """Fold unique per-qubit solutions into ``axes``; return the first conflict, if any."""
    for rep in reports:
        for j in undecided:
            sol = rep.per_qubit[j]
            if sol.kind != "unique":
                continue
            if axes[j] is None:
                axes[j] = sol.axis
            elif not same_basis(axes[j], sol.axis):
                return j, rep.member
    return None


def run_lbf(g: np.ndarray, l_prev: LocalBasis, family: ProjectorFamily | None = None) -> LbfOutcome:
    """Find the unique local qubit basis compatible with every transformed projector.

    Rank-1 members are processed first; higher-rank members are consulted only
    for qubits the rank-1 members left undetermined.  ``Success`` is returned
    only after checking that the basis diagonalises every evaluated projector.
    """
    dims = l_prev.dims
    if any(d != 2 for d in dims):
        raise ValueError("the commutant solver supports qubit supports only")
    family = family or ProjectorFamily.rank1(dims)
    g = np.asarray(g, dtype=complex)
    rank1 = [m for m in family.members if len(m) == 1]
    higher = [m for m in family.members if len(m) > 1]
    n = len(dims)
    axes = [None] * n

    reports, tildes = _evaluate(g, l_prev, family, rank1, dims)
    clash = _collect(reports, axes, range(n))
    if clash is None and higher and any(a is None for a in axes):
        more, more_t = _evaluate(g, l_prev, family, higher, dims)
        reports += more
        tildes += more_t
        clash = _collect(more, axes, [j for j in range(n) if axes[j] is None])
    report = tuple(reports)
    if clash is not None:
        j, member = clash
        return LbfOutcome(Status.INCOMPATIBLE, None, report,
                          f"qubit {j}: projector {list(member)} forces a basis incompatible with earlier members",
                          tuple(axes))
    missing = [j for j in range(n) if axes[j] is None]
    if missing:
        return LbfOutcome(Status.AMBIGUOUS, None, report, f"no unique basis on qubits {missing}", tuple(axes))
    basis = LocalBasis(tuple(bloch_basis(a) for a in axes))
    lm = basis.matrix()
    for rep, xt in zip(report, tildes):
        m = dagger(lm) @ xt @ lm
        if np.linalg.norm(m - np.diag(np.diag(m))) > DIAG_TOL:
            return LbfOutcome(Status.INCOMPATIBLE, None, report,
                              f"candidate basis does not diagonalise projector {list(rep.member)}", tuple(axes))
    return LbfOutcome(Status.SUCCESS, basis, report, "", tuple(axes))


def rz(phi: float) -> np.ndarray:
    return np.diag([np.exp(-1j * phi / 2), np.exp(1j * phi / 2)])


def appendix_b_gate(theta: float) -> np.ndarray:
    """Two-qubit ``V P B(theta)`` with ``V = Rz(pi/4) (x) H``, ``P`` swapping |10>,|11>,
    and ``B`` a rotation by ``theta`` inside span{|10>, |11>}."""
    c, s = np.cos(theta), np.sin(theta)
    b = np.eye(4, dtype=complex)
    b[2:, 2:] = [[c, -s], [s, c]]
    p = permutation_matrix(Permutation.swap(4, 2, 3))
    v = kron(rz(np.pi / 4), HADAMARD)
    return v @ p @ b


def reduced_on(x: np.ndarray, dims: Sequence[int], qubit: int) -> np.ndarray:
    """Normalised single-qubit marginal of a (possibly higher-rank) projector."""
    r = partial_trace(x, dims, [qubit])
    return r / np.trace(r)

