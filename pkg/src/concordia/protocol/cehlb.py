"""Encryption with hidden local bases: a classical table rides a concordant
state through gates ``U_i P_i U_{i-1}^dagger`` whose local frames stay secret.

Only the bases ``U_0 .. U_t`` are key material.  The public transcript lists
each gate with a decoy unitary ``B_i`` folded in; ``B_i`` mixes only indices
on which the current diagonal table is constant, so it changes nothing.
"""
from __future__ import annotations

import hashlib
import json
import warnings
from dataclasses import dataclass
from math import prod
from typing import Sequence

import numpy as np

from ..errors import TranscriptMismatch
from ..gates import BlockStructure, block_structure_from_table, random_block_unitary
from ..io import matrix_from_json, matrix_to_json
from ..linalg import Permutation, dagger, make_rng, permutation_matrix, random_permutation, require_unitary
from ..states import DensityMatrix, LocalBasis

DIAG_TOL = 1e-8
PATTERN_TOL = 1e-8
G1_FORMS = ("full", "bare")
# 1st percentile of 100-trial median TVDs from scripts/eve_baseline.py
# (3 qubits, t = 6, demo table); raw numbers in scripts/results/eve_baseline.json
EVE_TVD_FLOOR = 0.36

DEMO_TABLE_3 = (0.3, 0.3, 0.1, 0.1, 0.1, 0.05, 0.05, 0.0)


def demo_table(n_qubits: int) -> np.ndarray:
    """A message with repeated values, so the decoys have blocks to act on."""
    if n_qubits == 3:
        return np.array(DEMO_TABLE_3)
    d = 2 ** n_qubits
    w = np.array([(d - k) // 2 + 1 for k in range(d)], dtype=float)
    return w / w.sum()


@dataclass(frozen=True, eq=False)
class SecretKey:
    units: tuple[LocalBasis, ...]   # U_0, U_1, ..., U_t

    def __post_init__(self):
        if len(self.units) < 2:
            raise ValueError("a key needs U_0 and at least one step")
        if len({u.dims for u in self.units}) != 1:
            raise ValueError("key bases act on different shapes")
        object.__setattr__(self, "units", tuple(self.units))

    @property
    def t(self) -> int:
        return len(self.units) - 1

    @property
    def dims(self) -> tuple[int, ...]:
        return self.units[0].dims

    def matrices(self) -> list[np.ndarray]:
        return [u.matrix() for u in self.units]

    def to_json(self) -> dict:
        return {"units": [[matrix_to_json(f) for f in u.units] for u in self.units]}

    @classmethod
    def from_json(cls, d: dict) -> "SecretKey":
        return cls(tuple(LocalBasis(tuple(matrix_from_json(f) for f in u)) for u in d["units"]))


@dataclass(frozen=True, eq=False)
class PublicTranscript:
    """``first`` is ``G'_1 = U_1 P_1 B_1 U_0^dagger`` (``g1_form="full"``) or
    ``U_1 P_1 B_1`` (``g1_form="bare"``, which leaks the table; see
    :func:`eve_quantum_attack`).  ``rest`` holds ``G'_2 .. G'_t``."""

    first: np.ndarray
    rest: tuple[np.ndarray, ...]
    dims: tuple[int, ...]
    g1_form: str = "full"

    def __post_init__(self):
        if self.g1_form not in G1_FORMS:
            raise ValueError(f"g1_form must be one of {G1_FORMS}")
        d = prod(self.dims)
        mats = []
        for m in (self.first, *self.rest):
            m = np.array(m, dtype=complex)
            if m.shape != (d, d):
                raise ValueError("transcript gate has wrong shape")
            require_unitary(m, what="transcript gate")
            m.setflags(write=False)
            mats.append(m)
        object.__setattr__(self, "first", mats[0])
        object.__setattr__(self, "rest", tuple(mats[1:]))
        object.__setattr__(self, "dims", tuple(self.dims))

    @property
    def t(self) -> int:
        return 1 + len(self.rest)

    def gates(self) -> list[np.ndarray]:
        return [self.first, *self.rest]

    def to_json(self) -> dict:
        return {"dims": list(self.dims), "g1": matrix_to_json(self.first),
                "gprime": [matrix_to_json(m) for m in self.rest], "g1_form": self.g1_form}

    @classmethod
    def from_json(cls, d: dict) -> "PublicTranscript":
        return cls(matrix_from_json(d["g1"]), tuple(matrix_from_json(m) for m in d["gprime"]),
                   tuple(d["dims"]), d.get("g1_form", "full"))

    def digest(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()


@dataclass(frozen=True, eq=False)
class Message:
    table: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        t = np.array(self.table, dtype=float).reshape(-1)
        if t.size != prod(self.dims):
            raise ValueError("table size does not match dims")
        if np.any(t < -1e-12) or abs(t.sum() - 1) > 1e-9:
            raise ValueError("message table is not a probability distribution")
        t = np.clip(t, 0, None)
        t.setflags(write=False)
        object.__setattr__(self, "table", t)
        object.__setattr__(self, "dims", tuple(self.dims))


@dataclass(frozen=True, eq=False)
class StepAudit:
    perm: Permutation
    block: np.ndarray
    blocks: BlockStructure


@dataclass(frozen=True, eq=False)
class RunRecord:
    rho_t: DensityMatrix
    transcript: PublicTranscript
    hidden: tuple[StepAudit, ...]
    states: tuple[DensityMatrix, ...]   # rho_0 .. rho_t, kept for audits
    tables: tuple[np.ndarray, ...]      # D_0 .. D_t in the running frames


def keygen(dims: Sequence[int], t: int, seed) -> SecretKey:
    if t < 1:
        raise ValueError("t must be >= 1")
    rng = make_rng(seed)
    return SecretKey(tuple(LocalBasis.haar(dims, rng) for _ in range(t + 1)))


def _conj(u: np.ndarray, rho: np.ndarray) -> np.ndarray:
    out = u @ rho @ dagger(u)
    return (out + dagger(out)) / 2


def alice_encode(msg: Message, key: SecretKey, perm_seed, block_seed, *, decoy_first: bool = False,
                 g1_form: str = "full") -> RunRecord:
    """Evolve the message state with the true gates and build the public transcript."""
    if key.dims != msg.dims:
        raise ValueError("key and message shapes differ")
    if g1_form not in G1_FORMS:
        raise ValueError(f"g1_form must be one of {G1_FORMS}")
    prng, brng = make_rng(perm_seed), make_rng(block_seed)
    us = key.matrices()
    d = msg.table.size
    table = msg.table.copy()
    rho = _conj(us[0], np.diag(table).astype(complex))
    states, tables, hidden, public = [rho], [table], [], []
    for i in range(1, key.t + 1):
        perm = random_permutation(d, prng)
        bs = block_structure_from_table(table, msg.dims)
        if i == 1 and not decoy_first:
            block = np.eye(d, dtype=complex)
        else:
            block = random_block_unitary(bs, brng)
        pm = permutation_matrix(perm)
        rho = _conj(us[i] @ pm @ dagger(us[i - 1]), rho)
        table = perm.apply_to_table(table)
        public.append(us[i] @ pm @ block @ dagger(us[i - 1]))
        hidden.append(StepAudit(perm, block, bs))
        states.append(rho)
        tables.append(table)
    if all(len(b) == 1 for b in hidden[0].blocks.partition):
        warnings.warn("message table has no repeated values; decoys reduce to phases", stacklevel=2)
    if g1_form == "bare":
        public[0] = public[0] @ us[0]
    transcript = PublicTranscript(public[0], tuple(public[1:]), msg.dims, g1_form)
    dms = tuple(DensityMatrix(s, msg.dims) for s in states)
    return RunRecord(dms[-1], transcript, tuple(hidden), dms, tuple(tables))


def _check_shapes(key: SecretKey, transcript: PublicTranscript):
    if key.dims != transcript.dims or key.t != transcript.t:
        raise TranscriptMismatch("transcript and key disagree on shape or step count")


def step_maps(key: SecretKey, transcript: PublicTranscript) -> list[np.ndarray]:
    """``M_i = U_i^dagger G'_i U_{i-1}``, each ``P_i B_i`` for an honest transcript."""
    _check_shapes(key, transcript)
    us = key.matrices()
    gates = transcript.gates()
    out = []
    for i, g in enumerate(gates, start=1):
        if i == 1 and transcript.g1_form == "bare":
            out.append(dagger(us[1]) @ g)
        else:
            out.append(dagger(us[i]) @ g @ us[i - 1])
    return out


def bob_decode_coherent(rho_t: DensityMatrix, key: SecretKey, transcript: PublicTranscript,
                        check: bool = True) -> DensityMatrix:
    """Undo each step inside its own frame; every intermediate must stay diagonal."""
    us = key.matrices()
    maps = step_maps(key, transcript)
    sigma = dagger(us[-1]) @ rho_t.mat @ us[-1]
    for i in range(len(maps), 0, -1):
        if check:
            off = np.linalg.norm(sigma - np.diag(np.diag(sigma)))
            if off > DIAG_TOL:
                raise TranscriptMismatch(f"state is not diagonal in frame {i} (off-diagonal norm {off:.2e})")
        sigma = _conj(dagger(maps[i - 1]), sigma)
    if check:
        off = np.linalg.norm(sigma - np.diag(np.diag(sigma)))
        if off > DIAG_TOL:
            raise TranscriptMismatch(f"recovered state is not diagonal (off-diagonal norm {off:.2e})")
    return DensityMatrix(_conj(us[0], sigma), rho_t.dims)


def _components(pattern: np.ndarray) -> list[np.ndarray]:
    """Row sets of the connected components of a bipartite nonzero pattern."""
    d = pattern.shape[0]
    seen = np.zeros(d, dtype=bool)
    out = []
    for start in range(d):
        if seen[start]:
            continue
        rows = np.zeros(d, dtype=bool)
        rows[start] = True
        while True:
            cols = pattern[rows].any(axis=0)
            grown = pattern[:, cols].any(axis=1) | rows
            if (grown == rows).all():
                break
            rows = grown
        seen |= rows
        out.append(np.nonzero(rows)[0])
    return out


def bob_decode_measure(rho_t: DensityMatrix, key: SecretKey, transcript: PublicTranscript, shots: int,
                       seed, stat_sigmas: float = 8.0) -> np.ndarray:
    """Estimate the message table from ``shots`` measurements in the ``U_t`` frame.

    Each step's diagonal action is the doubly-stochastic ``|M_i|^2``; its
    transpose undoes ``P_i`` exactly and averages inside decoy blocks, where
    the table is constant anyway.  A component of ``M_i`` spanning unequal
    table entries (beyond ``stat_sigmas`` sampling errors) means the
    transcript was tampered with.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    us = key.matrices()
    maps = step_maps(key, transcript)
    probs = np.clip(np.real(np.diag(dagger(us[-1]) @ rho_t.mat @ us[-1])), 0, None)
    rng = make_rng(seed)
    est = rng.multinomial(shots, probs / probs.sum()) / shots
    tol = stat_sigmas * 0.5 * np.sqrt(2.0 / shots)
    for i in range(len(maps), 0, -1):
        m = maps[i - 1]
        for rows in _components(np.abs(m) > PATTERN_TOL):
            vals = est[rows]
            if vals.max() - vals.min() > tol:
                raise TranscriptMismatch(f"step {i} mixes unequal table entries {sorted(rows.tolist())}")
        est = (np.abs(m) ** 2).T @ est
    return est


def eve_quantum_attack(rho_t: DensityMatrix, transcript: PublicTranscript) -> DensityMatrix:
    """Run the public gates backwards, treating the first entry as a full gate.

    With the full first gate Eve lands on ``U_0 D_0 U_0^dagger``, still hidden
    by ``U_0``.  With the bare form she lands on ``D_0`` itself.
    """
    rho = rho_t.mat
    for g in reversed(transcript.gates()):
        rho = _conj(dagger(g), rho)
    return DensityMatrix(rho, rho_t.dims)


def computational_distribution(rho: DensityMatrix) -> np.ndarray:
    return np.clip(np.real(np.diag(rho.mat)), 0, None)


def coherent_target(msg: Message, key: SecretKey) -> np.ndarray:
    u0 = key.units[0].matrix()
    return _conj(u0, np.diag(msg.table).astype(complex))


def trace_distance(a, b) -> float:
    a = a.mat if isinstance(a, DensityMatrix) else np.asarray(a)
    b = b.mat if isinstance(b, DensityMatrix) else np.asarray(b)
    return 0.5 * float(np.abs(np.linalg.eigvalsh((a - b + dagger(a - b)) / 2)).sum())


def transcript_equivalence(record: RunRecord) -> list[float]:
    """Frobenius gap between ``G'_i rho_{i-1} G'_i^dagger`` and ``rho_i`` for each step."""
    out = []
    for i, g in enumerate(record.transcript.gates(), start=1):
        out.append(float(np.linalg.norm(_conj(g, record.states[i - 1].mat) - record.states[i].mat)))
    return out


def with_trivial_first(key: SecretKey) -> SecretKey:
    """Same key with ``U_0 = I`` (the degenerate choice that exposes the table)."""
    return SecretKey((LocalBasis.identity(key.dims),) + key.units[1:])


def recovered_table(rho_in: DensityMatrix, key: SecretKey) -> np.ndarray:
    """Message table as read out in the key's ``U_0`` frame."""
    u0 = key.units[0].matrix()
    return np.clip(np.real(np.diag(dagger(u0) @ rho_in.mat @ u0)), 0, None)


def session(msg: Message, t: int, seed, **encode_kw) -> tuple[SecretKey, RunRecord]:
    """Key and encoded run from one seed (independent streams for key, permutations, decoys)."""
    ks, ps, bs = np.random.SeedSequence(seed).spawn(3)
    key = keygen(msg.dims, t, ks)
    return key, alice_encode(msg, key, ps, bs, **encode_kw)
