"""BB84 with mixed signal states ``p1 |b><b| + p2 |1-b><1-b|`` in the
computational (basis 0) or Hadamard (basis 1) frame, and intercept-resend
disturbance."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..linalg import HADAMARD, make_rng
from ..states import ConcordantState, LocalBasis

STRATEGIES = ("random", "oracle", "computational", "hadamard")


@dataclass(frozen=True, eq=False)
class ChannelRun:
    bits: np.ndarray
    bases: np.ndarray
    p1: float

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=np.int8).reshape(-1)
        bases = np.asarray(self.bases, dtype=np.int8).reshape(-1)
        if bits.shape != bases.shape:
            raise ValueError("bits and bases differ in length")
        if not (np.isin(bits, (0, 1)).all() and np.isin(bases, (0, 1)).all()):
            raise ValueError("bits and bases must be 0/1")
        if not 0.5 < self.p1 <= 1:
            raise ValueError("p1 must lie in (1/2, 1]")
        object.__setattr__(self, "bits", bits)
        object.__setattr__(self, "bases", bases)

    @property
    def p2(self) -> float:
        return 1.0 - self.p1

    def __len__(self) -> int:
        return self.bits.size


def random_round(n: int, p1: float, seed) -> ChannelRun:
    rng = make_rng(seed)
    return ChannelRun(rng.integers(0, 2, n), rng.integers(0, 2, n), p1)


def noisy_bb84_round(bits: Sequence[int], bases: Sequence[int], p1: float) -> ConcordantState:
    """Joint product state of one round; small ``n`` only (the table is dense)."""
    run = ChannelRun(bits, bases, p1)
    units = tuple(HADAMARD if b else np.eye(2, dtype=complex) for b in run.bases)
    table = np.ones(1)
    for bit in run.bits:
        q = np.array([p1, 1 - p1]) if bit == 0 else np.array([1 - p1, p1])
        table = np.kron(table, q)
    return ConcordantState(LocalBasis(units), table)


def _measure(rng, signal_bit, signal_basis, purity, meas_basis):
    """Outcome of measuring ``purity |b><b| + (1-purity) |1-b><1-b|`` (basis ``signal_basis``) in ``meas_basis``."""
    p_same = np.where(signal_basis == meas_basis, purity, 0.5)
    keep = rng.random(signal_bit.size) < p_same
    return np.where(keep, signal_bit, 1 - signal_bit).astype(np.int8)


def eve_intercept_resend(run: ChannelRun, strategy: str = "random", seed=0,
                         fraction: float = 1.0) -> tuple[np.ndarray, float]:
    """Eve measures a ``fraction`` of the rounds and resends her outcome as a pure state.

    Bob measures every round in a random basis; rounds where his basis matches
    Alice's form the sifted key.  Returns Eve's 2x2 table of
    ``(Alice bit, Eve bit)`` frequencies over attacked sifted rounds, and the
    sifted error rate.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"strategy must be one of {STRATEGIES}")
    if not 0 <= fraction <= 1:
        raise ValueError("fraction must lie in [0, 1]")
    rng = make_rng(seed)
    n = len(run)
    bob_bases = rng.integers(0, 2, n).astype(np.int8)
    attacked = rng.random(n) < fraction
    eve_bases = {
        "random": rng.integers(0, 2, n).astype(np.int8),
        "oracle": run.bases,
        "computational": np.zeros(n, dtype=np.int8),
        "hadamard": np.ones(n, dtype=np.int8),
    }[strategy]
    eve_bits = _measure(rng, run.bits, run.bases, run.p1, eve_bases)
    # what reaches Bob: Alice's mixed signal, or Eve's pure resend
    sig_bit = np.where(attacked, eve_bits, run.bits)
    sig_basis = np.where(attacked, eve_bases, run.bases)
    sig_purity = np.where(attacked, 1.0, run.p1)
    bob_bits = _measure(rng, sig_bit, sig_basis, sig_purity, bob_bases)
    sifted = bob_bases == run.bases
    if not sifted.any():
        raise ValueError("no sifted rounds")
    error = float(np.mean(bob_bits[sifted] != run.bits[sifted]))
    table = np.zeros((2, 2))
    mask = sifted & attacked
    np.add.at(table, (run.bits[mask], eve_bits[mask]), 1)
    if mask.any():
        table /= mask.sum()
    return table, error


def channel_error(run: ChannelRun, seed=0) -> float:
    """Sifted error rate with no eavesdropper."""
    return eve_intercept_resend(run, "random", seed, fraction=0.0)[1]
