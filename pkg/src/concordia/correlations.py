"""Entropic correlation measures, Schmidt-rank entanglement and concordance checks.

All entropies are in bits.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import prod
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .errors import NotDiagonalInBasis, TooLarge
from .linalg import PAULIS, bloch_basis, local_commutant_directions, permute_subsystems
from .states import DensityMatrix, LocalBasis, from_density

EIG_FLOOR = 1e-12
VERIFY_MAX_QUBITS = 8


def _as_matrix(rho) -> np.ndarray:
    return rho.mat if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)


def _entropy_of_spectrum(evals: np.ndarray) -> float:
    evals = evals[evals > EIG_FLOOR]
    return float(-np.sum(evals * np.log2(evals)))


def von_neumann_entropy(rho) -> float:
    """``-Tr rho log2 rho`` with eigenvalues below 1e-12 dropped (0 log 0 = 0)."""
    m = _as_matrix(rho)
    return max(_entropy_of_spectrum(np.linalg.eigvalsh((m + m.conj().T) / 2)), 0.0)


def mutual_information(rho: DensityMatrix, cut: Sequence[int]) -> float:
    """``S(A) + S(B) - S(AB)`` with ``A = cut`` and ``B`` its complement."""
    a = sorted(set(cut))
    b = [i for i in range(rho.n) if i not in a]
    if not a or not b:
        raise ValueError("bipartition needs both sides nonempty")
    return (von_neumann_entropy(rho.reduced(a)) + von_neumann_entropy(rho.reduced(b))
            - von_neumann_entropy(rho))


@dataclass(frozen=True)
class OptimizerConfig:
    """Search over rank-1 projective qubit measurements.

    A ``n_theta x n_phi`` Bloch-sphere grid is scanned, then the ``n_starts``
    best grid points seed Nelder-Mead refinements.
    """

    n_theta: int = 64
    n_phi: int = 128
    refine: bool = True
    n_starts: int = 4
    xatol: float = 1e-7
    fatol: float = 1e-12


@dataclass(frozen=True)
class DiscordResult:
    mutual_info: float
    classical_corr: float
    discord: float
    measured: int
    optimal_measurement: tuple[float, float]  # Bloch angles (theta, phi)

    def as_dict(self) -> dict:
        theta, phi = self.optimal_measurement
        return {
            "mutual_info": self.mutual_info,
            "classical_corr": self.classical_corr,
            "discord": self.discord,
            "measured": self.measured,
            "optimal_measurement": {"theta": theta, "phi": phi},
        }


def _bloch(theta, phi) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    return np.stack([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)], axis=-1)


class _ConditionalEntropy:
    """Average post-measurement entropy of the unmeasured side, vectorised over Bloch vectors."""

    def __init__(self, rho: DensityMatrix, measured: int):
        if rho.dims[measured] != 2:
            raise ValueError(
                f"measured subsystem has dimension {rho.dims[measured]}; the optimizer supports qubits only")
        order = [measured] + [i for i in range(rho.n) if i != measured]
        dims = [rho.dims[i] for i in order]
        m = permute_subsystems(rho.mat, rho.dims, order)
        db = prod(dims[1:])
        t = m.reshape(2, db, 2, db)
        self.rho_b = np.einsum("axay->xy", t)
        # Tr_A[(sigma_k (x) I) rho] for the three Pauli matrices
        self.r = np.stack([np.einsum("ab,bxay->xy", s, t) for s in PAULIS])

    def __call__(self, n: np.ndarray) -> np.ndarray:
        n = np.atleast_2d(n)
        shift = np.einsum("gk,kxy->gxy", n, self.r)
        total = np.zeros(n.shape[0])
        for sign in (1.0, -1.0):
            branch = (self.rho_b[None] + sign * shift) / 2
            lam = np.linalg.eigvalsh(branch)
            lam = np.where(lam > EIG_FLOOR, lam, 0.0)
            p = lam.sum(axis=1)
            with np.errstate(divide="ignore", invalid="ignore"):
                s_un = -np.sum(np.where(lam > 0, lam * np.log2(np.where(lam > 0, lam, 1.0)), 0.0), axis=1)
                plogp = np.where(p > 0, p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
            # p * S(branch / p) = S_unnormalised + p log p
            total += s_un + plogp
        return total


def classical_correlation(rho: DensityMatrix, measured: int, opt: OptimizerConfig | None = None
                          ) -> tuple[float, tuple[float, float]]:
    """Classical correlation ``J`` when qubit ``measured`` is measured projectively.

    Returns ``(J, (theta, phi))`` where the angles give the Bloch direction of
    the optimal measurement.  Grid ties resolve to the lexicographically
    smallest ``(theta, phi)``.
    """
    opt = opt or OptimizerConfig()
    cond = _ConditionalEntropy(rho, measured)
    thetas = np.linspace(0.0, np.pi, opt.n_theta)
    phis = np.arange(opt.n_phi) * (2 * np.pi / opt.n_phi)
    tt, pp = np.meshgrid(thetas, phis, indexing="ij")
    tt, pp = tt.ravel(), pp.ravel()
    vals = cond(_bloch(tt, pp))
    best_idx = int(np.argmin(vals))
    best = (float(vals[best_idx]), float(tt[best_idx]), float(pp[best_idx]))
    if opt.refine:
        starts = np.argsort(vals, kind="stable")[: opt.n_starts]
        for idx in starts:
            res = minimize(lambda x: float(cond(_bloch(x[0], x[1]))[0]), x0=[tt[idx], pp[idx]],
                           method="Nelder-Mead", options={"xatol": opt.xatol, "fatol": opt.fatol, "maxiter": 4000})
            if res.fun < best[0] - 1e-15:
                best = (float(res.fun), float(res.x[0]), float(res.x[1]))
    h_cond, theta, phi = best
    # canonical angle range: theta in [0, pi], phi in [0, 2 pi)
    n = _bloch(theta, phi)
    theta = float(np.arccos(np.clip(n[2], -1, 1)))
    phi = float(np.arctan2(n[1], n[0]) % (2 * np.pi))
    s_b = von_neumann_entropy(cond.rho_b)
    return s_b - h_cond, (theta, phi)


def discord(rho: DensityMatrix, measured: int, opt: OptimizerConfig | None = None) -> DiscordResult:
    """Mutual information minus classical correlation, measuring qubit ``measured``."""
    mi = mutual_information(rho, [measured])
    j, angles = classical_correlation(rho, measured, opt)
    return DiscordResult(mutual_info=mi, classical_corr=j, discord=mi - j, measured=measured,
                         optimal_measurement=angles)


def verify_concordant(rho: DensityMatrix, tol: float = 1e-9, diag_tol: float = 1e-8) -> LocalBasis | None:
    """Find a local product basis diagonalising ``rho``, or return ``None``.

    A qubit state is diagonal in ``u_0 (x) ... (x) u_{n-1}`` exactly when it
    commutes with every embedded ``u_j Z u_j^dagger``; each qubit's condition
    is a 3-variable linear system.  The candidate basis is then certified by
    :func:`from_density`.  Work is dense in ``2**n`` so runtime is exponential
    in the qubit count; refused above 8 qubits.
    """
    if rho.n > VERIFY_MAX_QUBITS:
        raise TooLarge(f"verify_concordant limited to {VERIFY_MAX_QUBITS} qubits, got {rho.n}")
    if any(d != 2 for d in rho.dims):
        raise ValueError("verify_concordant supports qubit systems only")
    units = []
    for j in range(rho.n):
        dirs = local_commutant_directions(rho.mat, rho.dims, j, tol)
        if len(dirs) == 0:
            return None
        units.append(bloch_basis(dirs[0]) if len(dirs) < 3 else np.eye(2, dtype=complex))
    basis = LocalBasis(tuple(units))
    try:
        from_density(rho, basis, diag_tol)
    except NotDiagonalInBasis:
        return None
    return basis


def schmidt_measure(psi: Sequence[complex], dims: Sequence[int], tol: float = 1e-10) -> float:
    """``log2`` of the largest Schmidt rank over all bipartitions of a pure state."""
    psi = np.asarray(psi, dtype=complex)
    dims = tuple(dims)
    if psi.size != prod(dims):
        raise ValueError("state vector length does not match dims")
    t = psi.reshape(dims)
    n = len(dims)
    rank = 1
    rest = list(range(1, n))
    # subsets containing subsystem 0 enumerate each bipartition once
    for k in range(0, n - 1):
        for extra in combinations(rest, k):
            a = [0, *extra]
            b = [i for i in range(n) if i not in a]
            m = t.transpose(a + b).reshape(prod(dims[i] for i in a), -1)
            sv = np.linalg.svd(m, compute_uv=False)
            rank = max(rank, int(np.sum(sv > tol)))
    return float(np.log2(rank))
