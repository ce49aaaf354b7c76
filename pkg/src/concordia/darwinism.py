"""System-fragment mutual information curves and redundancy metrics."""
from __future__ import annotations

import io as _io
from dataclasses import dataclass
from itertools import combinations
from math import comb, prod
from typing import Sequence

import numpy as np

from .correlations import von_neumann_entropy
from .errors import TooLarge
from .linalg import make_rng
from .states import DensityMatrix

MAX_SUBSYSTEMS = 12
DEFAULT_SUBSETS = 20


@dataclass(frozen=True)
class MutualInfoCurve:
    points: tuple[tuple[float, float], ...]   # (f, I(S:F_f)) with f = |F| / |E|
    h_system: float

    @property
    def fractions(self) -> np.ndarray:
        return np.array([p[0] for p in self.points])

    @property
    def info(self) -> np.ndarray:
        return np.array([p[1] for p in self.points])

    def to_csv(self) -> str:
        buf = _io.StringIO()
        buf.write("f,I,H_S\n")
        for f, i in self.points:
            buf.write(f"{f!r},{i!r},{self.h_system!r}\n")
        return buf.getvalue()


def _entropy(rho: DensityMatrix, keep) -> float:
    return von_neumann_entropy(rho.reduced(keep))


def mutual_info_curve(rho_se: DensityMatrix, system: Sequence[int], env_order: Sequence[int] | None = None,
                      subsets: int | None = DEFAULT_SUBSETS, seed=0) -> MutualInfoCurve:
    """``I(S:F)`` as the fragment ``F`` grows through the environment.

    Each size ``m`` averages over ``subsets`` random ``m``-subsets of the
    environment (over all of them when there are fewer).  With
    ``subsets=None``, ``F`` is the first ``m`` entries of ``env_order``.
    """
    if rho_se.n > MAX_SUBSYSTEMS:
        raise TooLarge(f"dense curves limited to {MAX_SUBSYSTEMS} subsystems, got {rho_se.n}")
    system = sorted(set(system))
    env = [i for i in range(rho_se.n) if i not in system] if env_order is None else list(env_order)
    if set(env) & set(system) or len(set(env)) != len(env):
        raise ValueError("environment order must list distinct non-system subsystems")
    h_s = _entropy(rho_se, system)
    rng = make_rng(seed)
    points = [(0.0, 0.0)]
    n_env = len(env)
    for m in range(1, n_env + 1):
        if subsets is None:
            frags = [env[:m]]
        elif comb(n_env, m) <= subsets:
            frags = [list(c) for c in combinations(env, m)]
        else:
            frags = [sorted(rng.choice(env, size=m, replace=False).tolist()) for _ in range(subsets)]
        vals = [h_s + _entropy(rho_se, f) - _entropy(rho_se, system + list(f)) for f in frags]
        points.append((m / n_env, float(np.mean(vals))))
    return MutualInfoCurve(tuple(points), h_s)


def plateau_metrics(curve: MutualInfoCurve, delta: float) -> tuple[float, int]:
    """Plateau width and redundancy at information deficit ``delta``.

    Each sampled fragment size stands for an interval ``1/|E|`` of ``f``; the
    plateau width is the total length of intervals with ``|I - H_S| <= delta``.
    Redundancy is the number of disjoint copies of the smallest fragment that
    already holds ``I >= H_S - delta``, i.e. ``floor(|E| / m_min)``; a curve
    carrying no information at all has redundancy 0.
    """
    f = curve.fractions[1:]
    info = curve.info[1:]
    if f.size == 0:
        return 0.0, 0
    n_env = f.size
    width = float(np.sum(np.abs(info - curve.h_system) <= delta)) / n_env
    hits = np.nonzero(info >= curve.h_system - delta)[0]
    if hits.size == 0 or info[hits[0]] <= 1e-9:
        return width, 0
    m_min = int(hits[0]) + 1
    return width, n_env // m_min


def random_pure_global(dims: Sequence[int], seed) -> DensityMatrix:
    """Projector onto a Haar-random pure state (normalised complex Gaussian vector)."""
    rng = make_rng(seed)
    d = prod(dims)
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return DensityMatrix.from_vector(v, tuple(dims))
