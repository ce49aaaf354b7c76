"""JSON (de)serialisation for matrices, states, bases, gates and plans.

Matrices: ``{"dim": D, "re": [[...]], "im": [[...]]}``.  Floats are written
with Python's shortest round-trip repr, so ``load(dump(x)) == x`` bit for bit.
"""
from __future__ import annotations

import json
from math import prod
from typing import Any, Sequence

import numpy as np

from .errors import MalformedInput
from .linalg import Permutation
from .states import ConcordantState, DensityMatrix, LocalBasis


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _need(d: dict, key: str):
    if not isinstance(d, dict) or key not in d:
        raise MalformedInput(f"missing field {key!r}")
    return d[key]


def matrix_to_json(m: np.ndarray) -> dict:
    m = np.asarray(m, dtype=complex)
    return {"dim": int(m.shape[0]), "re": m.real.tolist(), "im": m.imag.tolist()}


def matrix_from_json(d: dict) -> np.ndarray:
    dim = _need(d, "dim")
    try:
        re = np.asarray(_need(d, "re"), dtype=float)
        im = np.asarray(d.get("im", np.zeros_like(re)), dtype=float)
    except (TypeError, ValueError) as exc:
        raise MalformedInput(f"matrix entries are not numeric: {exc}") from None
    if not isinstance(dim, int) or dim < 1 or re.shape != (dim, dim) or im.shape != (dim, dim):
        raise MalformedInput(f"matrix entries do not form a {dim}x{dim} array")
    m = re + 1j * im
    if not np.all(np.isfinite(m)):
        raise MalformedInput("matrix has non-finite entries")
    return m


def index_to_key(k: int, dims: Sequence[int]) -> str:
    digits = np.unravel_index(k, tuple(dims))
    return "".join(str(int(x)) for x in digits)


def key_to_index(key: str, dims: Sequence[int]) -> int:
    if len(key) != len(dims) or not key.isdigit() or any(int(c) >= d for c, d in zip(key, dims)):
        raise MalformedInput(f"bad outcome key {key!r} for dims {list(dims)}")
    return int(np.ravel_multi_index(tuple(int(c) for c in key), tuple(dims)))


def table_to_json(p: np.ndarray, dims: Sequence[int], keep_zeros: bool = False) -> dict:
    p = np.asarray(p).reshape(-1)
    return {index_to_key(k, dims): (float(v) if p.dtype.kind == "f" else int(v))
            for k, v in enumerate(p) if keep_zeros or v != 0}


def table_from_json(d, dims: Sequence[int]) -> np.ndarray:
    """Accept either ``{"bitstring": value}`` or a flat list."""
    n = prod(dims)
    if isinstance(d, list):
        if len(d) != n:
            raise MalformedInput(f"table has {len(d)} entries, expected {n}")
        return np.asarray(d, dtype=float)
    if not isinstance(d, dict):
        raise MalformedInput("table must be an object or a list")
    out = np.zeros(n)
    for key, v in d.items():
        out[key_to_index(key, dims)] = float(v)
    return out


def local_basis_to_json(b: LocalBasis) -> dict:
    return {"dims": list(b.dims), "units": [matrix_to_json(u) for u in b.units]}


def local_basis_from_json(d) -> LocalBasis:
    units = d if isinstance(d, list) else _need(d, "units")
    try:
        return LocalBasis(tuple(matrix_from_json(u) for u in units))
    except ValueError as exc:
        if isinstance(exc, MalformedInput):
            raise
        raise MalformedInput(str(exc)) from None


def density_to_json(rho: DensityMatrix) -> dict:
    out = matrix_to_json(rho.mat)
    out["dims"] = list(rho.dims)
    return out


def density_from_json(d: dict) -> DensityMatrix:
    """A density matrix, or a concordant state (recognised by its ``probs`` field)."""
    if isinstance(d, dict) and "probs" in d:
        from .states import to_density

        return to_density(concordant_from_json(d))
    m = matrix_from_json(d)
    dims = d.get("dims")
    if dims is None:
        n = int(round(np.log2(m.shape[0])))
        if 2 ** n != m.shape[0]:
            raise MalformedInput("dims missing and dimension is not a power of two")
        dims = [2] * n
    try:
        return DensityMatrix(m, tuple(dims))
    except ValueError as exc:
        raise MalformedInput(str(exc)) from None


def concordant_to_json(c: ConcordantState) -> dict:
    return {
        "dims": list(c.dims),
        "basis": [matrix_to_json(u) for u in c.basis.units],
        "probs": table_to_json(c.probs, c.dims),
    }


def concordant_from_json(d: dict) -> ConcordantState:
    dims = _need(d, "dims")
    basis = local_basis_from_json(_need(d, "basis"))
    if list(basis.dims) != list(dims):
        raise MalformedInput("basis factors do not match dims")
    try:
        return ConcordantState(basis, table_from_json(_need(d, "probs"), dims))
    except ValueError as exc:
        raise MalformedInput(str(exc)) from None


def permutation_from_json(d) -> Permutation:
    try:
        return Permutation(tuple(d))
    except (TypeError, ValueError) as exc:
        raise MalformedInput(f"bad permutation: {exc}") from None


def load(path) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"{path}: invalid JSON ({exc})") from None
