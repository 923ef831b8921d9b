"""Dense reference implementation used to cross-check the block-sparse engine.

Everything here works on full ``dim x dim`` matrices over the flattened
space (index ``pair_index * n + coin_index``) and uses plain numpy
products.  It shares no arithmetic with :mod:`dopwalk.blocks`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DimensionMismatch, DimensionTooLarge
from .graph import DirectedGraph, PairBasis, pair_basis
from .operators import CoinFamily

__all__ = [
    "DEFAULT_DIM_CAP",
    "DenseWalk",
    "Comparison",
    "dense_build",
    "dense_evolve",
    "dense_pure_state",
    "flatten",
    "compare",
]

DEFAULT_DIM_CAP = 4096


class DenseWalk(NamedTuple):
    projector: np.ndarray
    swap: np.ndarray
    u: np.ndarray


def _basis_vector(dim: int, n: int, pair_index: int, coin) -> np.ndarray:
    out = np.zeros(dim, dtype=np.complex128)
    out[pair_index * n:(pair_index + 1) * n] = coin
    return out


def dense_build(
    g: DirectedGraph, f: CoinFamily, basis: PairBasis | None = None, cap: int = DEFAULT_DIM_CAP
) -> DenseWalk:
    """Dense ``Pi``, ``S`` and ``U = S (2 Pi - I)``.

    ``Pi`` is accumulated as a sum of outer products of the full-length
    local states; ``S`` is filled entry by entry from the swap rule.
    """
    basis = basis if basis is not None else pair_basis(g)
    n = f.coin_dim
    dim = n * len(basis)
    if dim > cap:
        raise DimensionTooLarge(f"dimension {dim} exceeds cap {cap}")

    projector = np.zeros((dim, dim), dtype=np.complex128)
    for j in g.vertices:
        if not g.out_edges[j]:
            continue
        psi = np.zeros(dim, dtype=np.complex128)
        for e in g.out_edges[j]:
            psi += _basis_vector(dim, n, basis.index_of[tuple(e)], f.coins[e])
        projector += np.outer(psi, psi.conj())

    swap = np.zeros((dim, dim))
    for (j, k), col in basis.index_of.items():
        row = basis.index_of[(k, j)]
        for c in range(n):
            swap[row * n + c, col * n + c] = 1.0

    u = swap @ (2.0 * projector - np.eye(dim))
    return DenseWalk(projector, swap, u)


def dense_evolve(u: np.ndarray, rho: np.ndarray, t: int) -> np.ndarray:
    """Apply ``rho -> u rho u^dagger`` ``t`` times."""
    if u.ndim != 2 or u.shape[0] != u.shape[1] or rho.shape != u.shape:
        raise DimensionMismatch(f"operator {u.shape} and state {rho.shape} do not match")
    ud = u.conj().T
    for _ in range(t):
        rho = u @ rho @ ud
    return rho


def dense_pure_state(basis: PairBasis, n: int, pair_coins) -> np.ndarray:
    dim = n * len(basis)
    v = np.zeros(dim, dtype=np.complex128)
    for pair, coin in pair_coins.items():
        v += _basis_vector(dim, n, basis.index_of[tuple(pair)], coin)
    return v


def flatten(obj) -> np.ndarray:
    """Dense array for a block operator, a state vector or an ndarray."""
    if isinstance(obj, np.ndarray):
        return obj
    if hasattr(obj, "amplitudes"):
        return np.asarray(obj.amplitudes).reshape(-1)
    if hasattr(obj, "blocks"):
        n = obj.coin_dim
        dim = n * len(obj.basis)
        out = np.zeros((dim, dim), dtype=np.complex128)
        for (i, j), b in obj.blocks.items():
            for a in range(n):
                for c in range(n):
                    out[i * n + a, j * n + c] = b[a, c]
        return out
    raise TypeError(f"cannot flatten {type(obj).__name__}")


@dataclass(frozen=True)
class Comparison:
    deviation: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.deviation <= self.tol

    def __bool__(self) -> bool:
        return self.passed


def compare(a, b, tol: float = 1e-10) -> Comparison:
    """Largest entrywise ``|a - b|`` after flattening both sides."""
    da, db = flatten(a), flatten(b)
    if da.shape != db.shape:
        raise DimensionMismatch(f"shapes {da.shape} and {db.shape} differ")
    dev = float(np.abs(da - db).max(initial=0.0))
    return Comparison(dev, tol)
