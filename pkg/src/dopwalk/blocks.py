"""Block-sparse operators and vectors on the coin (x) pair space.

An operator is stored as a mapping ``(ket_index, bra_index) -> (n, n)``
complex block, where the indices refer to a :class:`~dopwalk.graph.PairBasis`
and ``n`` is the coin dimension.  Missing blocks are zero.  The flattened
dense index of coin component ``c`` at pair index ``p`` is ``p * n + c``.
"""

from __future__ import annotations

from typing import Iterator, Mapping

import numpy as np

from .errors import DimensionMismatch, PairOutsideBasis
from .graph import PairBasis

__all__ = ["DROP_TOL", "BlockOperator", "StateVector"]

DROP_TOL = 1e-15

Key = tuple[int, int]


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=np.complex128)
    a.setflags(write=False)
    return a


class BlockOperator:
    """Immutable block-sparse operator.

    Blocks whose largest entry does not exceed ``drop_tol`` are discarded
    on construction, so stored blocks are always nonzero.  Keys are kept in
    sorted order; every product loops over them in that order, which fixes
    the floating-point summation order.
    """

    __slots__ = ("basis", "coin_dim", "_blocks")

    def __init__(
        self,
        basis: PairBasis,
        coin_dim: int,
        blocks: Mapping[Key, np.ndarray] | None = None,
        drop_tol: float = DROP_TOL,
    ):
        self.basis = basis
        self.coin_dim = int(coin_dim)
        n = self.coin_dim
        size = len(basis)
        kept = {}
        for key in sorted(blocks or {}):
            block = np.asarray(blocks[key], dtype=np.complex128)
            if block.shape != (n, n):
                raise DimensionMismatch(f"block {key} has shape {block.shape}, expected {(n, n)}")
            i, j = key
            if not (0 <= i < size and 0 <= j < size):
                raise PairOutsideBasis(f"block index {key} outside basis of size {size}")
            if drop_tol is None or np.abs(block).max(initial=0.0) > drop_tol:
                kept[(int(i), int(j))] = _frozen(block)
        self._blocks = kept

    # -- construction helpers -------------------------------------------------

    @classmethod
    def zeros(cls, basis: PairBasis, coin_dim: int) -> BlockOperator:
        return cls(basis, coin_dim, {})

    @classmethod
    def identity(cls, basis: PairBasis, coin_dim: int) -> BlockOperator:
        eye = np.eye(coin_dim)
        return cls(basis, coin_dim, {(i, i): eye for i in range(len(basis))})

    @classmethod
    def from_pair_blocks(cls, basis, coin_dim, pair_blocks, **kw):
        """Build from ``{(ket_pair, bra_pair): block}`` keyed by vertex pairs."""
        blocks = {}
        for (ket, bra), block in pair_blocks.items():
            for p in (ket, bra):
                if p not in basis:
                    raise PairOutsideBasis(f"pair {tuple(p)} is not in the basis")
            blocks[(basis.index(ket), basis.index(bra))] = block
        return cls(basis, coin_dim, blocks, **kw)

    def _like(self, blocks: Mapping[Key, np.ndarray]):
        return type(self)(self.basis, self.coin_dim, blocks)

    # -- access ---------------------------------------------------------------

    @property
    def blocks(self) -> Mapping[Key, np.ndarray]:
        return self._blocks

    @property
    def dim(self) -> int:
        return self.coin_dim * len(self.basis)

    def __len__(self) -> int:
        return len(self._blocks)

    def __iter__(self) -> Iterator[Key]:
        return iter(self._blocks)

    def block(self, ket_pair, bra_pair) -> np.ndarray:
        """Block at ``(ket_pair, bra_pair)``, given as vertex pairs; zero if absent."""
        for p in (ket_pair, bra_pair):
            if p not in self.basis:
                raise PairOutsideBasis(f"pair {tuple(p)} is not in the basis")
        key = (self.basis.index(ket_pair), self.basis.index(bra_pair))
        if key in self._blocks:
            return self._blocks[key]
        return np.zeros((self.coin_dim, self.coin_dim), dtype=np.complex128)

    def pair_items(self):
        """Yield ``(ket_pair, bra_pair, block)`` in storage order."""
        pairs = self.basis.pairs
        for (i, j), b in self._blocks.items():
            yield pairs[i], pairs[j], b

    def to_dense(self) -> np.ndarray:
        n = self.coin_dim
        out = np.zeros((self.dim, self.dim), dtype=np.complex128)
        for (i, j), b in self._blocks.items():
            out[i * n:(i + 1) * n, j * n:(j + 1) * n] = b
        return out

    def max_abs(self) -> float:
        return max((float(np.abs(b).max()) for b in self._blocks.values()), default=0.0)

    def trace(self) -> complex:
        return complex(sum((np.trace(b) for (i, j), b in self._blocks.items() if i == j), 0j))

    # -- algebra --------------------------------------------------------------

    def _check_compatible(self, other) -> None:
        if other.coin_dim != self.coin_dim or other.basis.pairs != self.basis.pairs:
            raise DimensionMismatch(
                f"incompatible operands: coin dims {self.coin_dim}/{other.coin_dim}, "
                f"basis sizes {len(self.basis)}/{len(other.basis)}"
            )

    def dagger(self):
        return self._like({(j, i): b.conj().T for (i, j), b in self._blocks.items()})

    def __add__(self, other):
        if not isinstance(other, BlockOperator):
            return NotImplemented
        self._check_compatible(other)
        out = {k: b.copy() for k, b in self._blocks.items()}
        for k, b in other._blocks.items():
            out[k] = out[k] + b if k in out else b
        return self._like(out)

    def __neg__(self):
        return self._like({k: -b for k, b in self._blocks.items()})

    def __sub__(self, other):
        if not isinstance(other, BlockOperator):
            return NotImplemented
        return self + (-other)

    def __mul__(self, scalar):
        if isinstance(scalar, (BlockOperator, StateVector, np.ndarray)):
            return NotImplemented
        return self._like({k: scalar * b for k, b in self._blocks.items()})

    __rmul__ = __mul__

    @classmethod
    def _from_arrays(cls, basis, coin_dim, keys: np.ndarray, data: np.ndarray, drop_tol=DROP_TOL):
        """Fast path for already-validated ``(m, 2)`` keys sorted row-major and ``(m, n, n)`` data."""
        if len(keys) and drop_tol is not None:
            keep = np.abs(data).reshape(len(data), -1).max(axis=1) > drop_tol
            keys, data = keys[keep], data[keep]
        data = np.ascontiguousarray(data, dtype=np.complex128)
        data.setflags(write=False)
        op = cls.__new__(cls)
        op.basis = basis
        op.coin_dim = int(coin_dim)
        op._blocks = {(int(i), int(j)): data[a] for a, (i, j) in enumerate(keys.tolist())}
        return op

    def view_as(self, cls):
        """Same blocks under another :class:`BlockOperator` subclass, without copying."""
        if type(self) is cls:
            return self
        op = cls.__new__(cls)
        op.basis, op.coin_dim, op._blocks = self.basis, self.coin_dim, self._blocks
        return op

    def _arrays(self) -> tuple[np.ndarray, np.ndarray]:
        n = self.coin_dim
        if not self._blocks:
            return np.zeros((0, 2), dtype=np.int64), np.zeros((0, n, n), dtype=np.complex128)
        keys = np.array(list(self._blocks), dtype=np.int64)
        return keys, np.stack(list(self._blocks.values()))

    def __matmul__(self, other):
        if isinstance(other, StateVector):
            return self._apply(other)
        if not isinstance(other, BlockOperator):
            return NotImplemented
        self._check_compatible(other)
        a_keys, a_data = self._arrays()
        b_keys, b_data = other._arrays()
        # b is stored sorted by (row, col), so rows are contiguous runs
        starts = np.searchsorted(b_keys[:, 0], a_keys[:, 1], side="left")
        stops = np.searchsorted(b_keys[:, 0], a_keys[:, 1], side="right")
        counts = stops - starts
        a_idx = np.repeat(np.arange(len(a_keys)), counts)
        offsets = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
        b_idx = np.repeat(starts, counts) + offsets
        prods = a_data[a_idx] @ b_data[b_idx]
        size = len(self.basis)
        flat = a_keys[a_idx, 0] * size + b_keys[b_idx, 1]
        out_flat, inverse = np.unique(flat, return_inverse=True)
        acc = np.zeros((len(out_flat), self.coin_dim, self.coin_dim), dtype=np.complex128)
        # accumulation runs in (a block, b block) order: fixed and reproducible
        np.add.at(acc, inverse.reshape(-1), prods)
        keys = np.stack([out_flat // size, out_flat % size], axis=1)
        return BlockOperator._from_arrays(self.basis, self.coin_dim, keys, acc)

    def _apply(self, v: StateVector) -> StateVector:
        self._check_compatible(v)
        out = np.zeros_like(v.amplitudes)
        amps = v.amplitudes
        for (i, k), a in self._blocks.items():
            out[i] += a @ amps[k]
        return StateVector(self.basis, out)

    def __repr__(self) -> str:
        return (
            f"{type(self).__name__}(coin_dim={self.coin_dim}, "
            f"basis_size={len(self.basis)}, nblocks={len(self._blocks)})"
        )


class StateVector:
    """Vector in the coin (x) pair space, stored as a ``(|basis|, n)`` array."""

    __slots__ = ("basis", "amplitudes")

    def __init__(self, basis: PairBasis, amplitudes):
        amps = np.array(amplitudes, dtype=np.complex128)
        if amps.ndim != 2 or amps.shape[0] != len(basis):
            raise DimensionMismatch(
                f"amplitudes of shape {amps.shape} do not fit a basis of size {len(basis)}"
            )
        amps.setflags(write=False)
        self.basis = basis
        self.amplitudes = amps

    @classmethod
    def from_pairs(cls, basis: PairBasis, coin_dim: int, pair_coins) -> StateVector:
        """Build from ``{pair: coin_vector}``; unlisted pairs are zero."""
        amps = np.zeros((len(basis), coin_dim), dtype=np.complex128)
        for pair, coin in pair_coins.items():
            if pair not in basis:
                raise PairOutsideBasis(f"pair {tuple(pair)} is not in the basis")
            coin = np.asarray(coin, dtype=np.complex128)
            if coin.shape != (coin_dim,):
                raise DimensionMismatch(f"coin vector of shape {coin.shape}, expected {(coin_dim,)}")
            amps[basis.index(pair)] += coin
        return cls(basis, amps)

    @property
    def coin_dim(self) -> int:
        return self.amplitudes.shape[1]

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def at(self, pair) -> np.ndarray:
        return self.amplitudes[self.basis.index(pair)]

    def support(self, tol: float = 0.0) -> list[tuple[int, int]]:
        """Pairs carrying a coin component larger than ``tol`` in magnitude."""
        mask = np.abs(self.amplitudes).max(axis=1) > tol
        return [self.basis.pairs[i] for i in np.flatnonzero(mask)]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def flatten(self) -> np.ndarray:
        return self.amplitudes.reshape(-1).copy()

    def vdot(self, other: StateVector) -> complex:
        """``<self|other>``, conjugate-linear in ``self``."""
        if other.amplitudes.shape != self.amplitudes.shape:
            raise DimensionMismatch("state vectors of different shapes")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def outer(self, cls=BlockOperator):
        """The operator ``|self><self|`` as a block operator of type ``cls``."""
        rows = [(i, a) for i, a in enumerate(self.amplitudes) if np.any(a)]
        blocks = {(i, j): np.outer(a, b.conj()) for i, a in rows for j, b in rows}
        return cls(self.basis, self.coin_dim, blocks)

    def __repr__(self) -> str:
        return f"StateVector(coin_dim={self.coin_dim}, basis_size={len(self.basis)})"
