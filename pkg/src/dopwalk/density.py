"""Density operators and their evolution under the walk channel rho -> U rho U^dagger."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blocks import BlockOperator, StateVector
from .errors import DimensionMismatch, NonUnitCoinVector, NotADensityOperator, PairOutsideBasis
from .graph import PairBasis
from .operators import WalkOperator

__all__ = [
    "DensityOperator",
    "WalkTrajectory",
    "StateDiagnostics",
    "pure_density",
    "maximally_mixed",
    "step",
    "evolve",
    "pure_evolve",
    "trace",
    "purity",
    "hs_inner",
    "check_state",
]


class DensityOperator(BlockOperator):
    """Block-sparse operator meant to hold a state.

    Construction does not enforce the density-operator conditions, so the
    same type can carry arbitrary Hermitian operators; use
    :func:`check_state` to inspect them.
    """

    __slots__ = ()


@dataclass(frozen=True)
class WalkTrajectory:
    """States ``rho_0 .. rho_T``.

    With ``keep_all=False`` in :func:`evolve`, only the final state is kept
    and ``times`` records which step each stored state belongs to.
    """

    states: tuple[DensityOperator, ...]
    times: tuple[int, ...]

    @property
    def step_count(self) -> int:
        return self.times[-1]

    @property
    def final(self) -> DensityOperator:
        return self.states[-1]

    def __len__(self) -> int:
        return len(self.states)

    def __getitem__(self, i):
        return self.states[i]

    def __iter__(self):
        return iter(self.states)


@dataclass(frozen=True)
class StateDiagnostics:
    hermiticity_residual: float
    trace_residual: float
    min_eigenvalue: float

    def ok(self, tol: float = 1e-10, psd_tol: float = 1e-8) -> bool:
        return (
            self.hermiticity_residual <= tol
            and self.trace_residual <= tol
            and self.min_eigenvalue >= -psd_tol
        )


def pure_density(u, pair, basis: PairBasis, tol: float = 1e-10) -> DensityOperator:
    """``u u^dagger (x) |pair><pair|`` for a unit coin vector ``u``."""
    u = np.asarray(u, dtype=np.complex128)
    if u.ndim != 1:
        raise DimensionMismatch("coin vector must be one-dimensional")
    norm = float(np.linalg.norm(u))
    if abs(norm - 1.0) > tol:
        raise NonUnitCoinVector(f"coin vector has norm {norm:.12g}, expected 1")
    pair = (int(pair[0]), int(pair[1]))
    if pair not in basis:
        raise PairOutsideBasis(f"pair {pair} is not in the basis")
    i = basis.index(pair)
    return DensityOperator(basis, u.size, {(i, i): np.outer(u, u.conj())})


def maximally_mixed(basis: PairBasis, coin_dim: int) -> DensityOperator:
    d = coin_dim * len(basis)
    eye = np.eye(coin_dim) / d
    return DensityOperator(basis, coin_dim, {(i, i): eye for i in range(len(basis))})


def _as_density(op: BlockOperator) -> DensityOperator:
    return op.view_as(DensityOperator)


def step(walk: WalkOperator, rho: BlockOperator, u_dagger: BlockOperator | None = None) -> DensityOperator:
    """One application of the channel, evaluated as ``(U rho) U^dagger``.

    Accepts any block operator on the walk's space; trace one is not required.
    """
    u = walk.u
    if rho.coin_dim != u.coin_dim or rho.basis.pairs != u.basis.pairs:
        raise DimensionMismatch(
            f"state (coin dim {rho.coin_dim}, basis {len(rho.basis)}) does not match "
            f"walk (coin dim {u.coin_dim}, basis {len(u.basis)})"
        )
    if u_dagger is None:
        u_dagger = u.dagger()
    return _as_density((u @ rho) @ u_dagger)


def evolve(
    walk: WalkOperator,
    rho0: BlockOperator,
    t: int,
    keep_all: bool = True,
    check_trace: bool = True,
    tol: float = 1e-10,
) -> WalkTrajectory:
    """Iterate the channel ``t`` times starting from ``rho0``.

    Raises
    ------
    NotADensityOperator
        ``rho0`` does not have unit trace and ``check_trace`` is set.
    """
    if t < 0:
        raise ValueError("number of steps must be nonnegative")
    rho = _as_density(rho0)
    if check_trace and abs(rho.trace() - 1.0) > tol:
        raise NotADensityOperator(f"initial state has trace {rho.trace():.12g}")
    u_dagger = walk.u.dagger()
    states = [rho]
    times = [0]
    for s in range(1, t + 1):
        rho = step(walk, rho, u_dagger)
        if keep_all:
            states.append(rho)
            times.append(s)
        else:
            states, times = [rho], [s]
    return WalkTrajectory(tuple(states), tuple(times))


def pure_evolve(walk: WalkOperator, v: StateVector, t: int, tol: float = 1e-10) -> StateVector:
    """``U^t v`` by repeated block matrix-vector products."""
    if t < 0:
        raise ValueError("number of steps must be nonnegative")
    if v.coin_dim != walk.coin_dim or v.basis.pairs != walk.basis.pairs:
        raise DimensionMismatch("state vector does not match the walk space")
    if abs(v.norm() - 1.0) > tol:
        raise NonUnitCoinVector(f"state vector has norm {v.norm():.12g}, expected 1")
    for _ in range(t):
        v = walk.u @ v
    return v


def trace(rho: BlockOperator) -> float:
    return float(rho.trace().real)


def hs_inner(a: BlockOperator, b: BlockOperator) -> complex:
    """Hilbert-Schmidt inner product ``tr(a^dagger b)``."""
    if a.coin_dim != b.coin_dim or a.basis.pairs != b.basis.pairs:
        raise DimensionMismatch("operands live on different spaces")
    total = 0j
    bb = b.blocks
    for key, block in a.blocks.items():
        if key in bb:
            total += np.vdot(block, bb[key])
    return complex(total)


def purity(rho: BlockOperator) -> float:
    """``tr(rho^2)``, computed as the real part of ``<rho, rho>``."""
    return hs_inner(rho, rho).real


def _support_matrix(rho: BlockOperator) -> np.ndarray:
    """Dense restriction of ``rho`` to the pairs its blocks touch."""
    n = rho.coin_dim
    idx = sorted({i for key in rho.blocks for i in key})
    pos = {p: a for a, p in enumerate(idx)}
    out = np.zeros((n * len(idx), n * len(idx)), dtype=np.complex128)
    for (i, j), b in rho.blocks.items():
        a, c = pos[i], pos[j]
        out[a * n:(a + 1) * n, c * n:(c + 1) * n] = b
    return out


def check_state(rho: BlockOperator) -> StateDiagnostics:
    """Hermiticity residual, trace residual and smallest eigenvalue of ``rho``.

    The eigenvalue is taken from the Hermitian part restricted to the
    support; pairs outside the support contribute zero eigenvalues.
    """
    herm = 0.0
    blocks = rho.blocks
    for (i, j), b in blocks.items():
        other = blocks.get((j, i))
        mirror = other.conj().T if other is not None else 0.0
        herm = max(herm, float(np.abs(b - mirror).max()))
    tr_res = abs(rho.trace() - 1.0)
    dense = _support_matrix(rho)
    if dense.size:
        min_eig = float(np.linalg.eigvalsh((dense + dense.conj().T) / 2).min())
        if dense.shape[0] < rho.dim:
            min_eig = min(min_eig, 0.0)
    else:
        min_eig = 0.0
    return StateDiagnostics(herm, float(tr_res), min_eig)

