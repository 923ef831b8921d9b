"""Coin families and the walk operators built from them.

For every vertex ``j`` with outgoing edges the coin family supplies one coin
vector per edge ``(j, k)``.  These define the local states

    psi_j = sum_k v_j^k (x) |j, k>,

the projector ``Pi = sum_j |psi_j><psi_j|``, the register swap ``S`` and the
walk unitary ``U = S (2 Pi - I)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np

from .blocks import BlockOperator, StateVector
from .errors import (
    IsolatedVertex,
    MissingEdgeAssignment,
    UnexpectedEdgeAssignment,
    UnitalConditionViolated,
    UnitarityCheckFailed,
    UnknownVertex,
    WrongCoinDimension,
)
from .graph import DirectedEdge, DirectedGraph, PairBasis, pair_basis

__all__ = [
    "UNITAL_TOL",
    "CoinFamily",
    "UnitalReport",
    "WalkOperator",
    "validate_coin_family",
    "build_psi",
    "build_projector",
    "build_swap",
    "build_reflection",
    "build_walk_unitary",
    "projection_residual",
    "reflection_residual",
    "unitarity_residual",
    "is_projection",
    "is_unitary",
    "is_reflection",
]

UNITAL_TOL = 1e-10


@dataclass(frozen=True)
class CoinFamily:
    """Coin vectors of length ``coin_dim``, one per directed edge.

    Vectors are stored as given; nothing is normalized.
    """

    coin_dim: int
    coins: Mapping[DirectedEdge, np.ndarray] = field(repr=False)

    def __post_init__(self):
        frozen = {}
        for edge, vec in self.coins.items():
            vec = np.array(vec, dtype=np.complex128)
            vec.setflags(write=False)
            frozen[DirectedEdge(*edge)] = vec
        object.__setattr__(self, "coins", MappingProxyType(frozen))

    def __getitem__(self, edge) -> np.ndarray:
        return self.coins[DirectedEdge(*edge)]

    @classmethod
    def uniform(cls, g: DirectedGraph, by_offset: Mapping[int, Sequence[complex]]) -> CoinFamily:
        """Assign each edge ``(j, k)`` the vector ``by_offset[k - j]``."""
        coin_dim = len(next(iter(by_offset.values())))
        return cls(coin_dim, {e: by_offset[e.target - e.source] for e in g.edges})

    def to_json(self) -> dict:
        return {
            "coin_dim": self.coin_dim,
            "coins": [
                {
                    "from": e.source,
                    "to": e.target,
                    "re": [float(x) for x in v.real],
                    "im": [float(x) for x in v.imag],
                }
                for e, v in self.coins.items()
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> CoinFamily:
        coins = {}
        for entry in data["coins"]:
            re = np.asarray(entry["re"], dtype=float)
            im = np.asarray(entry.get("im", np.zeros_like(re)), dtype=float)
            if re.shape != im.shape:
                raise WrongCoinDimension(
                    f"edge ({entry['from']}, {entry['to']}): re and im have different lengths"
                )
            coins[DirectedEdge(int(entry["from"]), int(entry["to"]))] = re + 1j * im
        return cls(int(data["coin_dim"]), coins)


@dataclass(frozen=True)
class UnitalReport:
    """Per-vertex residuals ``sum_k |v_j^k|^2 - 1`` and those exceeding ``tol``."""

    tol: float
    residuals: Mapping[int, float]
    violations: Mapping[int, float]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def describe(self) -> str:
        if self.ok:
            return "unital condition holds at every vertex"
        lines = [f"unital condition violated (tol={self.tol:g}):"]
        lines += [f"  vertex {j}: residual {r:+.3e}" for j, r in self.violations.items()]
        return "\n".join(lines)

    def raise_if_invalid(self) -> None:
        if not self.ok:
            raise UnitalConditionViolated(self.describe(), self.violations)


def validate_coin_family(g: DirectedGraph, f: CoinFamily, tol: float = UNITAL_TOL) -> UnitalReport:
    """Check the unital condition ``sum_k (v_j^k)^dagger v_j^k = 1`` at every vertex.

    Structural defects raise; normalization defects are reported.

    Raises
    ------
    MissingEdgeAssignment
        Some edge of ``g`` has no coin vector.
    UnexpectedEdgeAssignment
        A coin vector is assigned to a pair that is not an edge of ``g``.
    WrongCoinDimension
        A coin vector does not have length ``f.coin_dim``.
    """
    if f.coin_dim < 1:
        raise WrongCoinDimension("coin dimension must be positive")
    edge_set = set(g.edges)
    extra = [e for e in f.coins if e not in edge_set]
    if extra:
        raise UnexpectedEdgeAssignment(f"coin vectors given for non-edges: {[tuple(e) for e in extra]}")
    residuals: dict[int, float] = {}
    violations: dict[int, float] = {}
    for j in g.vertices:
        edges = g.out_edges[j]
        if not edges:
            continue
        total = 0.0
        for e in edges:
            if e not in f.coins:
                raise MissingEdgeAssignment(f"edge {tuple(e)} has no coin vector")
            v = f.coins[e]
            if v.shape != (f.coin_dim,):
                raise WrongCoinDimension(
                    f"edge {tuple(e)}: coin vector has shape {v.shape}, expected ({f.coin_dim},)"
                )
            if not np.all(np.isfinite(v)):
                raise WrongCoinDimension(f"edge {tuple(e)}: coin vector has non-finite entries")
            total += float(np.vdot(v, v).real)
        residuals[j] = total - 1.0
        if abs(total - 1.0) > tol:
            violations[j] = total - 1.0
    return UnitalReport(tol, MappingProxyType(residuals), MappingProxyType(violations))


def build_psi(g: DirectedGraph, f: CoinFamily, j: int, basis: PairBasis | None = None) -> StateVector:
    """The local state ``psi_j``, supported on the out-edges of ``j``."""
    if j not in g:
        raise UnknownVertex(f"vertex {j} is not in the graph")
    edges = g.out_edges[j]
    if not edges:
        raise IsolatedVertex(f"vertex {j} has no outgoing edges")
    basis = basis if basis is not None else pair_basis(g)
    return StateVector.from_pairs(basis, f.coin_dim, {tuple(e): f[e] for e in edges})


def build_projector(
    g: DirectedGraph, f: CoinFamily, basis: PairBasis | None = None, tol: float = UNITAL_TOL
) -> BlockOperator:
    """``Pi = sum_j |psi_j><psi_j|`` over vertices with outgoing edges.

    Isolated vertices contribute nothing; a graph without edges gives ``Pi = 0``.
    """
    validate_coin_family(g, f, tol).raise_if_invalid()
    basis = basis if basis is not None else pair_basis(g)
    blocks = {}
    for j in g.vertices:
        edges = g.out_edges[j]
        for ket in edges:
            for bra in edges:
                key = (basis.index(ket), basis.index(bra))
                blocks[key] = np.outer(f[ket], f[bra].conj())
    return BlockOperator(basis, f.coin_dim, blocks)


def build_swap(basis: PairBasis, coin_dim: int) -> BlockOperator:
    """``S = I_c (x) sum |j,k><k,j|``: an identity block at ``(swap(p), p)`` for every pair."""
    if not basis.is_swap_closed():
        raise ValueError("swap operator needs a swap-closed basis")
    eye = np.eye(coin_dim)
    return BlockOperator(basis, coin_dim, {(basis.swap_index(i), i): eye for i in range(len(basis))})


def build_reflection(projector: BlockOperator) -> BlockOperator:
    """``2 Pi - I``."""
    return 2.0 * projector - BlockOperator.identity(projector.basis, projector.coin_dim)


def unitarity_residual(op: BlockOperator) -> float:
    """``max |U^dagger U - I|`` entrywise."""
    eye = BlockOperator.identity(op.basis, op.coin_dim)
    return (op.dagger() @ op - eye).max_abs()


def projection_residual(op: BlockOperator) -> float:
    """Larger of ``max |P^2 - P|`` and ``max |P^dagger - P|``."""
    return max((op @ op - op).max_abs(), (op.dagger() - op).max_abs())


def is_unitary(op: BlockOperator, tol: float = 1e-10) -> bool:
    return unitarity_residual(op) <= tol


def is_projection(op: BlockOperator, tol: float = 1e-10) -> bool:
    return projection_residual(op) <= tol


def reflection_residual(op: BlockOperator) -> float:
    """Larger of ``max |R^2 - I|`` and ``max |R^dagger - R|``."""
    eye = BlockOperator.identity(op.basis, op.coin_dim)
    return max((op @ op - eye).max_abs(), (op.dagger() - op).max_abs())


def is_reflection(op: BlockOperator, tol: float = 1e-10) -> bool:
    return reflection_residual(op) <= tol


@dataclass(frozen=True)
class WalkOperator:
    """The walk unitary ``u`` together with the pieces it was built from."""

    u: BlockOperator
    projector: BlockOperator = field(repr=False)
    swap: BlockOperator = field(repr=False)
    graph: DirectedGraph = field(repr=False)
    family: CoinFamily = field(repr=False)
    unitarity_residual: float = 0.0

    @property
    def basis(self) -> PairBasis:
        return self.u.basis

    @property
    def coin_dim(self) -> int:
        return self.u.coin_dim

    @property
    def dim(self) -> int:
        return self.u.dim

    @property
    def reflection(self) -> BlockOperator:
        return build_reflection(self.projector)

    @property
    def u_dagger(self) -> BlockOperator:
        return self.u.dagger()


def build_walk_unitary(
    g: DirectedGraph,
    f: CoinFamily,
    tol: float = UNITAL_TOL,
    unitarity_tol: float = 1e-10,
) -> WalkOperator:
    """Build ``U = S (2 Pi - I)`` and verify it is unitary.

    Raises
    ------
    UnitalConditionViolated
        The coin family fails the unital condition at some vertex.
    UnitarityCheckFailed
        ``max |U^dagger U - I|`` exceeds ``unitarity_tol``.
    """
    basis = pair_basis(g)
    projector = build_projector(g, f, basis, tol)
    swap = build_swap(basis, f.coin_dim)
    u = swap @ build_reflection(projector)
    residual = unitarity_residual(u)
    if residual > unitarity_tol:
        raise UnitarityCheckFailed(
            f"walk operator is not unitary: max |U^dagger U - I| = {residual:.3e}"
        )
    return WalkOperator(u, projector, swap, g, f, residual)
