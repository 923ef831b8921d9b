"""The walk on the integer line, truncated to a window wider than its light cone.

Each vertex ``j`` sends ``[-i/2, 1/2]`` to the right neighbour and
``[1/2, 1/2]`` to the left one.  The walker starts in
``[1/2, 1/2; 1/2, 1/2] (x) |0,1><0,1|``.  After ``t`` steps every block of
the state involves only vertices with ``|j| <= t + 1``, so any window of
radius ``t + 1 + margin`` reproduces the infinite line exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .blocks import BlockOperator
from .density import DensityOperator, WalkTrajectory, evolve, step
from .errors import PairOutsideBasis
from .graph import DirectedGraph, PairBasis, line_window
from .measurement import VertexDistribution, vertex_distribution
from .operators import CoinFamily, WalkOperator, build_walk_unitary

__all__ = [
    "RIGHT_COIN",
    "LEFT_COIN",
    "INITIAL_COIN",
    "INITIAL_PAIR",
    "LineWalkConfig",
    "LineWalkResult",
    "required_radius",
    "paper_coin_family",
    "paper_initial_state",
    "paper_walk",
    "run_paper_example",
    "split_by_position",
    "second_step_split",
]

RIGHT_COIN = np.array([-0.5j, 0.5])
LEFT_COIN = np.array([0.5, 0.5])
INITIAL_COIN = np.array([1.0, 1.0]) / np.sqrt(2.0)
INITIAL_PAIR = (0, 1)


def required_radius(t: int, margin: int = 1) -> int:
    if t < 0 or margin < 0:
        raise ValueError("steps and margin must be nonnegative")
    return t + 1 + margin


@dataclass(frozen=True)
class LineWalkConfig:
    steps: int
    window_margin: int = 1

    def __post_init__(self):
        if self.steps < 0 or self.window_margin < 0:
            raise ValueError("steps and window_margin must be nonnegative")

    @property
    def radius(self) -> int:
        return required_radius(self.steps, self.window_margin)


def paper_coin_family(g: DirectedGraph) -> CoinFamily:
    """Line coins for a :func:`~dopwalk.graph.line_window` graph.

    An end vertex has a single out-edge; its vector is rescaled to unit norm
    so the unital condition holds there too.
    """
    coins = {}
    for j in g.vertices:
        edges = g.out_edges[j]
        for e in edges:
            v = RIGHT_COIN if e.target == j + 1 else LEFT_COIN
            if len(edges) == 1:
                v = v / np.linalg.norm(v)
            coins[e] = v
    return CoinFamily(2, coins)


def paper_initial_state(basis: PairBasis) -> DensityOperator:
    """``[1/2, 1/2; 1/2, 1/2] (x) |0,1><0,1|``.

    The block is written out rather than formed from ``INITIAL_COIN`` so
    that it is exactly dyadic.
    """
    if INITIAL_PAIR not in basis:
        raise PairOutsideBasis(f"pair {INITIAL_PAIR} is not in the basis")
    block = np.full((2, 2), 0.5)
    return DensityOperator.from_pair_blocks(basis, 2, {(INITIAL_PAIR, INITIAL_PAIR): block})


def paper_walk(radius: int) -> WalkOperator:
    g = line_window(radius)
    return build_walk_unitary(g, paper_coin_family(g))


class LineWalkResult(NamedTuple):
    trajectory: WalkTrajectory
    distributions: list[VertexDistribution]
    walk: WalkOperator


def run_paper_example(t: int, margin: int = 1) -> LineWalkResult:
    """Evolve the line walk for ``t`` steps and read off ``P(j)`` at every step."""
    config = LineWalkConfig(t, margin)
    walk = paper_walk(config.radius)
    trajectory = evolve(walk, paper_initial_state(walk.basis), t)
    return LineWalkResult(trajectory, [vertex_distribution(r) for r in trajectory], walk)


def split_by_position(rho: BlockOperator) -> tuple[DensityOperator, DensityOperator]:
    """Split into blocks with equal ket and bra pair and the remaining cross blocks."""
    diag = {k: b for k, b in rho.blocks.items() if k[0] == k[1]}
    cross = {k: b for k, b in rho.blocks.items() if k[0] != k[1]}
    return (
        DensityOperator(rho.basis, rho.coin_dim, diag),
        DensityOperator(rho.basis, rho.coin_dim, cross),
    )


def second_step_split(walk: WalkOperator, rho1: BlockOperator) -> tuple[DensityOperator, DensityOperator]:
    """Images of the position-diagonal and cross parts of ``rho1`` under one step.

    By linearity the two parts add up to the next state.
    """
    diag, cross = split_by_position(rho1)
    return step(walk, diag), step(walk, cross)
