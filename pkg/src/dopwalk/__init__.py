"""Discrete-time quantum walks on directed graphs in the density operator picture.

A walk is specified by a directed graph and one coin vector per edge.  The
library builds the walk unitary ``U = S (2 Pi - I)`` on the coin (x) pair
space, iterates ``rho -> U rho U^dagger`` and reads off position
probabilities.
"""

__version__ = "0.1.0"

from .blocks import BlockOperator, StateVector
from .density import (
    DensityOperator,
    WalkTrajectory,
    check_state,
    evolve,
    hs_inner,
    maximally_mixed,
    pure_density,
    pure_evolve,
    purity,
    step,
    trace,
)
from . import errors
from .graph import DirectedEdge, DirectedGraph, PairBasis, build_graph, line_window, pair_basis
from .line_walk import paper_coin_family, paper_initial_state, required_radius, run_paper_example
from .measurement import VertexDistribution, collapse, effect_probability, vertex_distribution
from .operators import (
    CoinFamily,
    WalkOperator,
    build_projector,
    build_psi,
    build_swap,
    build_walk_unitary,
    is_projection,
    is_unitary,
    validate_coin_family,
)

__all__ = [
    "errors",
    "BlockOperator",
    "StateVector",
    "DensityOperator",
    "WalkTrajectory",
    "check_state",
    "evolve",
    "hs_inner",
    "maximally_mixed",
    "pure_density",
    "pure_evolve",
    "purity",
    "step",
    "trace",
    "DirectedEdge",
    "DirectedGraph",
    "PairBasis",
    "build_graph",
    "line_window",
    "pair_basis",
    "paper_coin_family",
    "paper_initial_state",
    "required_radius",
    "run_paper_example",
    "VertexDistribution",
    "collapse",
    "effect_probability",
    "vertex_distribution",
    "CoinFamily",
    "WalkOperator",
    "build_projector",
    "build_psi",
    "build_swap",
    "build_walk_unitary",
    "is_projection",
    "is_unitary",
    "validate_coin_family",
]
