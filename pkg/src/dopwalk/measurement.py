"""Position measurements with the effects ``E_jk = I_c (x) |j,k><j,k|``."""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .blocks import BlockOperator
from .density import DensityOperator
from .errors import NegativeProbability, PairOutsideBasis, ZeroProbabilityOutcome

__all__ = [
    "NEGATIVE_TOL",
    "VertexDistribution",
    "effect_probability",
    "effect_probabilities",
    "collapse",
    "vertex_distribution",
    "sample_outcome",
]

# roundoff allowance below zero before a probability counts as an error
NEGATIVE_TOL = 1e-10


@dataclass(frozen=True)
class VertexDistribution:
    """``P(j)`` for every vertex that is the first entry of some basis pair."""

    probs: Mapping[int, float]

    def __getitem__(self, vertex: int) -> float:
        return self.probs.get(vertex, 0.0)

    def total(self) -> float:
        return float(sum(self.probs.values()))

    def support(self, tol: float = 1e-12) -> list[int]:
        return [v for v, p in self.probs.items() if p > tol]

    def as_array(self, vertices) -> np.ndarray:
        return np.array([self[v] for v in vertices])

    def to_json(self) -> dict[str, float]:
        return {str(v): p for v, p in self.probs.items()}


def _clamp(p: float, what) -> float:
    if p < -NEGATIVE_TOL:
        raise NegativeProbability(f"probability of {what} is {p:.3e}")
    if p < 0.0:
        return 0.0
    if 1.0 < p <= 1.0 + NEGATIVE_TOL:
        return 1.0
    return p


def _diagonal_trace(rho: BlockOperator, i: int) -> complex:
    block = rho.blocks.get((i, i))
    return 0j if block is None else complex(np.trace(block))


def effect_probability(rho: BlockOperator, pair) -> float:
    """``P(E_jk) = tr(E_jk rho)``, the trace of the diagonal block at ``pair``."""
    if pair not in rho.basis:
        raise PairOutsideBasis(f"pair {tuple(pair)} is not in the basis")
    return _diagonal_trace(rho, rho.basis.index(pair)).real


def effect_probabilities(rho: BlockOperator) -> dict[tuple[int, int], float]:
    """Unclamped ``P(E_jk)`` for every basis pair, in basis order."""
    return {p: _diagonal_trace(rho, i).real for i, p in enumerate(rho.basis.pairs)}


def collapse(rho: BlockOperator, pair, tol: float = 1e-12) -> DensityOperator:
    """State after the effect at ``pair`` fires: ``E rho E / tr(E rho E)``."""
    p = effect_probability(rho, pair)
    if p <= tol:
        raise ZeroProbabilityOutcome(f"outcome {tuple(pair)} has probability {p:.3e}")
    i = rho.basis.index(pair)
    return DensityOperator(rho.basis, rho.coin_dim, {(i, i): rho.blocks[(i, i)] / p})


def vertex_distribution(rho: BlockOperator) -> VertexDistribution:
    """``P(j) = sum_k P(E_jk)``, marginalized over the second register.

    Vertices are listed in ascending order.  Values within ``NEGATIVE_TOL``
    below zero are clamped to zero; anything lower raises.
    """
    acc: dict[int, float] = {}
    for (j, _k), p in effect_probabilities(rho).items():
        acc[j] = acc.get(j, 0.0) + p
    probs = {j: _clamp(acc[j], f"vertex {j}") for j in sorted(acc)}
    return VertexDistribution(MappingProxyType(probs))


def sample_outcome(rho: BlockOperator, rng: np.random.Generator) -> tuple[int, int]:
    """Draw a pair ``(j, k)`` with probability ``P(E_jk)``."""
    probs = effect_probabilities(rho)
    pairs = list(probs)
    weights = np.array([_clamp(probs[p], p) for p in pairs])
    total = weights.sum()
    if total <= 0:
        raise ZeroProbabilityOutcome("state has zero trace; nothing to sample")
    choice = rng.choice(len(pairs), p=weights / total)
    return pairs[int(choice)]
