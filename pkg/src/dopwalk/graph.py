"""Directed graphs, the ordered-pair position basis, and the truncated line."""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, NamedTuple, Sequence

from .errors import DuplicateEdge, UnknownVertex

__all__ = [
    "DirectedEdge",
    "DirectedGraph",
    "PairBasis",
    "build_graph",
    "pair_basis",
    "line_window",
]

Pair = tuple[int, int]


class DirectedEdge(NamedTuple):
    source: int
    target: int

    def reversed(self) -> DirectedEdge:
        return DirectedEdge(self.target, self.source)


@dataclass(frozen=True)
class DirectedGraph:
    """Immutable directed graph with insertion-ordered vertices and edges.

    ``out_edges[j]`` lists the edges leaving ``j`` in the order they were
    given; every vertex has an entry, possibly empty.
    """

    vertices: tuple[int, ...]
    edges: tuple[DirectedEdge, ...]
    out_edges: Mapping[int, tuple[DirectedEdge, ...]] = field(repr=False)

    def out_degree(self, j: int) -> int:
        return len(self.out_edges[j])

    def __contains__(self, vertex: int) -> bool:
        return vertex in self.out_edges

    def to_json(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "edges": [[e.source, e.target] for e in self.edges],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> DirectedGraph:
        return build_graph(data["vertices"], data["edges"])


def build_graph(vertices: Iterable[int], edges: Iterable[Sequence[int]]) -> DirectedGraph:
    """Build a :class:`DirectedGraph`, rejecting dangling and repeated edges.

    Raises
    ------
    UnknownVertex
        An edge endpoint is not among ``vertices``.
    DuplicateEdge
        The same ordered pair is listed twice (or a vertex is repeated).
    """
    verts: list[int] = []
    out: dict[int, list[DirectedEdge]] = {}
    for v in vertices:
        v = int(v)
        if v in out:
            raise DuplicateEdge(f"vertex {v} listed twice")
        verts.append(v)
        out[v] = []

    seen: set[DirectedEdge] = set()
    edge_list: list[DirectedEdge] = []
    for raw in edges:
        j, k = (int(x) for x in raw)
        for end in (j, k):
            if end not in out:
                raise UnknownVertex(f"edge ({j}, {k}) references unknown vertex {end}")
        e = DirectedEdge(j, k)
        if e in seen:
            raise DuplicateEdge(f"edge ({j}, {k}) listed twice")
        seen.add(e)
        edge_list.append(e)
        out[j].append(e)

    return DirectedGraph(
        vertices=tuple(verts),
        edges=tuple(edge_list),
        out_edges=MappingProxyType({v: tuple(es) for v, es in out.items()}),
    )


@dataclass(frozen=True)
class PairBasis:
    """Ordered basis of position pairs ``|j, k>`` closed under swapping.

    Dense indices follow ``pairs``; ``index_of`` is its inverse.
    """

    pairs: tuple[Pair, ...]
    index_of: Mapping[Pair, int] = field(repr=False, compare=False)

    @classmethod
    def from_pairs(cls, pairs: Iterable[Sequence[int]]) -> PairBasis:
        ordered: list[Pair] = []
        index: dict[Pair, int] = {}
        for raw in pairs:
            p = (int(raw[0]), int(raw[1]))
            if p not in index:
                index[p] = len(ordered)
                ordered.append(p)
        return cls(tuple(ordered), MappingProxyType(index))

    def __len__(self) -> int:
        return len(self.pairs)

    def __contains__(self, pair) -> bool:
        return tuple(pair) in self.index_of

    def __iter__(self):
        return iter(self.pairs)

    def index(self, pair: Sequence[int]) -> int:
        return self.index_of[(int(pair[0]), int(pair[1]))]

    def swap_index(self, i: int) -> int:
        j, k = self.pairs[i]
        return self.index_of[(k, j)]

    def is_swap_closed(self) -> bool:
        return all((k, j) in self.index_of for j, k in self.pairs)


def pair_basis(g: DirectedGraph) -> PairBasis:
    """Swap closure of the edge set.

    Edges come first in graph order, followed by the reversals that are not
    themselves edges, again in graph order.
    """
    return PairBasis.from_pairs(
        [tuple(e) for e in g.edges] + [tuple(e.reversed()) for e in g.edges]
    )


def line_window(radius: int) -> DirectedGraph:
    """Vertices ``-radius..radius`` of the line, each joined to its neighbours.

    Out-edges of vertex ``j`` are ordered ``(j, j+1)`` then ``(j, j-1)``;
    the two end vertices keep only the edge pointing back into the window.
    """
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    vertices = range(-radius, radius + 1)
    edges = []
    for j in vertices:
        for k in (j + 1, j - 1):
            if -radius <= k <= radius:
                edges.append((j, k))
    return build_graph(vertices, edges)
