"""Graph types for network design and their construction from geodata.

Vertices are dense integer ids. Construction helpers carry per-vertex
payloads (coordinate, optional settlement id) so designs can be rendered
back into geographic outputs.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

from ..errors import SolverError
from ..geodata import GeoPoint, RoadGraph, Settlement, haversine_km

log = logging.getLogger(__name__)


class DuplicateCoordinate(SolverError):
    """Two distinct nodes share an exact coordinate."""


class EmptyNodeSet(SolverError):
    """A design was requested over no nodes."""


class DisconnectedGraph(SolverError):
    """A spanning design was requested on a disconnected graph."""


class RootMissing(SolverError):
    """The requested root vertex is not in the graph."""


class InstanceTooLarge(SolverError):
    """The exact solver was asked for more vertices than it enumerates."""


@dataclass(frozen=True)
class VertexPayload:
    """Geographic identity of a graph vertex."""

    point: GeoPoint
    settlement_id: str | None = None


class WeightedGraph:
    """Undirected graph with positive edge weights and dense vertex ids."""

    def __init__(self, n: int, payloads: Sequence[VertexPayload | None] | None = None):
        if n < 0:
            raise ValueError(f"vertex count must be >= 0, got {n}")
        if payloads is not None and len(payloads) != n:
            raise ValueError("payloads length must match vertex count")
        self.n = n
        self.payloads: list[VertexPayload | None] = list(payloads) if payloads else [None] * n
        self._adj: list[dict[int, float]] = [dict() for _ in range(n)]

    def add_vertex(self, payload: VertexPayload | None = None) -> int:
        self.payloads.append(payload)
        self._adj.append(dict())
        self.n += 1
        return self.n - 1

    def add_edge(self, u: int, v: int, weight: float) -> None:
        if u == v:
            raise ValueError(f"self-loop at vertex {u}")
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise ValueError(f"edge ({u}, {v}) out of range for {self.n} vertices")
        if weight <= 0.0:
            raise ValueError(f"edge weight must be positive, got {weight}")
        prev = self._adj[u].get(v)
        if prev is None or weight < prev:
            self._adj[u][v] = weight
            self._adj[v][u] = weight

    def neighbors(self, u: int) -> list[tuple[int, float]]:
        return sorted(self._adj[u].items())

    def weight(self, u: int, v: int) -> float:
        return self._adj[u][v]

    def edges(self) -> Iterator[tuple[int, int, float]]:
        """Edges normalized u < v, in ascending (u, v) order."""
        for u in range(self.n):
            for v, w in sorted(self._adj[u].items()):
                if u < v:
                    yield u, v, w

    @property
    def edge_count(self) -> int:
        return sum(len(a) for a in self._adj) // 2


@dataclass(frozen=True)
class PrizedGraph:
    """A weighted graph with vertex prizes and a designated root.

    Prizes are the opportunity value of connecting a vertex (same unit as
    edge weights). Vertices absent from `prizes` carry prize 0. `terminals`
    marks the vertices that count as demand points; it defaults to the
    positive-prize vertices, but may include zero-prize demand points.
    """

    graph: WeightedGraph
    prizes: Mapping[int, float]
    root: int
    terminals: frozenset[int] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if not (0 <= self.root < self.graph.n):
            raise RootMissing(f"root {self.root} not in graph of {self.graph.n} vertices")
        for v, p in self.prizes.items():
            if not (0 <= v < self.graph.n):
                raise ValueError(f"prized vertex {v} not in graph")
            if p < 0.0:
                raise ValueError(f"prize must be >= 0, got {p} at vertex {v}")
        prized_vertices = frozenset(v for v, p in self.prizes.items() if p > 0.0)
        if self.terminals is None:
            object.__setattr__(self, "terminals", prized_vertices)
        else:
            for v in self.terminals:
                if not (0 <= v < self.graph.n):
                    raise ValueError(f"terminal {v} not in graph")
            if not prized_vertices <= self.terminals:
                raise ValueError("every positive-prize vertex must be a terminal")

    def prize(self, v: int) -> float:
        return self.prizes.get(v, 0.0)


@dataclass(frozen=True)
class NetworkDesign:
    """Result of a design solve over a weighted graph."""

    algorithm: str  # "MST" | "PCST_GW" | "PCST_EXACT"
    edges: tuple[tuple[int, int, float], ...]  # normalized u < v, sorted
    connected_vertices: frozenset[int]
    excluded_terminals: frozenset[int]
    total_length_km: float
    total_penalty: float
    terminal_node_count: int

    @property
    def objective(self) -> float:
        """Edge length plus foregone prizes (what the solvers minimize)."""
        return self.total_length_km + self.total_penalty


def build_euclidean_graph(nodes: Sequence[Settlement]) -> WeightedGraph:
    """Complete graph over settlements, weighted by great-circle distance."""
    if len(nodes) < 2:
        raise EmptyNodeSet(f"need at least 2 nodes for a graph, got {len(nodes)}")
    seen: dict[GeoPoint, str] = {}
    for s in nodes:
        if s.location in seen:
            raise DuplicateCoordinate(
                f"settlements {seen[s.location]!r} and {s.id!r} share coordinate {s.location}"
            )
        seen[s.location] = s.id
    g = WeightedGraph(len(nodes), [VertexPayload(s.location, s.id) for s in nodes])
    for i, a in enumerate(nodes):
        for j in range(i + 1, len(nodes)):
            g.add_edge(i, j, haversine_km(a.location, nodes[j].location))
    return g


@dataclass(frozen=True)
class RoadAttachment:
    """Road graph augmented with settlement terminals.

    terminal_vertex maps settlement id to its vertex. Settlements farther
    than the snap radius from every road vertex are still attached (a spur to
    the nearest vertex) but are listed in `beyond_snap` for reporting.
    """

    graph: WeightedGraph
    terminal_vertex: dict[str, int]
    beyond_snap: tuple[tuple[str, float], ...]


def attach_terminals_to_roads(
    nodes: Sequence[Settlement], roads: RoadGraph, snap_radius_km: float
) -> RoadAttachment:
    """Embed settlements into the road graph as terminal vertices.

    A settlement coincident with a road vertex merges onto it; otherwise it
    becomes a new vertex with a spur edge to the nearest road vertex
    (nearest by distance, ties to the lowest vertex id).
    """
    if not nodes:
        raise EmptyNodeSet("no settlements to attach")
    if snap_radius_km < 0:
        raise ValueError(f"snap_radius_km must be >= 0, got {snap_radius_km}")
    g = WeightedGraph(len(roads.vertices), [VertexPayload(p) for p in roads.vertices])
    for u, v, w in roads.edges:
        g.add_edge(u, v, w)
    terminal_vertex: dict[str, int] = {}
    beyond: list[tuple[str, float]] = []
    for s in nodes:
        if s.id in terminal_vertex:
            raise ValueError(f"duplicate settlement id {s.id!r}")
        best_v, best_d = -1, float("inf")
        for vid, p in enumerate(roads.vertices):
            d = haversine_km(s.location, p)
            if d < best_d:
                best_v, best_d = vid, d
        if best_d == 0.0:
            # Coincident with a road vertex: merge, keeping the settlement id.
            g.payloads[best_v] = VertexPayload(roads.vertices[best_v], s.id)
            terminal_vertex[s.id] = best_v
            continue
        vid = g.add_vertex(VertexPayload(s.location, s.id))
        g.add_edge(vid, best_v, best_d)
        terminal_vertex[s.id] = vid
        if best_d > snap_radius_km:
            beyond.append((s.id, best_d))
            log.warning(
                "settlement %s is %.2f km from the nearest road vertex "
                "(snap radius %.2f km); attached by direct spur",
                s.id,
                best_d,
                snap_radius_km,
            )
    return RoadAttachment(
        graph=g, terminal_vertex=terminal_vertex, beyond_snap=tuple(beyond)
    )
