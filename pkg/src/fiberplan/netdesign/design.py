"""Design dispatch: build the right graph for a tier and solve it.

MST designs span every node over a complete great-circle graph. PCST designs
route along the road network, weighing each terminal's user mass against the
trench length needed to reach it, and may leave low-value terminals out.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from ..geodata import RoadGraph, Settlement
from .graphs import (
    EmptyNodeSet,
    NetworkDesign,
    PrizedGraph,
    RoadAttachment,
    VertexPayload,
    WeightedGraph,
    attach_terminals_to_roads,
    build_euclidean_graph,
)
from .solvers import pcst_gw, prim_mst

log = logging.getLogger(__name__)

LEVELS = ("regional", "access")
ALGORITHMS = ("mst", "pcst")


@dataclass(frozen=True)
class DesignResult:
    """A solved design plus the geometry needed to render and report it."""

    level: str
    design: NetworkDesign
    graph: WeightedGraph
    terminal_vertex: dict[str, int]  # settlement id -> vertex id
    root_id: str
    warnings: tuple[str, ...] = ()

    def connected_settlements(self) -> list[str]:
        """Settlement ids reachable in the design, ascending."""
        return sorted(
            sid
            for sid, v in self.terminal_vertex.items()
            if v in self.design.connected_vertices
        )


def design_network(
    level: str,
    algorithm: str,
    nodes: Sequence[Settlement],
    root_id: str,
    *,
    roads: RoadGraph | None = None,
    node_users: Mapping[str, float] | None = None,
    snap_radius_km: float = 5.0,
    prize_scale: float = 1.0,
    count_root_as_terminal: bool = True,
) -> DesignResult:
    """Design one network tier over the given nodes.

    Args:
        level: "regional" or "access" (labelling only; both tiers solve the
            same way).
        algorithm: "mst" spans every node; "pcst" trades road-routed length
            against per-node user prizes and may exclude nodes.
        nodes: settlements to connect, including the root.
        root_id: settlement the design grows from.
        roads: road network (required for pcst).
        node_users: users per settlement id; prizes for pcst.
        snap_radius_km: road-attachment distance beyond which a spur is
            flagged as a fallback.
        prize_scale: km of trench one user justifies.
        count_root_as_terminal: whether the root is a billable terminal
            (False when the root is existing core plant).
    """
    if level not in LEVELS:
        raise ValueError(f"level must be one of {LEVELS}, got {level!r}")
    if algorithm not in ALGORITHMS:
        raise ValueError(f"algorithm must be one of {ALGORITHMS}, got {algorithm!r}")
    if not nodes:
        raise EmptyNodeSet(f"{level} design requested over no nodes")
    unique = {s.id: s for s in nodes}
    if len(unique) != len(nodes):
        raise ValueError("duplicate settlement ids in design nodes")
    if root_id not in unique:
        raise ValueError(f"root {root_id!r} is not among the design nodes")
    ordered = [unique[k] for k in sorted(unique)]

    if len(ordered) == 1:
        return _single_node_result(level, algorithm, ordered[0], count_root_as_terminal)

    if algorithm == "mst":
        return _design_mst(level, ordered, root_id, count_root_as_terminal)
    return _design_pcst(
        level,
        ordered,
        root_id,
        roads=roads,
        node_users=node_users or {},
        snap_radius_km=snap_radius_km,
        prize_scale=prize_scale,
        count_root_as_terminal=count_root_as_terminal,
    )


def _single_node_result(
    level: str, algorithm: str, node: Settlement, count_root: bool
) -> DesignResult:
    graph = WeightedGraph(1, [VertexPayload(node.location, node.id)])
    design = NetworkDesign(
        algorithm="MST" if algorithm == "mst" else "PCST_GW",
        edges=(),
        connected_vertices=frozenset({0}),
        excluded_terminals=frozenset(),
        total_length_km=0.0,
        total_penalty=0.0,
        terminal_node_count=1 if count_root else 0,
    )
    return DesignResult(
        level=level, design=design, graph=graph, terminal_vertex={node.id: 0}, root_id=node.id
    )


def _design_mst(
    level: str, ordered: Sequence[Settlement], root_id: str, count_root: bool
) -> DesignResult:
    graph = build_euclidean_graph(ordered)
    terminal_vertex = {s.id: i for i, s in enumerate(ordered)}
    design = prim_mst(graph, root=terminal_vertex[root_id])
    if not count_root:
        design = _with_terminal_count(design, design.terminal_node_count - 1)
    return DesignResult(
        level=level,
        design=design,
        graph=graph,
        terminal_vertex=terminal_vertex,
        root_id=root_id,
    )


def _design_pcst(
    level: str,
    ordered: Sequence[Settlement],
    root_id: str,
    *,
    roads: RoadGraph | None,
    node_users: Mapping[str, float],
    snap_radius_km: float,
    prize_scale: float,
    count_root_as_terminal: bool,
) -> DesignResult:
    if roads is None:
        raise ValueError("pcst designs require a road network")
    if prize_scale <= 0:
        raise ValueError(f"prize_scale must be positive, got {prize_scale}")
    attachment = attach_terminals_to_roads(ordered, roads, snap_radius_km)
    graph = attachment.graph
    terminal_vertex = attachment.terminal_vertex
    root_vertex = terminal_vertex[root_id]
    prizes: dict[int, float] = {}
    for s in ordered:
        if s.id == root_id:
            continue  # the root is always in the tree; a prize would be inert
        users = float(node_users.get(s.id, 0.0))
        if users < 0:
            raise ValueError(f"negative users for settlement {s.id!r}")
        prizes[terminal_vertex[s.id]] = users * prize_scale
    terminals = frozenset(terminal_vertex[s.id] for s in ordered)
    prized = PrizedGraph(graph=graph, prizes=prizes, root=root_vertex, terminals=terminals)
    design = pcst_gw(prized)
    if not count_root_as_terminal and root_vertex in design.connected_vertices:
        design = _with_terminal_count(design, design.terminal_node_count - 1)
    warnings = tuple(
        f"settlement {sid} attached {dist:.2f} km beyond the {snap_radius_km:.2f} km snap radius"
        for sid, dist in attachment.beyond_snap
    )
    return DesignResult(
        level=level,
        design=design,
        graph=graph,
        terminal_vertex=dict(terminal_vertex),
        root_id=root_id,
        warnings=warnings,
    )


def _with_terminal_count(design: NetworkDesign, count: int) -> NetworkDesign:
    return NetworkDesign(
        algorithm=design.algorithm,
        edges=design.edges,
        connected_vertices=design.connected_vertices,
        excluded_terminals=design.excluded_terminals,
        total_length_km=design.total_length_km,
        total_penalty=design.total_penalty,
        terminal_node_count=count,
    )
