"""Tree solvers: minimum spanning tree and prize-collecting Steiner tree.

All three solvers are deterministic: every tie (equal edge weights, equal
event times, equal objectives) is broken by fixed lexicographic rules, so a
given graph always yields bit-identical designs.
"""

from __future__ import annotations

import heapq
import itertools
import logging
import math
from collections import deque

from .graphs import (
    DisconnectedGraph,
    EmptyNodeSet,
    InstanceTooLarge,
    NetworkDesign,
    PrizedGraph,
    RootMissing,
    WeightedGraph,
)

log = logging.getLogger(__name__)

EXACT_PCST_MAX_VERTICES = 16


def _sorted_edges(edges: list[tuple[int, int, float]]) -> tuple[tuple[int, int, float], ...]:
    normalized = [(min(u, v), max(u, v), w) for u, v, w in edges]
    return tuple(sorted(normalized))


def prim_mst(graph: WeightedGraph, root: int = 0) -> NetworkDesign:
    """Minimum spanning tree grown from `root`.

    Ties between equal-weight candidate edges are broken by the smaller
    (min endpoint, max endpoint) pair, so the selected tree is unique.

    Raises:
        EmptyNodeSet: the graph has no vertices.
        RootMissing: root is not a vertex.
        DisconnectedGraph: some vertex is unreachable from root.
    """
    n = graph.n
    if n == 0:
        raise EmptyNodeSet("cannot span an empty graph")
    if not (0 <= root < n):
        raise RootMissing(f"root {root} not in graph of {n} vertices")
    in_tree = [False] * n
    in_tree[root] = True
    chosen: list[tuple[int, int, float]] = []
    heap: list[tuple[float, int, int, int]] = []

    def push_frontier(u: int) -> None:
        for v, w in graph.neighbors(u):
            if not in_tree[v]:
                heapq.heappush(heap, (w, min(u, v), max(u, v), v))

    push_frontier(root)
    while heap and len(chosen) < n - 1:
        w, a, b, v = heapq.heappop(heap)
        if in_tree[v]:
            continue
        in_tree[v] = True
        chosen.append((a, b, w))
        push_frontier(v)
    if len(chosen) < n - 1:
        missing = [v for v in range(n) if not in_tree[v]]
        raise DisconnectedGraph(
            f"{len(missing)} of {n} vertices unreachable from root {root} "
            f"(first few: {missing[:5]})"
        )
    return NetworkDesign(
        algorithm="MST",
        edges=_sorted_edges(chosen),
        connected_vertices=frozenset(range(n)),
        excluded_terminals=frozenset(),
        total_length_km=math.fsum(w for _, _, w in chosen),
        total_penalty=0.0,
        terminal_node_count=n,
    )


# --- Goemans-Williamson PCST ------------------------------------------------


class _Cluster:
    __slots__ = ("members", "prize_sum", "dual", "active")

    def __init__(self, members: list[int], prize_sum: float, dual: float, active: bool):
        self.members = members
        self.prize_sum = prize_sum
        self.dual = dual
        self.active = active


def pcst_gw(prized: PrizedGraph) -> NetworkDesign:
    """Rooted prize-collecting Steiner tree via moat growing, then pruning.

    Grows uniform-rate duals around active clusters; an edge joins two
    clusters when the moats meet across it, and a cluster deactivates when
    its dual budget exhausts its prize mass. The forest component containing
    the root is then reduced by strong pruning (exact best-subtree DP) and
    reconnected by the induced minimum spanning tree over the kept vertices.
    Both post-steps only improve on the classical pruning, so the returned
    objective stays within a factor 2 of the optimum.

    Simultaneous events resolve merges before deactivations, each in
    lexicographic vertex order.
    """
    g = prized.graph
    n = g.n
    root = prized.root
    if n == 0:
        raise EmptyNodeSet("cannot design over an empty graph")
    edges = list(g.edges())

    find_cache = list(range(n))  # vertex -> cluster id (path-compressed lazily)
    clusters: dict[int, _Cluster] = {}
    for v in range(n):
        p = prized.prize(v)
        clusters[v] = _Cluster([v], p, 0.0, v != root and p > 0.0)
    next_cid = n
    owner = list(range(n))  # vertex -> current cluster id

    depth = [0.0] * n  # accumulated moat depth over each vertex
    forest: list[tuple[int, int, float]] = []

    def cluster_of(v: int) -> int:
        return owner[v]

    while True:
        active_ids = sorted(cid for cid, c in clusters.items() if c.active)
        if not active_ids:
            break
        best_key: tuple | None = None
        best_event: tuple | None = None
        for u, v, w in edges:
            cu, cv = cluster_of(u), cluster_of(v)
            if cu == cv:
                continue
            rate = (1 if clusters[cu].active else 0) + (1 if clusters[cv].active else 0)
            if rate == 0:
                continue
            slack = w - depth[u] - depth[v]
            dt = max(0.0, slack / rate)
            key = (dt, 0, min(u, v), max(u, v))
            if best_key is None or key < best_key:
                best_key = key
                best_event = ("merge", u, v, w)
        for cid in active_ids:
            c = clusters[cid]
            dt = max(0.0, c.prize_sum - c.dual)
            key = (dt, 1, min(c.members), -1)
            if best_key is None or key < best_key:
                best_key = key
                best_event = ("die", cid)
        assert best_event is not None
        dt = best_key[0]
        for cid in active_ids:
            c = clusters[cid]
            c.dual += dt
            for m in c.members:
                depth[m] += dt
        if best_event[0] == "merge":
            _, u, v, w = best_event
            cu, cv = cluster_of(u), cluster_of(v)
            a, b = clusters[cu], clusters[cv]
            merged = _Cluster(
                members=a.members + b.members,
                prize_sum=a.prize_sum + b.prize_sum,
                dual=a.dual + b.dual,
                active=False,
            )
            has_root = cluster_of(root) in (cu, cv)
            merged.active = (not has_root) and merged.dual < merged.prize_sum
            clusters.pop(cu)
            clusters.pop(cv)
            clusters[next_cid] = merged
            for m in merged.members:
                owner[m] = next_cid
            next_cid += 1
            forest.append((u, v, w))
        else:
            clusters[best_event[1]].active = False

    # Root component of the moat forest.
    adj: dict[int, list[tuple[int, float]]] = {}
    for u, v, w in forest:
        adj.setdefault(u, []).append((v, w))
        adj.setdefault(v, []).append((u, w))
    component: set[int] = {root}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for v, _ in adj.get(u, []):
            if v not in component:
                component.add(v)
                queue.append(v)

    kept_vertices, kept_edges = _strong_prune(prized, adj, component)
    kept_edges = _reconnect_minimally(g, kept_vertices, kept_edges, root)
    return _prized_design("PCST_GW", prized, kept_vertices, kept_edges)


def _reconnect_minimally(
    g: WeightedGraph,
    kept: set[int],
    kept_edges: list[tuple[int, int, float]],
    root: int,
) -> list[tuple[int, int, float]]:
    """Replace the kept tree by the MST of the induced subgraph on `kept`.

    The induced subgraph contains the kept tree's edges, so it is connected
    and the swap can only shorten the design; site selection is unchanged.
    """
    if len(kept) <= 2:
        return kept_edges
    sub_vertices = sorted(kept)
    index = {v: i for i, v in enumerate(sub_vertices)}
    sub = WeightedGraph(len(sub_vertices))
    for u, v, w in g.edges():
        if u in index and v in index:
            sub.add_edge(index[u], index[v], w)
    mst = prim_mst(sub, root=index[root])
    return [(sub_vertices[a], sub_vertices[b], w) for a, b, w in mst.edges]


def _strong_prune(
    prized: PrizedGraph, adj: dict[int, list[tuple[int, float]]], component: set[int]
) -> tuple[set[int], list[tuple[int, int, float]]]:
    """Best subtree of the root component that contains the root.

    Bottom-up over the tree: a child subtree is kept only when its pruned
    value strictly exceeds the edge cost that reaches it.
    """
    root = prized.root
    order: list[tuple[int, int, float]] = []  # (vertex, parent, parent edge weight)
    parent = {root: (-1, 0.0)}
    stack = [root]
    while stack:
        u = stack.pop()
        for v, w in sorted(adj.get(u, [])):
            if v in component and v not in parent:
                parent[v] = (u, w)
                order.append((v, u, w))
                stack.append(v)
    value = {v: prized.prize(v) for v in parent}
    for v, u, w in reversed(order):
        value[u] += max(0.0, value[v] - w)

    kept = {root}
    kept_edges: list[tuple[int, int, float]] = []
    for v, u, w in order:  # parents precede children in DFS discovery order
        if u in kept and value[v] > w:
            kept.add(v)
            kept_edges.append((u, v, w))
    return kept, kept_edges


def _prized_design(
    algorithm: str,
    prized: PrizedGraph,
    vertices: set[int],
    edges: list[tuple[int, int, float]],
) -> NetworkDesign:
    excluded = frozenset(t for t in prized.terminals if t not in vertices)
    return NetworkDesign(
        algorithm=algorithm,
        edges=_sorted_edges(edges),
        connected_vertices=frozenset(vertices),
        excluded_terminals=excluded,
        total_length_km=math.fsum(w for _, _, w in edges),
        total_penalty=math.fsum(prized.prize(t) for t in sorted(excluded)),
        terminal_node_count=sum(1 for t in prized.terminals if t in vertices),
    )


# --- exact PCST by enumeration ---------------------------------------------


def _kruskal_tree(
    vertices: list[int], g: WeightedGraph
) -> tuple[list[tuple[int, int, float]], bool]:
    """MST of the induced subgraph; (edges, spanning?) — Kruskal, local ids."""
    index = {v: i for i, v in enumerate(vertices)}
    cand = sorted(
        (w, u, v)
        for u, v, w in g.edges()
        if u in index and v in index
    )
    parent = list(range(len(vertices)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    chosen: list[tuple[int, int, float]] = []
    for w, u, v in cand:
        ru, rv = find(index[u]), find(index[v])
        if ru != rv:
            parent[ru] = rv
            chosen.append((u, v, w))
            if len(chosen) == len(vertices) - 1:
                break
    return chosen, len(chosen) == len(vertices) - 1


def pcst_exact(prized: PrizedGraph) -> NetworkDesign:
    """Optimal rooted prize-collecting Steiner tree by subset enumeration.

    Enumerates every vertex subset containing the root whose induced subgraph
    is connected, costs it as induced-MST weight plus the prizes it forgoes,
    and keeps the best (ties to the lexicographically smallest subset).
    Intended as an oracle for small instances.

    Raises:
        InstanceTooLarge: more than 16 vertices.
    """
    g = prized.graph
    n = g.n
    if n == 0:
        raise EmptyNodeSet("cannot design over an empty graph")
    if n > EXACT_PCST_MAX_VERTICES:
        raise InstanceTooLarge(
            f"exact solver enumerates at most {EXACT_PCST_MAX_VERTICES} vertices, got {n}"
        )
    root = prized.root
    others = [v for v in range(n) if v != root]
    total_prize = math.fsum(prized.prize(v) for v in range(n))

    best: tuple[float, tuple[int, ...]] | None = None
    best_edges: list[tuple[int, int, float]] | None = None
    for mask in range(1 << len(others)):
        subset = [root] + [others[i] for i in range(len(others)) if mask >> i & 1]
        subset.sort()
        tree, spanning = _kruskal_tree(subset, g)
        if not spanning:
            continue
        weight = math.fsum(w for _, _, w in tree)
        penalty = total_prize - math.fsum(prized.prize(v) for v in subset)
        objective = weight + penalty
        key = (objective, tuple(subset))
        if best is None or key < best:
            best = key
            best_edges = tree
    assert best is not None and best_edges is not None  # root-only subset always qualifies
    return _prized_design("PCST_EXACT", prized, set(best[1]), best_edges)
