"""Navigation roadmap over accepted sample points.

The graph is a Delaunay triangulation of the accepted points with every
edge that crosses a known obstacle removed. It supports incremental site
insertion (new task / robot-start nodes connect to nearby neighbors
without re-triangulating) and region removal when a new obstacle appears,
plus the shortest-path machinery for the site-to-site distance matrix.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra as _csgraph_dijkstra
from scipy.spatial import Delaunay, QhullError
from shapely.geometry import LineString, Point

from .geometry import Obstacle, Workspace, dist, point_in_obstacle, segment_blocked
from .halton import SamplePoint

_MERGE_TOL = 1e-6


class SiteError(ValueError):
    """Raised when a site cannot be attached (e.g. inside an obstacle)."""


@dataclass
class Roadmap:
    nodes: dict[int, tuple[float, float]] = field(default_factory=dict)
    adj: dict[int, dict[int, float]] = field(default_factory=dict)
    node_tags: dict[int, str] = field(default_factory=dict)
    _next_id: int = 0

    def new_node(self, p: tuple[float, float], tag: str = "free") -> int:
        nid = self._next_id
        self._next_id += 1
        self.nodes[nid] = p
        self.adj[nid] = {}
        self.node_tags[nid] = tag
        return nid

    def add_edge(self, a: int, b: int) -> None:
        w = dist(self.nodes[a], self.nodes[b])
        if w <= 0:
            raise ValueError("zero-length edge")
        self.adj[a][b] = w
        self.adj[b][a] = w

    def remove_edge(self, a: int, b: int) -> None:
        self.adj[a].pop(b, None)
        self.adj[b].pop(a, None)

    def has_edge(self, a: int, b: int) -> bool:
        return b in self.adj.get(a, {})

    def edges(self) -> list[tuple[int, int, float]]:
        out = []
        for a, nbrs in self.adj.items():
            for b, w in nbrs.items():
                if a < b:
                    out.append((a, b, w))
        return out

    def degree(self, nid: int) -> int:
        return len(self.adj[nid])

    def nearest_node(self, p: tuple[float, float]) -> int:
        return min(self.nodes, key=lambda n: dist(self.nodes[n], p))


@dataclass
class DistanceMatrix:
    locations: list[int]
    m: np.ndarray
    index: dict[int, int]

    def get(self, a: int, b: int) -> float:
        return float(self.m[self.index[a], self.index[b]])


def build(points: list[SamplePoint], w: Workspace) -> Roadmap:
    """Triangulate accepted points and prune obstacle-crossing edges.

    Degenerate (collinear) point sets fall back to 6-nearest-neighbor
    connection with the same pruning. Isolated nodes are kept.
    """
    accepted = [p for p in points if p.accepted]
    if len(accepted) < 3:
        raise ValueError("need at least 3 accepted points")
    rm = Roadmap()
    ids = [rm.new_node(p.position) for p in accepted]
    coords = np.array([p.position for p in accepted])
    try:
        tri = Delaunay(coords)
        pairs = set()
        for simplex in tri.simplices:
            for i in range(3):
                a, b = sorted((simplex[i], simplex[(i + 1) % 3]))
                pairs.add((a, b))
    except QhullError:
        pairs = _knn_pairs(coords, k=6)
    for a, b in pairs:
        if not segment_blocked(accepted[a].position, accepted[b].position, w, visible_only=True):
            rm.add_edge(ids[a], ids[b])
    return rm


def _knn_pairs(coords: np.ndarray, k: int) -> set[tuple[int, int]]:
    n = len(coords)
    pairs = set()
    for i in range(n):
        d = np.hypot(coords[:, 0] - coords[i, 0], coords[:, 1] - coords[i, 1])
        order = np.argsort(d, kind="stable")
        added = 0
        for j in order:
            if j == i:
                continue
            pairs.add(tuple(sorted((i, int(j)))))
            added += 1
            if added >= k:
                break
    return pairs


def _crosses_existing(rm: Roadmap, a: int, b: int) -> bool:
    seg = LineString([rm.nodes[a], rm.nodes[b]])
    for u, v, _ in rm.edges():
        if u in (a, b) or v in (a, b):
            continue
        if seg.crosses(LineString([rm.nodes[u], rm.nodes[v]])):
            return True
    return False


def attach_sites(
    rm: Roadmap,
    sites: list[tuple[tuple[float, float], str]],
    w: Workspace,
) -> list[int]:
    """Insert sites as nodes connected to their nearest visible neighbors.

    Each site gets up to 6 obstacle-free edges that do not cross existing
    edges; the rest of the roadmap is untouched. A site coincident with an
    existing node merges into it (tag updated). Returns one node id per
    site, in order. Unconnectable sites are added isolated.
    """
    out: list[int] = []
    for p, tag in sites:
        if not w.in_bounds(p):
            raise SiteError(f"site {p} out of bounds")
        if point_in_obstacle(p, w, visible_only=True):
            raise SiteError(f"site {p} lies inside a known obstacle")
        merged = None
        for nid, q in rm.nodes.items():
            if dist(p, q) <= _MERGE_TOL:
                merged = nid
                break
        if merged is not None:
            rm.node_tags[merged] = tag
            out.append(merged)
            continue
        nid = rm.new_node(p, tag)
        order = sorted((n for n in rm.nodes if n != nid), key=lambda n: dist(rm.nodes[n], p))
        added = 0
        for nbr in order:
            if added >= 6:
                break
            q = rm.nodes[nbr]
            if segment_blocked(p, q, w, visible_only=True):
                continue
            if _crosses_existing(rm, nid, nbr):
                continue
            rm.add_edge(nid, nbr)
            added += 1
        out.append(nid)
    return out


def remove_region(rm: Roadmap, poly: Obstacle) -> tuple[list[int], list[tuple[int, int]]]:
    """Delete nodes inside the polygon and edges intersecting it.

    Returns (removed node ids, removed edges) for planner invalidation.
    """
    shape = poly.shape
    removed_nodes = [nid for nid, p in rm.nodes.items() if shape.covers(Point(p))]
    removed_edges: list[tuple[int, int]] = []
    for a, b, _ in rm.edges():
        if a in removed_nodes or b in removed_nodes:
            removed_edges.append((a, b))
            continue
        if LineString([rm.nodes[a], rm.nodes[b]]).intersects(shape):
            removed_edges.append((a, b))
    for a, b in removed_edges:
        rm.remove_edge(a, b)
    for nid in removed_nodes:
        del rm.nodes[nid]
        del rm.adj[nid]
        del rm.node_tags[nid]
    return removed_nodes, removed_edges


def dijkstra_from(rm: Roadmap, src: int) -> tuple[dict[int, float], dict[int, int]]:
    """Exact single-source shortest paths; unreachable nodes get +inf."""
    if src not in rm.nodes:
        raise KeyError(f"unknown node id {src}")
    distmap = {n: math.inf for n in rm.nodes}
    pred: dict[int, int] = {}
    distmap[src] = 0.0
    pq = [(0.0, src)]
    while pq:
        d, u = heapq.heappop(pq)
        if d > distmap[u]:
            continue
        for v, w in rm.adj[u].items():
            nd = d + w
            if nd < distmap[v]:
                distmap[v] = nd
                pred[v] = u
                heapq.heappush(pq, (nd, v))
    return distmap, pred


def _sparse(rm: Roadmap) -> tuple[csr_matrix, list[int], dict[int, int]]:
    ids = sorted(rm.nodes)
    index = {n: i for i, n in enumerate(ids)}
    rows, cols, data = [], [], []
    for a, b, w in rm.edges():
        rows += [index[a], index[b]]
        cols += [index[b], index[a]]
        data += [w, w]
    g = csr_matrix((data, (rows, cols)), shape=(len(ids), len(ids)))
    return g, ids, index


def distance_matrix(rm: Roadmap, sites: list[int]) -> DistanceMatrix:
    """Shortest-path distances between the given site nodes."""
    for s in sites:
        if s not in rm.nodes:
            raise KeyError(f"site node {s} not in roadmap")
    g, _, node_index = _sparse(rm)
    src = [node_index[s] for s in sites]
    full = _csgraph_dijkstra(g, directed=False, indices=src)
    m = full[:, src]
    return DistanceMatrix(locations=list(sites), m=m, index={s: i for i, s in enumerate(sites)})


def shortest_path(rm: Roadmap, src: int, dst: int) -> tuple[list[int], float]:
    distmap, pred = dijkstra_from(rm, src)
    if math.isinf(distmap[dst]):
        return [], math.inf
    path = [dst]
    while path[-1] != src:
        path.append(pred[path[-1]])
    path.reverse()
    return path, distmap[dst]
