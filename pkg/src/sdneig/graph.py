"""Undirected connected graphs, hop distances, and random geometric graphs.

Hop distance (number of edges on a shortest path) is the only metric used
in this package; every locality notion (balls, matrix widths, communication
ranges) is expressed in terms of it.
"""

from __future__ import annotations

import json
import logging
import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import GenerationFailureError, InvalidInputError, InvalidVertexError
from .rng import STREAM_GRAPH, substream

log = logging.getLogger(__name__)

_MAX_RESAMPLES = 1000


def is_connected(adjacency) -> bool:
    """True iff a BFS from vertex 0 reaches every vertex.

    ``adjacency`` is a per-vertex sequence of neighbor indices; it is
    assumed symmetric.  A single vertex counts as connected.
    """
    n = len(adjacency)
    if n == 0:
        return False
    seen = [False] * n
    seen[0] = True
    queue = deque([0])
    count = 1
    while queue:
        i = queue.popleft()
        for j in adjacency[i]:
            if not seen[j]:
                seen[j] = True
                count += 1
                queue.append(j)
    return count == n


@dataclass(frozen=True)
class Graph:
    """Immutable undirected connected simple graph.

    adjacency holds sorted neighbor tuples; coords, when present, are the
    planar positions the graph was generated from (in [0,1]^2).
    """

    n: int
    adjacency: tuple
    coords: tuple | None = None

    def __post_init__(self):
        if self.n < 1 or len(self.adjacency) != self.n:
            raise InvalidInputError("adjacency length must equal vertex count")
        for i, nbrs in enumerate(self.adjacency):
            if list(nbrs) != sorted(set(nbrs)):
                raise InvalidInputError(f"neighbor list of {i} must be sorted and duplicate-free")
            for j in nbrs:
                if j == i:
                    raise InvalidInputError(f"self-loop at vertex {i}")
                if not 0 <= j < self.n:
                    raise InvalidInputError(f"neighbor {j} of vertex {i} out of range")
                if i not in self.adjacency[j]:
                    raise InvalidInputError(f"asymmetric edge ({i},{j})")
        if not is_connected(self.adjacency):
            raise InvalidInputError("graph must be connected")
        if self.coords is not None and len(self.coords) != self.n:
            raise InvalidInputError("coords length must equal vertex count")

    @classmethod
    def from_edges(cls, n: int, edges, coords=None) -> "Graph":
        """Build from an edge list; each edge may appear in either order."""
        nbrs = [set() for _ in range(n)]
        for i, j in edges:
            if not (0 <= i < n and 0 <= j < n):
                raise InvalidInputError(f"edge ({i},{j}) out of range")
            if i == j:
                raise InvalidInputError(f"self-loop at vertex {i}")
            nbrs[i].add(j)
            nbrs[j].add(i)
        adjacency = tuple(tuple(sorted(s)) for s in nbrs)
        coords_t = tuple((float(x), float(y)) for x, y in coords) if coords is not None else None
        return cls(n=n, adjacency=adjacency, coords=coords_t)

    def degree(self, i: int) -> int:
        self._check_vertex(i)
        return len(self.adjacency[i])

    def degrees(self) -> np.ndarray:
        return np.array([len(a) for a in self.adjacency])

    def edge_count(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def bfs_distances(self, i: int):
        """Hop distance from vertex i to every vertex (all finite)."""
        self._check_vertex(i)
        dist = [-1] * self.n
        dist[i] = 0
        queue = deque([i])
        while queue:
            k = queue.popleft()
            for j in self.adjacency[k]:
                if dist[j] < 0:
                    dist[j] = dist[k] + 1
                    queue.append(j)
        return dist

    def ball(self, i: int, s: int):
        """Sorted list of vertices within hop distance s of i."""
        self._check_vertex(i)
        if s < 0:
            raise InvalidVertexError(f"negative radius {s}")
        if s == 0:
            return [i]
        dist = {i: 0}
        queue = deque([i])
        while queue:
            k = queue.popleft()
            if dist[k] == s:
                continue
            for j in self.adjacency[k]:
                if j not in dist:
                    dist[j] = dist[k] + 1
                    queue.append(j)
        return sorted(dist)

    def diameter(self) -> int:
        return max(max(self.bfs_distances(i)) for i in range(self.n))

    def _check_vertex(self, i: int):
        if not 0 <= i < self.n:
            raise InvalidVertexError(f"vertex {i} out of range for n={self.n}")


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def random_geometric_graph(n: int, seed: int) -> Graph:
    """Seeded random geometric graph on [0,1]^2, radius sqrt(2/n).

    Vertices are i.i.d. uniform points; an edge joins two vertices whose
    Euclidean distance is at most sqrt(2/n).  Disconnected draws are
    resampled with seed+1, seed+2, ... (bounded retry count), which keeps
    the construction a pure function of (n, seed).
    """
    if n < 1:
        raise InvalidInputError("n must be >= 1")
    for k in range(_MAX_RESAMPLES):
        stream = substream(seed + k, STREAM_GRAPH)
        pts = np.array([[stream.uniform(), stream.uniform()] for _ in range(n)])
        diff = pts[:, None, :] - pts[None, :, :]
        d2 = np.einsum("ijk,ijk->ij", diff, diff)
        close = d2 <= 2.0 / n
        np.fill_diagonal(close, False)
        adjacency = tuple(
            tuple(int(j) for j in np.nonzero(close[i])[0]) for i in range(n)
        )
        if is_connected(adjacency):
            if k > 0:
                log.info("random_geometric_graph(n=%d, seed=%d): %d resamples", n, seed, k)
            coords = tuple((float(x), float(y)) for x, y in pts)
            return Graph(n=n, adjacency=adjacency, coords=coords)
    raise GenerationFailureError(
        f"no connected geometric graph after {_MAX_RESAMPLES} resamples (n={n}, seed={seed})"
    )


def graph_to_json(g: Graph) -> dict:
    """JSON object {"n", "edges", "coords"?}; edges listed once with i<j."""
    edges = [[i, j] for i in range(g.n) for j in g.adjacency[i] if i < j]
    obj = {"n": g.n, "edges": edges}
    if g.coords is not None:
        obj["coords"] = [[x, y] for x, y in g.coords]
    return obj


def graph_from_json(obj: dict) -> Graph:
    coords = obj.get("coords")
    return Graph.from_edges(int(obj["n"]), obj["edges"], coords=coords)


def save_graph(g: Graph, path: str):
    with open(path, "w") as f:
        json.dump(graph_to_json(g), f)
        f.write("\n")


def load_graph(path: str) -> Graph:
    with open(path) as f:
        return graph_from_json(json.load(f))
