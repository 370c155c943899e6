"""Undirected simple graphs, distance balls and bridges.

Graphs are immutable adjacency lists on vertices ``0..n-1``.  A
:class:`SubgraphView` is an induced subgraph held by reference to its parent
plus a vertex subset, so a ball covering most of a big graph costs one set.
"""
from __future__ import annotations

import math
from bisect import bisect_left
from collections import defaultdict, deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .rng import SeedLike, make_rng

#: Radius meaning "the whole graph".
INF_RADIUS = math.inf


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class Graph:
    num_vertices: int
    adjacency: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.adjacency) != self.num_vertices:
            raise GraphError("adjacency length does not match num_vertices")

    @classmethod
    def from_edges(cls, num_vertices: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        adj: list[list[int]] = [[] for _ in range(num_vertices)]
        seen = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < num_vertices and 0 <= v < num_vertices):
                raise GraphError(f"edge ({u}, {v}) out of range for {num_vertices} vertices")
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise GraphError(f"duplicate edge {key}")
            seen.add(key)
            adj[u].append(v)
            adj[v].append(u)
        return cls(num_vertices, tuple(tuple(sorted(a)) for a in adj))

    def neighbors(self, v: int) -> Sequence[int]:
        return self.adjacency[v]

    def vertices(self) -> range:
        return range(self.num_vertices)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    @property
    def num_edges(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def edges(self) -> Iterator[tuple[int, int]]:
        for u, nbrs in enumerate(self.adjacency):
            for v in nbrs:
                if u < v:
                    yield (u, v)

    def has_edge(self, u: int, v: int) -> bool:
        nbrs = self.adjacency[u]
        i = bisect_left(nbrs, v)
        return i < len(nbrs) and nbrs[i] == v


@dataclass(frozen=True)
class SubgraphView:
    """Subgraph of ``parent`` induced by ``members``."""

    parent: Graph
    members: frozenset
    full: bool = field(default=False)

    def vertices(self) -> Iterable[int]:
        return self.parent.vertices() if self.full else sorted(self.members)

    def __contains__(self, v) -> bool:
        return self.full or v in self.members

    def __len__(self) -> int:
        return self.parent.num_vertices if self.full else len(self.members)

    def neighbors(self, v: int) -> Sequence[int]:
        nbrs = self.parent.adjacency[v]
        if self.full:
            return nbrs
        m = self.members
        return [w for w in nbrs if w in m]

    @property
    def num_vertices(self) -> int:
        return len(self)

    @property
    def num_edges(self) -> int:
        if self.full:
            return self.parent.num_edges
        return sum(len(self.neighbors(v)) for v in self.members) // 2

    def edges(self) -> Iterator[tuple[int, int]]:
        for u in self.vertices():
            for v in self.neighbors(u):
                if u < v:
                    yield (u, v)


GraphLike = Graph | SubgraphView


def full_view(g: Graph) -> SubgraphView:
    return SubgraphView(g, frozenset(), full=True)


def random_regular(n: int, d: int, seed: SeedLike = None, max_tries: int = 1000) -> Graph:
    """Uniform-ish random connected simple d-regular graph on n vertices.

    Stubs are paired at random; pairs that would form a loop or a repeated
    edge are put back and re-paired among themselves.  A run that gets stuck,
    or that yields a disconnected graph, is discarded and retried.
    """
    if d < 1 or d >= n:
        raise GraphError(f"need 1 <= d < n, got n={n}, d={d}")
    if (n * d) % 2:
        raise GraphError(f"n*d must be even, got n={n}, d={d}")
    rng = make_rng(seed)
    for _ in range(max_tries):
        edges = _try_pairing(n, d, rng)
        if edges is None:
            continue
        g = Graph.from_edges(n, edges)
        if is_connected(g):
            return g
    raise GraphError(f"no connected simple {d}-regular graph on {n} vertices after {max_tries} tries")


def _try_pairing(n: int, d: int, rng: np.random.Generator):
    edges: set[tuple[int, int]] = set()
    stubs = np.repeat(np.arange(n), d)
    while stubs.size:
        stubs = rng.permutation(stubs)
        leftover: dict[int, int] = defaultdict(int)
        for u, v in zip(stubs[0::2].tolist(), stubs[1::2].tolist()):
            if u > v:
                u, v = v, u
            if u != v and (u, v) not in edges:
                edges.add((u, v))
            else:
                leftover[u] += 1
                leftover[v] += 1
        if not leftover:
            break
        if not _can_continue(edges, leftover):
            return None
        stubs = np.repeat(np.fromiter(leftover.keys(), dtype=np.int64),
                          np.fromiter(leftover.values(), dtype=np.int64))
    return edges


def _can_continue(edges, leftover) -> bool:
    nodes = sorted(leftover)
    for i, u in enumerate(nodes):
        for v in nodes[i + 1:]:
            if (u, v) not in edges:
                return True
    return False


def bfs_distances(g: GraphLike, sources: Iterable[int], r: float = INF_RADIUS) -> dict[int, int]:
    dist = {}
    queue = deque()
    for s in sources:
        if s not in dist:
            dist[s] = 0
            queue.append(s)
    while queue:
        u = queue.popleft()
        du = dist[u]
        if du >= r:
            continue
        for w in g.neighbors(u):
            if w not in dist:
                dist[w] = du + 1
                queue.append(w)
    return dist


def ball(g: Graph, centers: Iterable[int], r: float) -> SubgraphView:
    """Subgraph induced by vertices within hop distance ``r`` of ``centers``.

    ``r = INF_RADIUS`` returns the whole graph without a BFS.
    """
    centers = list(centers)
    for c in centers:
        if not 0 <= c < g.num_vertices:
            raise GraphError(f"center {c} not in graph")
    if r < 0:
        raise GraphError("radius must be nonnegative")
    if math.isinf(r):
        return full_view(g)
    members = frozenset(bfs_distances(g, centers, r))
    if len(members) == g.num_vertices:
        return full_view(g)
    return SubgraphView(g, members)


def bridges(g: GraphLike) -> set[tuple[int, int]]:
    """All bridges as ``(min, max)`` pairs; iterative DFS low-link.

    Works on disconnected input.  Graphs are simple, so the tree edge back to
    the DFS parent is recognised by vertex rather than by edge id.
    """
    disc: dict[int, int] = {}
    low: dict[int, int] = {}
    out: set[tuple[int, int]] = set()
    timer = 0
    for root in g.vertices():
        if root in disc:
            continue
        disc[root] = low[root] = timer
        timer += 1
        stack = [(root, -1, iter(g.neighbors(root)))]
        while stack:
            u, parent, it = stack[-1]
            advanced = False
            for w in it:
                if w == parent:
                    continue
                if w in disc:
                    if disc[w] < low[u]:
                        low[u] = disc[w]
                else:
                    disc[w] = low[w] = timer
                    timer += 1
                    stack.append((w, u, iter(g.neighbors(w))))
                    advanced = True
                    break
            if advanced:
                continue
            stack.pop()
            if parent >= 0:
                if low[u] < low[parent]:
                    low[parent] = low[u]
                if low[u] > disc[parent]:
                    out.add((min(u, parent), max(u, parent)))
    return out


def is_connected(g: GraphLike) -> bool:
    verts = list(g.vertices())
    if not verts:
        return True
    return len(bfs_distances(g, [verts[0]])) == len(verts)


def is_tree(view: GraphLike) -> bool:
    n = view.num_vertices
    if n == 0:
        return False
    return view.num_edges == n - 1 and is_connected(view)


def _ball_is_tree(g: Graph, v: int, r: float) -> bool:
    members = bfs_distances(g, [v], r)
    twice_edges = 0
    for u in members:
        for w in g.adjacency[u]:
            if w in members:
                twice_edges += 1
    # a BFS ball is connected, so the edge count decides
    return twice_edges // 2 == len(members) - 1


def locally_tree_like_fraction(g: Graph, r: float) -> float:
    """Fraction of vertices whose closed radius-``r`` ball induces a tree."""
    if g.num_vertices == 0:
        return 1.0
    good = sum(_ball_is_tree(g, v, r) for v in g.vertices())
    return good / g.num_vertices


def boundary_count(g: Graph, u_set: Iterable[int]) -> int:
    """Members of ``u_set`` with a neighbour outside it.

    ``u_set`` must induce a subtree of a d-regular ``g``; the result is then at
    least ``(1 - 2/d) |u_set|`` and that is checked here.
    """
    members = frozenset(u_set)
    if not members:
        raise GraphError("empty vertex set")
    view = SubgraphView(g, members)
    if not is_tree(view):
        raise GraphError("vertex set does not induce a tree")
    degrees = {g.degree(v) for v in g.vertices()}
    if len(degrees) != 1:
        raise GraphError("graph is not regular")
    d = degrees.pop()
    count = sum(any(w not in members for w in g.adjacency[u]) for u in members)
    assert count >= (1 - 2 / d) * len(members) - 1e-12, "boundary bound violated"
    return count


def load_edge_list(path: str | Path, num_vertices: int | None = None) -> Graph:
    """Read ``u v`` lines (``#`` comments).  Each edge is listed once, or every
    edge is listed in both directions; a mix is rejected as asymmetric."""
    arcs: list[tuple[int, int]] = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphError(f"{path}:{lineno}: expected 'u v', got {line!r}")
        arcs.append((int(parts[0]), int(parts[1])))
    return _graph_from_arcs(arcs, num_vertices)


def _graph_from_arcs(arcs, num_vertices):
    arc_set = set()
    for a in arcs:
        if a in arc_set:
            raise GraphError(f"duplicate edge {a}")
        arc_set.add(a)
    reversed_present = sum((v, u) in arc_set for u, v in arc_set)
    if reversed_present == len(arc_set):
        edges = [(u, v) for u, v in arc_set if u < v]
        edges += [(u, v) for u, v in arc_set if u == v]
    elif reversed_present == 0:
        edges = list(arcs)
    else:
        raise GraphError("edge list is neither one-directional nor symmetric")
    n = num_vertices
    if n is None:
        n = 1 + max((max(e) for e in edges), default=-1)
    return Graph.from_edges(n, sorted(edges))


def save_edge_list(g: Graph, path: str | Path) -> None:
    lines = [f"# {g.num_vertices} vertices, {g.num_edges} edges"]
    lines += [f"{u} {v}" for u, v in g.edges()]
    Path(path).write_text("\n".join(lines) + "\n")
