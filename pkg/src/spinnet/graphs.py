"""Rotation and twist-rotation graphs over coupling trees.

The rotation graph has one vertex per twist class of labeled trees (stored
as :func:`canonical_nonplane` representatives) and one edge per rotation.
The twist-rotation graph has one vertex per plane labeled tree and edges for
both rotations and twists.

Vertices are indexed by the lexicographic rank of their bracket string.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Iterator, NamedTuple

from .errors import InputError, ResourceError
from .trees import (
    CouplingTree,
    canonical_nonplane,
    count_trees,
    enumerate_trees,
    format_bracket,
    rotation_move,
    shape_of,
    tree_from,
    twist_move,
)

__all__ = [
    "Move",
    "MoveGraph",
    "KINDS",
    "MAX_N",
    "build_graph",
    "apply_move",
    "distance",
    "diameter",
    "diameter_bound",
    "find_path",
    "count_shortest_paths",
    "asymptotic_count_ratio",
    "export_edges",
]

KINDS = ("rotation", "twist_rotation")
MAX_N = {"rotation": 7, "twist_rotation": 5}


class Move(NamedTuple):
    """An edge annotation.

    ``type`` is ``"rotation"`` or ``"twist"``; ``node`` is the post-order node
    id in the source tree. For rotation-graph edges ``variant`` is 0 (plane
    rotation at the node) or 1 (twist the node, then rotate); for plane
    rotations it is the direction ``"left"``/``"right"``.
    """

    type: str
    node: int
    variant: object = None

    def sort_key(self):
        return (self.type, self.node, str(self.variant))

    def __str__(self):
        return f"{self.type}:{self.node}" + ("" if self.variant is None else f":{self.variant}")


def apply_move(kind: str, tree: CouplingTree, move: Move) -> CouplingTree:
    """Replay an edge annotation on its source tree."""
    if move.type == "twist":
        return twist_move(tree, move.node)
    if kind == "twist_rotation":
        return rotation_move(tree, move.node, move.variant)
    t = twist_move(tree, move.node) if move.variant == 1 else tree
    return canonical_nonplane(rotation_move(t, move.node))


def _moves(kind: str, tree: CouplingTree) -> Iterator[Move]:
    internal = range(tree.n - 1)
    if kind == "rotation":
        for x in internal:
            yield Move("rotation", x, 0)
            yield Move("rotation", x, 1)
    else:
        for x in range(tree.n):
            yield Move("twist", x)
        for x in internal:
            side = tree.path(x)[-1]
            yield Move("rotation", x, "right" if side == 0 else "left")


@dataclass(frozen=True)
class MoveGraph:
    """An immutable move graph with annotated adjacency lists."""

    kind: str
    n: int
    vertices: tuple
    index: dict
    adjacency: tuple

    def __len__(self):
        return len(self.vertices)

    @property
    def num_edges(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def degrees(self) -> set[int]:
        return {len(a) for a in self.adjacency}

    def vertex(self, t) -> int:
        """Index of a tree (CouplingTree, nested tuple or bracket string)."""
        try:
            tree = tree_from(t)
        except Exception as exc:
            raise InputError(f"not a tree: {t!r}") from exc
        if self.kind == "rotation":
            tree = canonical_nonplane(tree)
        try:
            return self.index[tree]
        except KeyError:
            raise InputError(f"{format_bracket(tree)} is not a vertex of this graph "
                             f"(n={self.n}, kind={self.kind})") from None

    def neighbors(self, v: int) -> list[int]:
        return [u for u, _ in self.adjacency[v]]

    def is_connected(self) -> bool:
        return all(d >= 0 for d in bfs(self, 0))

    def is_undirected(self) -> bool:
        sets = [set(self.neighbors(v)) for v in range(len(self))]
        return all(v in sets[u] for v in range(len(self)) for u in sets[v])


def build_graph(n: int, kind: str, max_n: int | None = None) -> MoveGraph:
    """Build the rotation or twist-rotation graph for trees with n+1 leaves.

    Raises
    ------
    ResourceError
        If n exceeds ``max_n`` (default 7 for rotation, 5 for twist_rotation).
    """
    if kind not in KINDS:
        raise InputError(f"unknown graph kind {kind!r}; expected one of {KINDS}")
    limit = MAX_N[kind] if max_n is None else max_n
    if not isinstance(n, int) or n < 2 or n > limit:
        size = count_trees(n, "nonplane_labeled" if kind == "rotation" else "plane_labeled") \
            if isinstance(n, int) and n >= 1 else None
        raise ResourceError(f"n={n} outside the supported range 2..{limit} for {kind} graphs",
                            required=size, allowed=limit)
    category = "nonplane_labeled" if kind == "rotation" else "plane_labeled"
    trees = sorted(enumerate_trees(n, category), key=format_bracket)
    index = {t: i for i, t in enumerate(trees)}
    adjacency = []
    for t in trees:
        edges = [(index[apply_move(kind, t, m)], m) for m in _moves(kind, t)]
        adjacency.append(tuple(edges))
    return MoveGraph(kind, n, tuple(trees), index, tuple(adjacency))


def bfs(g: MoveGraph, source: int) -> list[int]:
    """Distances from ``source``; -1 marks unreachable vertices."""
    dist = [-1] * len(g)
    dist[source] = 0
    queue = deque([source])
    adjacency = g.adjacency
    while queue:
        v = queue.popleft()
        d = dist[v] + 1
        for u, _ in adjacency[v]:
            if dist[u] < 0:
                dist[u] = d
                queue.append(u)
    return dist


def distance(g: MoveGraph, t1, t2) -> int:
    """Minimum number of moves between two trees."""
    return bfs(g, g.vertex(t1))[g.vertex(t2)]


def _orbit_representatives(g: MoveGraph) -> list[int]:
    # leaf relabelings are graph automorphisms, so one vertex per shape suffices
    reps = {}
    for v, t in enumerate(g.vertices):
        reps.setdefault(shape_of(t, plane=g.kind == "twist_rotation"), v)
    return sorted(reps.values())


def diameter(g: MoveGraph, method: str = "orbits") -> int:
    """Exact diameter.

    ``method="orbits"`` runs BFS from one vertex per unlabeled shape, which is
    exact because relabeling leaves maps the graph onto itself.
    ``method="all_pairs"`` runs BFS from every vertex (guarded to 10**5 vertices).
    """
    if method == "orbits":
        sources = _orbit_representatives(g)
    elif method == "all_pairs":
        if len(g) > 10**5:
            raise ResourceError("all-pairs BFS limited to 10**5 vertices",
                                required=len(g), allowed=10**5)
        sources = range(len(g))
    else:
        raise InputError(f"unknown method {method!r}")
    best = 0
    for s in sources:
        dist = bfs(g, s)
        if min(dist) < 0:
            raise InputError("graph is not connected")
        best = max(best, max(dist))
    return best


def diameter_bound(n: int) -> float:
    """Upper bound n lg n + n - 2 lg n + 1 on the rotation-graph diameter."""
    lg = math.log2(n)
    return n * lg + n - 2 * lg + 1


def find_path(g: MoveGraph, t1, t2) -> list[tuple[Move, CouplingTree]]:
    """A shortest move sequence from t1 to t2.

    Each step is ``(move, tree_after_move)``. Among equally short continuations
    the move with the smallest (type, node, variant) is taken at every step,
    which makes the path deterministic.
    """
    src, dst = g.vertex(t1), g.vertex(t2)
    to_dst = bfs(g, dst)
    path = []
    v = src
    while v != dst:
        d = to_dst[v]
        options = [(m.sort_key(), u, m) for u, m in g.adjacency[v] if to_dst[u] == d - 1]
        _, v, move = min(options)
        path.append((move, g.vertices[v]))
    return path


def count_shortest_paths(g: MoveGraph, t1, t2) -> int:
    """Number of distinct shortest paths, by dynamic programming over BFS layers."""
    src, dst = g.vertex(t1), g.vertex(t2)
    dist = bfs(g, src)
    ways = [0] * len(g)
    ways[src] = 1
    for v in sorted(range(len(g)), key=lambda x: dist[x]):
        if dist[v] < 0 or v == src:
            continue
        ways[v] = sum(ways[u] for u, _ in g.adjacency[v] if dist[u] == dist[v] - 1)
    return ways[dst]


def asymptotic_count_ratio(n: int, sequence: str) -> float:
    """Exact count divided by its large-n estimate.

    ``catalan``: 4^n / sqrt(pi n (n+1)^2) * (1 - 1/(8n) + 1/(128 n^2)).
    ``double_factorial``: (2n-1)!! against n^n exp(n ln 2 - n).
    ``quadruple_factorial``: (2n)!/n! against n^n exp(2n ln 2 - n).
    The two Stirling-level estimates omit the sqrt(2) prefactor, so their
    ratios tend to sqrt(2) rather than 1.
    """
    if not isinstance(n, int) or n < 4:
        raise InputError("asymptotic ratios need n >= 4")
    if sequence == "catalan":
        exact = math.comb(2 * n, n) // (n + 1)
        log_est = n * math.log(4) - 0.5 * math.log(math.pi * n * (n + 1) ** 2)
        corr = 1 - 1 / (8 * n) + 1 / (128 * n * n)
    elif sequence == "double_factorial":
        exact = math.prod(range(1, 2 * n, 2))
        log_est = n * math.log(n) + n * math.log(2) - n
        corr = 1.0
    elif sequence == "quadruple_factorial":
        exact = math.factorial(2 * n) // math.factorial(n)
        log_est = n * math.log(n) + 2 * n * math.log(2) - n
        corr = 1.0
    else:
        raise InputError(f"unknown sequence {sequence!r}")
    return math.exp(math.log(exact) - log_est) / corr


def export_edges(g: MoveGraph) -> str:
    """Edge list: header ``n kind |V| |E|`` then ``u v move_node move_type`` per edge."""
    lines = [f"{g.n} {g.kind} {len(g)} {g.num_edges}"]
    for v, edges in enumerate(g.adjacency):
        for u, m in edges:
            if v < u:
                mtype = m.type if m.variant is None else f"{m.type}-{m.variant}"
                lines.append(f"{v} {u} {m.node} {mtype}")
    return "\n".join(lines) + "\n"
