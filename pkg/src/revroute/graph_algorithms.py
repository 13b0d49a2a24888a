"""Sparse permutation routing on general graphs.

The movers are gathered at a graph center along a pruned BFS tree (the
*token tree*), permuted there with SWAP rounds, and sent back by replaying
the gathering steps in reverse.  Graphs are :class:`networkx.Graph` objects
whose vertices are ``0..n-1``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import networkx as nx

from .core import (Matching, PathReversal, ScheduleError, apply_sequence, check_permutation,
                   is_sorted)

__all__ = [
    "GraphError", "grid_graph", "read_edge_list", "parse_graph", "graph_center",
    "TokenTree", "token_tree", "move_up_to", "tree_route_matchings",
    "route_sparse_general", "sparse_general_phases", "check_graph_schedule",
]


class GraphError(ValueError):
    pass


def grid_graph(rows: int, cols: int) -> nx.Graph:
    """Grid with vertex ``r * cols + c`` at row ``r``, column ``c``."""
    if rows < 1 or cols < 1:
        raise GraphError("grid needs positive dimensions")
    g = nx.Graph()
    g.add_nodes_from(range(rows * cols))
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                g.add_edge(v, v + 1)
            if r + 1 < rows:
                g.add_edge(v, v + cols)
    return g


def read_edge_list(text: str) -> nx.Graph:
    """Parse ``"<n>"`` followed by one ``"u v"`` edge per line (``#`` starts a comment)."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise GraphError("empty edge list")
    try:
        n = int(lines[0])
    except ValueError:
        raise GraphError(f"first line must be the vertex count, got {lines[0]!r}") from None
    g = nx.Graph()
    g.add_nodes_from(range(n))
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise GraphError(f"bad edge line {ln!r}")
        u, v = int(parts[0]), int(parts[1])
        if not (0 <= u < n and 0 <= v < n) or u == v:
            raise GraphError(f"bad edge ({u}, {v}) for {n} vertices")
        g.add_edge(u, v)
    return g


def parse_graph(spec: str) -> nx.Graph:
    """``grid:RxC`` or the path of an edge-list file."""
    if spec.startswith("grid:"):
        try:
            rows, cols = (int(x) for x in spec[5:].lower().split("x"))
        except ValueError:
            raise GraphError(f"bad grid spec {spec!r}, expected grid:RxC") from None
        return grid_graph(rows, cols)
    return read_edge_list(Path(spec).read_text())


def graph_center(g: nx.Graph) -> tuple[int, int]:
    """``(center, radius)``; the smallest vertex id wins ties."""
    if g.number_of_nodes() == 0 or not nx.is_connected(g):
        raise GraphError("graph must be non-empty and connected")
    best = None
    for v in sorted(g.nodes):
        ecc = max(nx.single_source_shortest_path_length(g, v).values())
        if best is None or ecc < best[1]:
            best = (v, ecc)
    return best


@dataclass
class TokenTree:
    """BFS tree from ``root`` pruned to the vertices with a token below them."""

    root: int
    parent: dict[int, int | None]
    children: dict[int, list[int]]
    depth: dict[int, int]
    tokens: frozenset[int]
    intersections: frozenset[int] = field(default_factory=frozenset)

    def __contains__(self, v) -> bool:
        return v in self.parent

    def subtree(self, v: int) -> list[int]:
        """Vertices of the subtree at ``v`` in BFS order."""
        out, queue = [], deque([v])
        while queue:
            x = queue.popleft()
            out.append(x)
            queue.extend(self.children[x])
        return out

    def path_up(self, v: int, top: int) -> list[int]:
        """Vertices from ``v`` up to its ancestor ``top``, inclusive."""
        path = [v]
        while path[-1] != top:
            nxt = self.parent[path[-1]]
            if nxt is None:
                raise GraphError(f"{top} is not an ancestor of {v}")
            path.append(nxt)
        return path

    def edges(self) -> list[tuple[int, int]]:
        return [(v, p) for v, p in self.parent.items() if p is not None]


def token_tree(g: nx.Graph, center: int, movers: Iterable[int]) -> TokenTree:
    movers = frozenset(int(v) for v in movers)
    if not movers:
        raise GraphError("token tree needs at least one token")
    full_parent: dict[int, int | None] = {center: None}
    for u, v in nx.bfs_edges(g, center, sort_neighbors=sorted):
        full_parent[v] = u
    parent: dict[int, int | None] = {}
    for m in sorted(movers):
        x = m
        while x is not None and x not in parent:
            parent[x] = full_parent[x]
            x = full_parent[x]
    children: dict[int, list[int]] = {v: [] for v in parent}
    for v, p in parent.items():
        if p is not None:
            children[p].append(v)
    dist = nx.single_source_shortest_path_length(g, center)
    depth = {v: dist[v] for v in parent}
    counts = _subtree_counts(center, children, movers)
    for v in children:
        children[v].sort(key=lambda c: (-counts[c], c))
    inter = frozenset(v for v in parent
                      if len(children[v]) >= 2 or (v in movers and children[v]))
    return TokenTree(center, parent, children, depth, movers, inter)


def _subtree_counts(root, children, tokens) -> dict[int, int]:
    counts: dict[int, int] = {}
    order, stack = [], [root]
    while stack:
        x = stack.pop()
        order.append(x)
        stack.extend(children[x])
    for x in reversed(order):
        counts[x] = (x in tokens) + sum(counts[c] for c in children[x])
    return counts


# -- SWAP routing on trees ---------------------------------------------------

def _layer(swaps: Sequence[tuple[int, int]]) -> list[Matching]:
    """Pack sequential swaps into rounds by earliest start time."""
    ready: dict[int, int] = {}
    layers: dict[int, list[tuple[int, int]]] = {}
    for u, v in swaps:
        t = max(ready.get(u, 0), ready.get(v, 0))
        layers.setdefault(t, []).append((u, v))
        ready[u] = ready[v] = t + 1
    return [Matching(tuple(layers[t])) for t in sorted(layers)]


def tree_route_matchings(edges: Iterable[tuple[int, int]], target: Mapping[int, int],
                         root: int | None = None) -> list[Matching]:
    """SWAP rounds on a tree moving the token at ``v`` to ``target[v]``.

    ``target`` must be a bijection on the tree's vertices.  Leaves are
    settled one at a time, deepest first: the token bound for the leaf walks
    there along the tree, then the leaf is removed.  The resulting swap list
    is packed into rounds of disjoint swaps.
    """
    adj: dict[int, set[int]] = {}
    for u, v in edges:
        adj.setdefault(u, set()).add(v)
        adj.setdefault(v, set()).add(u)
    for v in target:
        adj.setdefault(v, set())
    if sorted(target) != sorted(target.values()) or set(target) != set(adj):
        raise GraphError("target must permute exactly the tree's vertices")
    if root is None:
        root = min(adj)
    dist = {root: 0}
    queue = deque([root])
    while queue:
        x = queue.popleft()
        for y in sorted(adj[x]):
            if y not in dist:
                dist[y] = dist[x] + 1
                queue.append(y)
    cur = dict(target)  # cur[v]: destination of the token now at v
    alive = set(adj)
    swaps: list[tuple[int, int]] = []
    while len(alive) > 1:
        leaf = max((v for v in alive if len(adj[v] & alive) <= 1), key=lambda v: (dist[v], -v))
        src = next(v for v in alive if cur[v] == leaf)
        if src != leaf:
            path = _tree_path(adj, alive, src, leaf)
            for a, b in zip(path, path[1:]):
                cur[a], cur[b] = cur[b], cur[a]
                swaps.append((a, b))
        alive.remove(leaf)
    return _layer(swaps)


def _tree_path(adj, alive, src, dst) -> list[int]:
    prev = {src: None}
    queue = deque([src])
    while queue:
        x = queue.popleft()
        if x == dst:
            break
        for y in adj[x]:
            if y in alive and y not in prev:
                prev[y] = x
                queue.append(y)
    path = [dst]
    while prev[path[-1]] is not None:
        path.append(prev[path[-1]])
    return path[::-1]


# -- compression -------------------------------------------------------------

class _Compressor:
    def __init__(self, tree: TokenTree):
        self.tree = tree
        self.occupied = set(tree.tokens)
        self.ops: list = []
        self.counts = _subtree_counts(tree.root, tree.children, tree.tokens)

    def emit(self, op):
        if isinstance(op, PathReversal):
            if op.length < 2:
                return
            flags = [v in self.occupied for v in op.path]
            for v, f in zip(op.path, reversed(flags)):
                (self.occupied.add if f else self.occupied.discard)(v)
        else:
            for u, v in op.swaps:
                fu, fv = u in self.occupied, v in self.occupied
                (self.occupied.add if fv else self.occupied.discard)(u)
                (self.occupied.add if fu else self.occupied.discard)(v)
        self.ops.append(op)

    def route_onto(self, region: list[int], goal: list[int], top: int):
        """Rearrange ``region`` so the tokens held there end up on ``goal``."""
        region_set, goal_set = set(region), set(goal)
        held = [v for v in region if v in self.occupied]
        if len(held) != len(goal):
            raise ScheduleError("token count does not match the goal set")
        target = {}
        free_goal = [v for v in goal if v not in self.occupied]
        vacated = [v for v in region if v not in goal_set and v in self.occupied]
        for v in region:
            if v in self.occupied:
                target[v] = v if v in goal_set else free_goal.pop(0)
            else:
                target[v] = v if v not in goal_set else vacated.pop(0)
        if all(target[v] == v for v in region):
            return
        edges = [(v, self.tree.parent[v]) for v in region
                 if self.tree.parent[v] in region_set and v != top]
        for rnd in tree_route_matchings(edges, target, root=top):
            self.emit(rnd)

    def closest_intersection(self, b: int) -> int:
        x = b
        kids = self.tree.children
        while x not in self.tree.intersections and len(kids[x]) == 1:
            x = kids[x][0]
        return x

    def move_up_to(self, v: int):
        tree = self.tree
        sub = tree.subtree(v)
        if not any(x in tree.intersections for x in sub if x != v):
            first = v not in self.occupied
            for b in tree.children[v]:
                leaf = b
                while tree.children[leaf]:
                    leaf = tree.children[leaf][0]
                path = tree.path_up(leaf, v)
                if not first:
                    path = path[:-1]
                first = False
                self.emit(PathReversal(tuple(path)))
            return
        for b in tree.children[v]:
            w = self.closest_intersection(b)
            self.move_up_to(w)
            m = self.counts[b]
            p = tree.path_up(w, b)
            held = [x for x in tree.subtree(w) if x in self.occupied]
            if len(p) >= m:
                self.route_onto(list(dict.fromkeys(held + p[:m])), p[:m], top=p[m - 1])
                self.emit(PathReversal(tuple(p)))
            else:
                goal = p + held[1:m - len(p) + 1]
                region = list(dict.fromkeys(p + held))
                self.route_onto(region, goal, top=b)
        if v not in self.occupied:
            cands = [x for x in sub if x in self.occupied
                     and not any(c in self.occupied for c in tree.subtree(x) if c != x)]
            u = max(cands, key=lambda x: (tree.depth[x], -x))
            self.emit(PathReversal(tuple(tree.path_up(u, v))))


def move_up_to(tree: TokenTree, v: int | None = None) -> list:
    """Operations that move every token of ``tree`` below ``v`` up to ``v``.

    Afterwards the occupied vertices of the subtree at ``v`` form a connected
    set containing ``v``.
    """
    if v is None:
        v = tree.root
    if v not in tree:
        raise GraphError(f"vertex {v} is not in the token tree")
    comp = _Compressor(tree)
    comp.move_up_to(v)
    return comp.ops


def sparse_general_phases(g: nx.Graph, perm: Sequence[int], center: int | None = None):
    """``(compression, inner, dilation)`` operation lists for :func:`route_sparse_general`.

    ``center`` defaults to :func:`graph_center`; pass it in when routing many
    permutations on one graph.
    """
    perm = check_permutation(perm)
    n = g.number_of_nodes()
    if len(perm) != n:
        raise GraphError(f"permutation has {len(perm)} entries for {n} vertices")
    movers = [v for v in range(n) if perm[v] != v]
    if not movers:
        return [], [], []
    if center is None:
        center, _ = graph_center(g)
    tree = token_tree(g, center, movers)
    comp = move_up_to(tree, center)
    origin = apply_sequence(range(n), comp)
    where = [0] * n
    for p, x in enumerate(origin):
        where[x] = p
    core = {where[x] for x in movers}
    target = {where[x]: where[perm[x]] for x in movers}
    edges = [(v, tree.parent[v]) for v in core if v != center]
    if any(p not in core for _, p in edges):
        raise ScheduleError("compression did not gather the tokens at the center")
    inner = tree_route_matchings(edges, target, root=center)
    return comp, inner, comp[::-1]


def route_sparse_general(g: nx.Graph, perm: Sequence[int], verify: bool = True,
                         center: int | None = None) -> list:
    """Route a permutation of the vertices of ``g``: gather, permute, scatter."""
    comp, inner, dil = sparse_general_phases(g, perm, center)
    ops = comp + inner + dil
    if verify:
        check_graph_schedule(g, ops)
        if not is_sorted(apply_sequence(perm, ops)):
            raise ScheduleError("graph schedule does not realize the permutation")
    return ops


def check_graph_schedule(g: nx.Graph, ops: Iterable) -> None:
    """Raise :class:`ScheduleError` unless every operation runs along edges of ``g``."""
    for op in ops:
        if isinstance(op, PathReversal):
            pairs = zip(op.path, op.path[1:])
        elif isinstance(op, Matching):
            pairs = op.swaps
        else:
            raise ScheduleError(f"{op} is not a graph operation")
        for u, v in pairs:
            if not g.has_edge(u, v):
                raise ScheduleError(f"{op} uses non-edge ({u}, {v})")

