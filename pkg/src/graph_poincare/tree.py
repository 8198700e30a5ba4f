"""Rooted spanning trees, shadows and the John constant.

For a rooted tree the shadow of ``t`` is ``S_t = {s : the path from s to the
root passes through t}``. The John constant of the tree is
``max_t mu(S_t) / mu(t)``.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .graph_core import GraphError, WeightedGraph

__all__ = [
    "RootedTree",
    "ShadowSummary",
    "build_spanning_tree",
    "random_spanning_tree",
    "tree_from_edges",
    "subtree_sums",
    "is_descendant",
    "shadow_summary",
    "shadow_relation",
    "count_spanning_trees",
    "enumerate_spanning_trees",
    "optimize_tree",
]

NO_PARENT = -1

# below this many levels a per-level numpy pass beats a python loop
_LEVELWISE_MAX_DEPTH = 64


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class RootedTree:
    """A spanning tree given by parent links, with the root mapped to ``-1``."""

    root: int
    parent: np.ndarray
    children: tuple[tuple[int, ...], ...]
    order: np.ndarray  # breadth-first from the root: parents precede children
    depth: np.ndarray
    _levels: tuple[np.ndarray, ...] = field(repr=False)
    _tin: np.ndarray = field(repr=False)
    _size: np.ndarray = field(repr=False)

    @classmethod
    def from_parent(cls, parent: Sequence[int] | np.ndarray, root: int) -> "RootedTree":
        par = np.array(parent, dtype=np.intp).reshape(-1)
        n = par.size
        if not 0 <= root < n:
            raise GraphError(f"root {root} outside 0..{n - 1}")
        if par[root] != NO_PARENT:
            raise GraphError("root must have no parent")
        kids: list[list[int]] = [[] for _ in range(n)]
        for v, p in enumerate(par.tolist()):
            if v == root:
                continue
            if not 0 <= p < n or p == v:
                raise GraphError(f"vertex {v} has invalid parent {p}")
            kids[p].append(v)
        children = tuple(tuple(k) for k in kids)  # ascending by construction

        order = [root]
        depth = np.zeros(n, dtype=np.intp)
        for u in order:  # grows while iterating
            for v in children[u]:
                depth[v] = depth[u] + 1
                order.append(v)
        if len(order) != n:
            raise GraphError("parent links contain a cycle or miss the root")

        levels: list[list[int]] = [[] for _ in range(int(depth.max()) + 1)]
        for v in order:
            levels[depth[v]].append(v)

        # preorder numbering and subtree sizes for O(1) ancestor queries
        tin = np.empty(n, dtype=np.intp)
        stack = [root]
        k = 0
        while stack:
            u = stack.pop()
            tin[u] = k
            k += 1
            stack.extend(reversed(children[u]))
        size = np.ones(n, dtype=np.intp)
        for v in reversed(order[1:]):
            size[par[v]] += size[v]

        return cls(
            root=int(root),
            parent=_readonly(par),
            children=children,
            order=_readonly(np.asarray(order, dtype=np.intp)),
            depth=_readonly(depth),
            _levels=tuple(_readonly(np.asarray(l, dtype=np.intp)) for l in levels),
            _tin=_readonly(tin),
            _size=_readonly(size),
        )

    @property
    def n(self) -> int:
        return self.parent.size

    @property
    def non_root(self) -> np.ndarray:
        """Non-root vertices in breadth-first order."""
        return self.order[1:]

    @property
    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """``(t, t_p)`` for every non-root vertex ``t``."""
        t = self.non_root
        return t, self.parent[t]

    @property
    def edges(self) -> list[tuple[int, int]]:
        t, p = self.edge_arrays
        return sorted((min(a, b), max(a, b)) for a, b in zip(t.tolist(), p.tolist()))

    @property
    def degrees(self) -> np.ndarray:
        d = np.array([len(c) for c in self.children], dtype=np.intp)
        d[self.parent != NO_PARENT] += 1
        return d

    @property
    def height(self) -> int:
        return len(self._levels) - 1

    def shadow(self, t: int) -> np.ndarray:
        """Boolean mask of the shadow of ``t``."""
        lo = self._tin[t]
        return (self._tin >= lo) & (self._tin < lo + self._size[t])

    def subtree_size(self, t: int) -> int:
        return int(self._size[t])

    def check_spans(self, g: WeightedGraph) -> None:
        if self.n != g.n:
            raise GraphError(f"tree has {self.n} vertices, graph has {g.n}")
        for t, p in zip(*(a.tolist() for a in self.edge_arrays)):
            if not g.has_edge(t, p):
                raise GraphError(f"tree edge ({p}, {t}) is not an edge of the graph")


def subtree_sums(tree: RootedTree, values) -> np.ndarray:
    """``out[t] = sum_{s in S_t} values[s]`` by one bottom-up pass.

    ``values`` may be 1-d or a column stack of shape ``(n, k)``.
    """
    a = np.array(values, dtype=np.float64)
    if a.shape[0] != tree.n:
        raise GraphError("values do not match the tree size")
    par = tree.parent
    if a.ndim == 1 and len(tree._levels) > _LEVELWISE_MAX_DEPTH:
        acc = a.tolist()
        p = par.tolist()
        for v in tree.order[:0:-1].tolist():
            acc[p[v]] += acc[v]
        return np.asarray(acc)
    for lvl in tree._levels[:0:-1]:
        np.add.at(a, par[lvl], a[lvl])
    return a


def is_descendant(s: int, t: int, tree: RootedTree) -> bool:
    """True iff ``s`` lies in the shadow of ``t`` (reflexive)."""
    n = tree.n
    if not (0 <= s < n and 0 <= t < n):
        raise GraphError(f"vertex ids ({s}, {t}) outside 0..{n - 1}")
    lo = tree._tin[t]
    return bool(lo <= tree._tin[s] < lo + tree._size[t])


def shadow_relation(tree: RootedTree, t1: int, t2: int) -> str:
    """``"nested"`` when the shadows of ``t1`` and ``t2`` meet, else ``"disjoint"``.

    Shadows in a tree are either disjoint or one contains the other, so
    meeting is the same as one vertex lying below the other.
    """
    if is_descendant(t1, t2, tree) or is_descendant(t2, t1, tree):
        return "nested"
    return "disjoint"


@dataclass(frozen=True, eq=False)
class ShadowSummary:
    shadow_measure: np.ndarray
    ratio: np.ndarray
    john_constant: float
    argmax: int
    degree_bound: int

    @property
    def total_measure(self) -> float:
        return float(self.shadow_measure[np.argmax(self.shadow_measure)])


def shadow_summary(g: WeightedGraph, tree: RootedTree) -> ShadowSummary:
    tree.check_spans(g)
    sm = subtree_sums(tree, g.weights)
    ratio = sm / g.weights
    arg = int(np.argmax(ratio))
    deg = tree.degrees
    return ShadowSummary(
        shadow_measure=_readonly(sm),
        ratio=_readonly(ratio),
        john_constant=float(ratio[arg]),
        argmax=arg,
        degree_bound=int(deg.max()) if deg.size else 0,
    )


def _check_root(g: WeightedGraph, root: int) -> None:
    if not 0 <= root < g.n:
        raise GraphError(f"root {root} outside 0..{g.n - 1}")


def build_spanning_tree(g: WeightedGraph, root: int = 0, strategy: str = "bfs") -> RootedTree:
    """Breadth- or depth-first spanning tree, neighbours visited by ascending id."""
    _check_root(g, root)
    parent = np.full(g.n, NO_PARENT, dtype=np.intp)
    seen = np.zeros(g.n, dtype=bool)
    seen[root] = True
    if strategy == "bfs":
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v in g.neighbors[u]:
                if not seen[v]:
                    seen[v] = True
                    parent[v] = u
                    queue.append(v)
    elif strategy == "dfs":
        stack = [(root, iter(g.neighbors[root]))]
        while stack:
            u, it = stack[-1]
            for v in it:
                if not seen[v]:
                    seen[v] = True
                    parent[v] = u
                    stack.append((v, iter(g.neighbors[v])))
                    break
            else:
                stack.pop()
    else:
        raise ValueError(f"unknown strategy {strategy!r}; expected 'bfs' or 'dfs'")
    if not seen.all():
        raise GraphError("graph is disconnected")
    return RootedTree.from_parent(parent, root)


def random_spanning_tree(g: WeightedGraph, root: int | None = None, seed=None) -> RootedTree:
    """Uniformly random spanning tree (Wilson's loop-erased random walks).

    The root is drawn uniformly when not given.
    """
    rng = np.random.default_rng(seed)
    if root is None:
        root = int(rng.integers(g.n))
    _check_root(g, root)
    if g.n > 1 and not g.is_connected():
        raise GraphError("graph is disconnected")
    in_tree = np.zeros(g.n, dtype=bool)
    in_tree[root] = True
    nxt = np.full(g.n, NO_PARENT, dtype=np.intp)
    nbrs = g.neighbors
    for start in rng.permutation(g.n).tolist():
        u = start
        while not in_tree[u]:
            nb = nbrs[u]
            nxt[u] = nb[int(rng.integers(len(nb)))]
            u = int(nxt[u])
        u = start
        while not in_tree[u]:
            in_tree[u] = True
            u = int(nxt[u])
    nxt[root] = NO_PARENT
    return RootedTree.from_parent(nxt, root)


def tree_from_edges(n: int, edges, root: int) -> RootedTree:
    """Root an undirected spanning-tree edge list at ``root``."""
    adj: list[list[int]] = [[] for _ in range(n)]
    count = 0
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
        count += 1
    if count != n - 1:
        raise GraphError(f"a spanning tree on {n} vertices needs {n - 1} edges, got {count}")
    parent = np.full(n, NO_PARENT, dtype=np.intp)
    seen = np.zeros(n, dtype=bool)
    seen[root] = True
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                parent[v] = u
                queue.append(v)
    if not seen.all():
        raise GraphError("edge list does not span the vertex set")
    return RootedTree.from_parent(parent, root)


def count_spanning_trees(g: WeightedGraph) -> float:
    """Number of spanning trees by the matrix-tree theorem (float, may be inf)."""
    if g.n == 1:
        return 1.0
    lap = np.zeros((g.n, g.n))
    u, v = g.edge_arrays
    lap[u, v] = lap[v, u] = -1.0
    lap[np.diag_indices(g.n)] = [len(nb) for nb in g.neighbors]
    sign, logdet = np.linalg.slogdet(lap[1:, 1:])
    if sign <= 0:
        return 0.0
    return float(round(math.exp(logdet))) if logdet < 700 else math.inf


class _DSU:
    def __init__(self, n: int) -> None:
        self.p = list(range(n))

    def find(self, x: int) -> int:
        while self.p[x] != x:
            self.p[x] = self.p[self.p[x]]
            x = self.p[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.p[ra] = rb
        return True


def _connects(n: int, edges) -> bool:
    d = _DSU(n)
    comps = n
    for u, v in edges:
        if d.union(u, v):
            comps -= 1
    return comps == 1


def enumerate_spanning_trees(g: WeightedGraph) -> Iterator[list[tuple[int, int]]]:
    """Yield every spanning tree of ``g`` as a sorted edge list.

    Include/exclude backtracking over the sorted edge list; an exclusion is
    only explored while the remaining edges can still connect the graph.
    """
    n = g.n
    edges = g.edges
    if n == 1:
        yield []
        return

    def rec(i: int, chosen: list[tuple[int, int]], parent: list[int]):
        if len(chosen) == n - 1:
            yield list(chosen)
            return
        if i == len(edges) or len(chosen) + len(edges) - i < n - 1:
            return
        u, v = edges[i]
        d = _DSU(n)
        d.p = list(parent)
        if d.union(u, v):
            chosen.append((u, v))
            yield from rec(i + 1, chosen, d.p)
            chosen.pop()
        if _connects(n, itertools.chain(chosen, edges[i + 1:])):
            yield from rec(i + 1, chosen, parent)

    yield from rec(0, [], list(range(n)))


def _best_root(g: WeightedGraph, edges) -> tuple[RootedTree, ShadowSummary]:
    best = None
    for r in range(g.n):
        t = tree_from_edges(g.n, edges, r)
        s = shadow_summary(g, t)
        if best is None or s.john_constant < best[1].john_constant:
            best = (t, s)
    return best


def _path_edges(tree: RootedTree, u: int, v: int) -> list[tuple[int, int]]:
    """Tree edges on the path between ``u`` and ``v`` as (child, parent) pairs."""
    out = []
    par, dep = tree.parent, tree.depth
    while u != v:
        if dep[u] >= dep[v]:
            out.append((u, int(par[u])))
            u = int(par[u])
        else:
            out.append((v, int(par[v])))
            v = int(par[v])
    return out


def _local_search(g, tree, summary, rng, budget):
    """Edge-swap hill climbing at a fixed root; returns (tree, summary, evaluations)."""
    used = 0
    improved = True
    while improved and used < budget:
        improved = False
        tree_set = set(tree.edges)
        candidates = [e for e in g.edges if e not in tree_set]
        for k in rng.permutation(len(candidates)).tolist():
            u, v = candidates[k]
            for a, b in _path_edges(tree, u, v):
                if used >= budget:
                    return tree, summary, used
                used += 1
                drop = (min(a, b), max(a, b))
                new_edges = (tree_set - {drop}) | {(u, v)}
                t2 = tree_from_edges(g.n, new_edges, tree.root)
                s2 = shadow_summary(g, t2)
                if s2.john_constant < summary.john_constant:
                    tree, summary, improved = t2, s2, True
                    break
            if improved:
                break
    return tree, summary, used


def optimize_tree(
    g: WeightedGraph,
    budget: int = 10_000,
    seed: int = 0,
    mode: str = "greedy",
    cap: int = 10**6,
) -> tuple[RootedTree, ShadowSummary]:
    """Search for a rooted spanning tree with small John constant.

    ``mode="exhaustive"`` enumerates every (spanning tree, root) pair and is
    exact; it refuses graphs where that count exceeds ``cap``. ``"greedy"``
    starts from the best breadth-first tree over all roots and improves it by
    edge swaps, spending at most ``budget`` tree evaluations. Ties go to the
    lower root id, then to the earlier candidate.
    """
    if budget < 1:
        raise ValueError("budget must be a positive iteration count")
    if mode == "exhaustive":
        pairs = count_spanning_trees(g) * g.n
        if pairs > cap:
            raise ValueError(f"{pairs:.3g} (tree, root) pairs exceed the exhaustive cap {cap}")
        best = None
        for edges in enumerate_spanning_trees(g):
            cand = _best_root(g, edges)
            if best is None or cand[1].john_constant < best[1].john_constant or (
                cand[1].john_constant == best[1].john_constant and cand[0].root < best[0].root
            ):
                best = cand
        return best
    if mode != "greedy":
        raise ValueError(f"unknown mode {mode!r}; expected 'exhaustive' or 'greedy'")

    rng = np.random.default_rng(seed)
    starts = []
    for r in range(g.n):
        t = build_spanning_tree(g, r, "bfs")
        starts.append((shadow_summary(g, t).john_constant, r, t))
    starts.sort(key=lambda x: (x[0], x[1]))
    best_t = starts[0][2]
    best_s = shadow_summary(g, best_t)
    remaining = budget
    for _, _, t in starts:
        if remaining <= 0:
            break
        t2, s2, used = _local_search(g, t, shadow_summary(g, t), rng, remaining)
        remaining -= used
        if s2.john_constant < best_s.john_constant or (
            s2.john_constant == best_s.john_constant and t2.root < best_t.root
        ):
            best_t, best_s = t2, s2
    return best_t, best_s
