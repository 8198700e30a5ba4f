"""Weighted graphs, weighted l^p norms, averages and the length of the gradient.

Vertices are dense integer ids ``0..n-1``. Vertex functions are plain 1-d
float arrays of length ``n``; most routines also accept 2-d arrays of shape
``(n, k)`` holding ``k`` functions column-wise.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "GraphError",
    "WeightedGraph",
    "as_vertex_function",
    "lp_norm",
    "weighted_mean",
    "project_zero_mean",
    "gradient_length",
    "restrict",
]


class GraphError(ValueError):
    """Raised for malformed graphs, trees or vertex functions."""


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """A finite connected graph with strictly positive vertex weights.

    Use :meth:`from_edges` to build one; the constructor trusts its inputs.
    """

    weights: np.ndarray
    neighbors: tuple[tuple[int, ...], ...]
    labels: tuple[str, ...] | None = None
    _edge_u: np.ndarray = field(init=False, repr=False)
    _edge_v: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        us = [u for u, nbrs in enumerate(self.neighbors) for v in nbrs if u < v]
        vs = [v for u, nbrs in enumerate(self.neighbors) for v in nbrs if u < v]
        object.__setattr__(self, "_edge_u", _readonly(np.asarray(us, dtype=np.intp)))
        object.__setattr__(self, "_edge_v", _readonly(np.asarray(vs, dtype=np.intp)))

    @classmethod
    def from_edges(
        cls,
        weights: Sequence[float] | np.ndarray,
        edges: Iterable[tuple[int, int]],
        labels: Sequence[str] | None = None,
        require_connected: bool = True,
    ) -> "WeightedGraph":
        w = np.array(weights, dtype=np.float64).reshape(-1)
        n = w.size
        if n == 0:
            raise GraphError("graph must have at least one vertex")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            bad = int(np.flatnonzero(~(np.isfinite(w) & (w > 0)))[0])
            raise GraphError(f"nonpositive weight at vertex {bad}: {w[bad]!r}")
        adj: list[set[int]] = [set() for _ in range(n)]
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) references a vertex outside 0..{n - 1}")
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            adj[u].add(v)
            adj[v].add(u)
        if labels is not None:
            labels = tuple(str(s) for s in labels)
            if len(labels) != n:
                raise GraphError("labels must have one entry per vertex")
        g = cls(_readonly(w), tuple(tuple(sorted(a)) for a in adj), labels)
        if require_connected and not g.is_connected():
            raise GraphError("graph is disconnected")
        return g

    @property
    def n(self) -> int:
        return self.weights.size

    @property
    def total_measure(self) -> float:
        return float(np.sum(self.weights))

    @property
    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Endpoints ``(u, v)`` with ``u < v`` of every edge, sorted."""
        return self._edge_u, self._edge_v

    @property
    def edges(self) -> list[tuple[int, int]]:
        return list(zip(self._edge_u.tolist(), self._edge_v.tolist()))

    @property
    def edge_count(self) -> int:
        return self._edge_u.size

    def degree(self, t: int) -> int:
        return len(self.neighbors[t])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.neighbors[u]

    def is_connected(self) -> bool:
        seen = np.zeros(self.n, dtype=bool)
        seen[0] = True
        queue = deque([0])
        while queue:
            u = queue.popleft()
            for v in self.neighbors[u]:
                if not seen[v]:
                    seen[v] = True
                    queue.append(v)
        return bool(seen.all())

    def measure(self, subset: Iterable[int] | None = None) -> float:
        if subset is None:
            return self.total_measure
        idx = _subset_index(subset, self.n)
        return float(np.sum(self.weights[idx]))


def _subset_index(subset: Iterable[int], n: int) -> np.ndarray:
    idx = np.unique(np.fromiter((int(s) for s in subset), dtype=np.intp))
    if idx.size and (idx[0] < 0 or idx[-1] >= n):
        raise GraphError(f"subset contains vertices outside 0..{n - 1}")
    return idx


def as_vertex_function(f, g: WeightedGraph) -> np.ndarray:
    """Validate ``f`` as one (or a column stack of) vertex function(s) on ``g``."""
    a = np.asarray(f, dtype=np.float64)
    if a.ndim not in (1, 2) or a.shape[0] != g.n:
        raise GraphError(f"vertex function has shape {a.shape}, graph has {g.n} vertices")
    if not np.all(np.isfinite(a)):
        raise GraphError("vertex function has non-finite entries")
    return a


def lp_norm(f, p: float, g: WeightedGraph, subset: Iterable[int] | None = None):
    """Weighted l^p norm ``(sum |f|^p mu)^(1/p)``; ``p = inf`` gives the plain sup.

    Returns a float for a single function, an array for a column stack.
    """
    p = float(p)
    if not p >= 1:
        raise GraphError(f"p must be >= 1 or inf, got {p}")
    a = as_vertex_function(f, g)
    w = g.weights
    if subset is not None:
        idx = _subset_index(subset, g.n)
        a, w = a[idx], w[idx]
    if a.ndim == 2:
        w = w[:, None]
    if a.shape[0] == 0:
        out = np.zeros(a.shape[1:])
    elif np.isinf(p):
        out = np.max(np.abs(a), axis=0)
    elif p == 1:
        out = np.sum(np.abs(a) * w, axis=0)
    else:
        # scale by the sup before powering so large p cannot overflow
        scale = np.max(np.abs(a), axis=0)
        safe = np.where(scale > 0, scale, 1.0)
        out = scale * np.sum((np.abs(a) / safe) ** p * w, axis=0) ** (1.0 / p)
    return float(out) if np.ndim(out) == 0 else out


def weighted_mean(f, g: WeightedGraph, subset: Iterable[int] | None = None):
    a = as_vertex_function(f, g)
    w = g.weights
    if subset is not None:
        idx = _subset_index(subset, g.n)
        if idx.size == 0:
            raise GraphError("weighted mean over an empty subset")
        a, w = a[idx], w[idx]
    out = np.tensordot(w, a, axes=(0, 0)) / np.sum(w)
    return float(out) if np.ndim(out) == 0 else out


def project_zero_mean(f, g: WeightedGraph) -> np.ndarray:
    """Return ``f - f_V``, which sums zero against ``mu``."""
    a = as_vertex_function(f, g)
    return a - weighted_mean(a, g)


def gradient_length(f, g: WeightedGraph, tree=None) -> np.ndarray:
    """``|grad f|(t) = sum_{s ~ t} |f(s) - f(t)|``.

    With ``tree`` given, adjacency is taken in the tree edges only.
    """
    a = as_vertex_function(f, g)
    if tree is None:
        u, v = g.edge_arrays
    else:
        if tree.n != g.n:
            raise GraphError("tree and graph have different vertex counts")
        u, v = tree.edge_arrays
    diff = np.abs(a[u] - a[v])
    out = np.zeros_like(a)
    np.add.at(out, u, diff)
    np.add.at(out, v, diff)
    return out


def restrict(f, subset: Iterable[int]) -> np.ndarray:
    """``f`` on ``subset`` and zero elsewhere."""
    a = np.asarray(f, dtype=np.float64)
    out = np.zeros_like(a)
    idx = _subset_index(subset, a.shape[0])
    out[idx] = a[idx]
    return out
