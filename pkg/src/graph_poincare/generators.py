"""Graph families: weighted k-ary trees, the log-weighted path, random graphs, grids.

Also the random test functions used by the property suites.
"""

from __future__ import annotations

from collections import deque

import numpy as np

from .graph_core import GraphError, WeightedGraph, project_zero_mean
from .tree import RootedTree, random_spanning_tree

__all__ = [
    "kary_tree",
    "log_path",
    "random_connected",
    "grid",
    "random_function",
    "FUNCTION_FAMILIES",
    "corpus",
]


def kary_tree(k: int, depth: int, alpha: float) -> tuple[WeightedGraph, RootedTree]:
    """Complete k-ary tree of the given depth with ``mu(t) = alpha ** dist(t, root)``.

    Vertices are numbered level by level; the children of ``v`` are
    ``k*v + 1 .. k*v + k``.
    """
    if k < 1 or depth < 0:
        raise ValueError("need k >= 1 and depth >= 0")
    if not 0 < alpha < 1.0 / k:
        raise ValueError(f"alpha must lie in (0, 1/k) = (0, {1.0 / k}), got {alpha}")
    sizes = [k**d for d in range(depth + 1)]
    n = sum(sizes)
    level = np.repeat(np.arange(depth + 1), sizes)
    weights = float(alpha) ** level
    parent = np.full(n, -1, dtype=np.intp)
    v = np.arange(1, n)
    parent[1:] = (v - 1) // k
    g = WeightedGraph.from_edges(weights, zip(v.tolist(), parent[1:].tolist()))
    return g, RootedTree.from_parent(parent, 0)


def log_path(N: int, gamma: float) -> tuple[WeightedGraph, RootedTree]:
    """Path on labels ``2..N`` rooted at ``2`` with ``mu(n) = 1 / (n ln(n)^gamma)``.

    Internal id ``i`` carries label ``i + 2``.
    """
    if N < 3:
        raise ValueError("need N >= 3")
    if not gamma > 1:
        raise ValueError(f"gamma must exceed 1, got {gamma}")
    labels = np.arange(2, N + 1, dtype=np.float64)
    weights = 1.0 / (labels * np.log(labels) ** gamma)
    n = labels.size
    g = WeightedGraph.from_edges(
        weights, ((i, i + 1) for i in range(n - 1)), labels=[str(i + 2) for i in range(n)]
    )
    parent = np.arange(-1, n - 1, dtype=np.intp)
    return g, RootedTree.from_parent(parent, 0)


WEIGHT_LAWS = ("uniform", "exp-depth")


def random_connected(
    n: int,
    edge_probability: float,
    weight_law: str = "uniform",
    seed: int = 0,
    low: float = 0.5,
    high: float = 2.0,
    decay: float = 0.5,
    min_weight: float = 0.0,
) -> WeightedGraph:
    """Random connected graph, deterministic per seed.

    A random recursive tree is laid down first so the graph is connected;
    every other vertex pair is then joined independently with probability
    ``edge_probability``. ``weight_law="uniform"`` draws ``mu`` from
    ``U(low, high)``; ``"exp-depth"`` uses ``max(decay ** d, min_weight)``
    with ``d`` the graph distance from vertex 0.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    if not 0 <= edge_probability <= 1:
        raise ValueError("edge_probability must lie in [0, 1]")
    if weight_law not in WEIGHT_LAWS:
        raise ValueError(f"weight_law must be one of {WEIGHT_LAWS}")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    edges = set()
    for i in range(1, n):
        j = int(rng.integers(i))
        a, b = int(perm[i]), int(perm[j])
        edges.add((min(a, b), max(a, b)))
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(iu.size) < edge_probability
    edges.update(zip(iu[keep].tolist(), ju[keep].tolist()))
    edges = sorted(edges)

    if weight_law == "uniform":
        if not 0 < low <= high:
            raise ValueError("uniform weights need 0 < low <= high")
        weights = rng.uniform(low, high, n)
    else:
        if not 0 < decay:
            raise ValueError("decay must be positive")
        adj: list[list[int]] = [[] for _ in range(n)]
        for a, b in edges:
            adj[a].append(b)
            adj[b].append(a)
        dist = np.full(n, -1)
        dist[0] = 0
        queue = deque([0])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        weights = np.maximum(float(decay) ** dist, min_weight)
    return WeightedGraph.from_edges(weights, edges)


def grid(nx: int, ny: int, weights=None) -> WeightedGraph:
    """``nx`` by ``ny`` lattice with 4-neighbour adjacency; vertex ``(i, j)`` has id ``i*ny + j``."""
    if nx < 1 or ny < 1:
        raise ValueError("grid dimensions must be positive")
    n = nx * ny
    if weights is None:
        w = np.ones(n)
    elif np.ndim(weights) == 0:
        w = np.full(n, float(weights))
    else:
        w = np.asarray(weights, dtype=np.float64).reshape(-1)
        if w.size != n:
            raise GraphError(f"grid needs {n} weights, got {w.size}")
    edges = []
    for i in range(nx):
        for j in range(ny):
            v = i * ny + j
            if i + 1 < nx:
                edges.append((v, v + ny))
            if j + 1 < ny:
                edges.append((v, v + 1))
    return WeightedGraph.from_edges(w, edges)


FUNCTION_FAMILIES = ("gaussian", "spikes", "subtree")


def random_function(
    g: WeightedGraph, tree: RootedTree, rng: np.random.Generator, family: str = "gaussian", zero_mean: bool = False
) -> np.ndarray:
    """Random test function from one of three families.

    ``gaussian`` is i.i.d. signed normal; ``spikes`` puts a few large values,
    preferring deep vertices; ``subtree`` is a signed multiple of the
    indicator of one shadow. None of them is identically zero unless
    ``zero_mean`` projects a constant away.
    """
    n = g.n
    if family == "gaussian":
        f = rng.standard_normal(n)
    elif family == "spikes":
        f = np.zeros(n)
        m = int(rng.integers(1, min(n, 3) + 1))
        depth = tree.depth.astype(np.float64) + 1.0
        pick = rng.choice(n, size=m, replace=False, p=depth / depth.sum())
        f[pick] = rng.standard_normal(m) * 10.0 ** rng.uniform(-2, 3, m)
        f[pick[f[pick] == 0]] = 1.0
    elif family == "subtree":
        t = int(rng.integers(n))
        sign = rng.choice([-1.0, 1.0])
        f = np.where(tree.shadow(t), sign * rng.uniform(0.1, 10.0), 0.0)
    else:
        raise ValueError(f"family must be one of {FUNCTION_FAMILIES}")
    if zero_mean:
        f = project_zero_mean(f, g)
    return f


def corpus(count: int, seed: int = 0, max_n: int = 200, min_n: int = 2):
    """Yield ``(graph, tree, seed)`` triples of seeded random graphs with random spanning trees.

    Sizes, edge densities and weight laws vary with the seed. Weights stay
    within a factor 2000 of each other so round-off, which grows like the
    John constant, stays far below the checked tolerances.
    """
    for i in range(count):
        ss = np.random.SeedSequence([seed, i])
        rng = np.random.default_rng(ss)
        n = int(rng.integers(min_n, max_n + 1))
        prob = float(rng.choice([0.0, 0.02, 0.05, 0.2]))
        law = WEIGHT_LAWS[int(rng.integers(2))]
        gseed = int(rng.integers(2**31))
        g = random_connected(n, prob, law, seed=gseed, decay=float(rng.uniform(0.2, 0.9)), min_weight=1e-3)
        tree = random_spanning_tree(g, seed=int(rng.integers(2**31)))
        yield g, tree, gseed
