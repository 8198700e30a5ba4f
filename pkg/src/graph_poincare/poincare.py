"""Local and global l^p Poincare inequalities and sharp-constant estimates.

For ``f`` summing zero against ``mu`` the global inequality reads
``||f||_p <= C_P || |grad f| ||_p`` with ``C_P <= 2c`` for ``p = 1`` and
``C_P <= 2 c M p^(1 - 1/p)`` for ``p > 1``, where ``c`` is the John constant
of a rooted spanning tree and ``M`` its maximum degree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph_core import (
    GraphError,
    WeightedGraph,
    as_vertex_function,
    gradient_length,
    lp_norm,
    project_zero_mean,
)
from .tree import RootedTree, ShadowSummary, build_spanning_tree, shadow_summary

__all__ = [
    "PoincareReport",
    "ZERO_MEAN_RTOL",
    "theoretical_constant",
    "local_edge_check",
    "global_ratio",
    "poincare_ratio",
    "estimate_sharp_constant",
    "brute_force_sharp_constant",
    "dirichlet_bracket",
]

ZERO_MEAN_RTOL = 1e-10
RATIO_RTOL = 1e-12
GRADIENT_MODES = ("full", "tree")


@dataclass(frozen=True)
class PoincareReport:
    p: float
    ratio: float
    theoretical_cp: float
    john_constant_c: float | None
    degree_bound_M: int | None
    gradient_mode: str
    passes: bool


def theoretical_constant(c: float, M: int, p: float) -> float:
    if not c >= 1:
        raise ValueError(f"John constant must be >= 1, got {c}")
    if not M >= 1:
        raise ValueError(f"degree bound must be >= 1, got {M}")
    p = float(p)
    if not 1 <= p < math.inf:
        raise ValueError(f"p must lie in [1, inf), got {p}")
    if p == 1:
        return 2.0 * c
    return c * M * 2.0 * p ** (1.0 - 1.0 / p)


def _mean_defect_ok(values, weights, scale_sup: float) -> bool:
    return abs(float(np.dot(values, weights))) <= ZERO_MEAN_RTOL * scale_sup * float(np.sum(weights))


def local_edge_check(f, g: WeightedGraph, tree: RootedTree, t: int, p: float) -> PoincareReport:
    """``||f||_p <= || |grad (f restricted to {t, t_p})| ||_p`` on one tree segment."""
    a = as_vertex_function(f, g)
    if not 0 <= t < g.n or t == tree.root:
        raise GraphError(f"vertex {t} is not a non-root vertex of the tree")
    tp = int(tree.parent[t])
    seg = np.array([t, tp])
    vals, w = a[seg], g.weights[seg]
    sup = float(np.max(np.abs(vals)))
    if not _mean_defect_ok(vals, w, sup):
        raise ValueError(f"function does not sum zero on segment ({t}, {tp})")
    if sup == 0:
        ratio = 0.0
    else:
        diff = abs(vals[0] - vals[1])
        p = float(p)
        num = float(np.sum(np.abs(vals) ** p * w)) ** (1.0 / p)
        den = diff * float(np.sum(w)) ** (1.0 / p)
        ratio = num / den
    return PoincareReport(float(p), ratio, 1.0, None, None, "segment", ratio <= 1.0 + RATIO_RTOL)


def poincare_ratio(f, g: WeightedGraph, p: float, tree: RootedTree | None = None):
    """``||f||_p / || |grad f| ||_p`` without any precondition checks.

    ``tree`` switches the gradient to tree edges. Accepts column stacks.
    """
    return lp_norm(f, p, g) / lp_norm(gradient_length(f, g, tree), p, g)


def global_ratio(
    f,
    g: WeightedGraph,
    p: float,
    gradient_mode: str = "full",
    tree: RootedTree | None = None,
    summary: ShadowSummary | None = None,
) -> PoincareReport:
    """Measure the global ratio and compare it to the John-constant bound.

    The bound is taken from ``tree`` (breadth-first from vertex 0 when not
    given). ``gradient_mode="tree"`` measures the gradient on tree edges
    only, which is the stronger statement.
    """
    if gradient_mode not in GRADIENT_MODES:
        raise ValueError(f"gradient_mode must be one of {GRADIENT_MODES}")
    a = as_vertex_function(f, g)
    sup = float(np.max(np.abs(a)))
    if sup == 0:
        raise ValueError("global Poincare ratio is undefined for the zero function")
    if not _mean_defect_ok(a, g.weights, sup):
        raise ValueError("function does not sum zero with respect to mu; use project_zero_mean first")
    if tree is None:
        tree = build_spanning_tree(g, 0)
    if summary is None:
        summary = shadow_summary(g, tree)
    ratio = float(poincare_ratio(a, g, p, tree if gradient_mode == "tree" else None))
    cp = theoretical_constant(summary.john_constant, summary.degree_bound, p)
    return PoincareReport(
        float(p), ratio, cp, summary.john_constant, summary.degree_bound, gradient_mode, ratio <= cp * (1 + RATIO_RTOL)
    )


def _log_ratio_subgradient(f, g: WeightedGraph, p: float, eu, ev):
    """A subgradient of ``log ||f||_p - log || |grad f| ||_p`` (sign(0) = 0)."""
    w = g.weights
    af = np.abs(f)
    num_p = np.sum(af**p * w)
    d_num = np.sign(f) * af ** (p - 1) * w / num_p
    diff = f[eu] - f[ev]
    grad = np.zeros_like(f)
    np.add.at(grad, eu, np.abs(diff))
    np.add.at(grad, ev, np.abs(diff))
    den_p = np.sum(grad**p * w)
    wt = grad ** (p - 1) * w / den_p
    coef = (wt[eu] + wt[ev]) * np.sign(diff)
    d_den = np.zeros_like(f)
    np.add.at(d_den, eu, coef)
    np.add.at(d_den, ev, -coef)
    return d_num - d_den


def estimate_sharp_constant(
    g: WeightedGraph,
    tree: RootedTree | None = None,
    p: float = 2.0,
    restarts: int = 8,
    iters: int = 500,
    seed: int = 0,
    gradient_mode: str = "full",
    step: float = 0.5,
) -> tuple[float, np.ndarray]:
    """Lower estimate of the best Poincare constant by projected subgradient ascent.

    Maximizes ``||f||_p / || |grad f| ||_p`` over nonzero zero-mean ``f``.
    Each restart starts from a Gaussian vector, steps along the normalized
    subgradient with step ``step / sqrt(k)``, re-projects to zero mean and
    rescales to the Euclidean unit sphere. Restart ``i`` uses its own stream
    derived from ``(seed, i)``, so more restarts never lower the result.
    Returns the best ratio seen and its witness.
    """
    p = float(p)
    if not 1 <= p < math.inf:
        raise ValueError(f"p must lie in [1, inf), got {p}")
    if g.n < 2:
        raise ValueError("need at least two vertices")
    if restarts < 1 or iters < 0:
        raise ValueError("restarts must be >= 1 and iters >= 0")
    if gradient_mode not in GRADIENT_MODES:
        raise ValueError(f"gradient_mode must be one of {GRADIENT_MODES}")
    if gradient_mode == "tree":
        if tree is None:
            raise ValueError("tree gradient mode needs a tree")
        eu, ev = tree.edge_arrays
        gtree = tree
    else:
        eu, ev = g.edge_arrays
        gtree = None

    def ratio(x):
        return float(poincare_ratio(x, g, p, gtree))

    best_r, best_f = -1.0, None
    for i in range(restarts):
        rng = np.random.default_rng([seed, i])
        f = project_zero_mean(rng.standard_normal(g.n), g)
        f /= np.linalg.norm(f)
        r = ratio(f)
        if r > best_r:
            best_r, best_f = r, f.copy()
        for k in range(1, iters + 1):
            d = _log_ratio_subgradient(f, g, p, eu, ev)
            nd = np.linalg.norm(d)
            if not nd > 0:
                break
            f = project_zero_mean(f + (step / math.sqrt(k)) * d / nd, g)
            nf = np.linalg.norm(f)
            if not nf > 0:
                break
            f /= nf
            r = ratio(f)
            if r > best_r:
                best_r, best_f = r, f.copy()
    return best_r, best_f


def _zero_mean_basis(g: WeightedGraph) -> np.ndarray:
    """Orthonormal basis (columns) of ``{x : sum x mu = 0}``."""
    _, _, vt = np.linalg.svd(g.weights[None, :])
    return vt[1:].T


def brute_force_sharp_constant(
    g: WeightedGraph, p: float = 2.0, resolution: int = 256, tree: RootedTree | None = None
) -> float:
    """Grid search of the ratio over the zero-mean unit sphere, for ``n <= 4``.

    The sphere has dimension at most 2. Grids are nested when the resolution
    is multiplied by an integer, so the result never decreases under such
    refinement.
    """
    if g.n < 2 or g.n > 4:
        raise ValueError(f"brute force supports 2 <= n <= 4 vertices, got {g.n}")
    if resolution < 1:
        raise ValueError("resolution must be positive")
    basis = _zero_mean_basis(g)
    if g.n == 2:
        pts = basis
    elif g.n == 3:
        th = np.pi * np.arange(resolution) / resolution
        pts = basis @ np.vstack([np.cos(th), np.sin(th)])
    else:
        # one hemisphere suffices since the ratio is even in f
        phi = 0.5 * np.pi * np.arange(resolution + 1) / resolution
        th = np.pi * np.arange(2 * resolution) / resolution
        P, T = np.meshgrid(phi, th, indexing="ij")
        P, T = P.ravel(), T.ravel()
        pts = basis @ np.vstack([np.cos(P), np.sin(P) * np.cos(T), np.sin(P) * np.sin(T)])
    return float(np.max(poincare_ratio(pts, g, p, tree)))


def dirichlet_bracket(g: WeightedGraph, tree: RootedTree | None = None) -> tuple[float, float]:
    """Bounds ``(lower, upper)`` on the best ``p = 2`` constant from two quadratic forms.

    Per vertex, ``sum_s d_s^2 <= (sum_s |d_s|)^2 <= deg(t) sum_s d_s^2``, so
    ``|| |grad f| ||_2^2`` lies between the edge forms with coefficients
    ``mu(u) + mu(v)`` and ``deg(u) mu(u) + deg(v) mu(v)``. The smallest
    nonzero generalized eigenvalue ``lam`` of each form against ``diag(mu)``
    gives ``1 / sqrt(lam)``.
    """
    if g.n < 2:
        raise ValueError("need at least two vertices")
    u, v = (tree.edge_arrays if tree is not None else g.edge_arrays)
    w = g.weights
    deg = np.zeros(g.n)
    np.add.at(deg, u, 1.0)
    np.add.at(deg, v, 1.0)

    def smallest_nonzero(coef):
        lap = np.zeros((g.n, g.n))
        np.add.at(lap, (u, v), -coef)
        np.add.at(lap, (v, u), -coef)
        lap[np.diag_indices(g.n)] = -lap.sum(axis=1)
        s = 1.0 / np.sqrt(w)
        vals = np.linalg.eigvalsh(s[:, None] * lap * s[None, :])
        return vals[1]  # vals[0] = 0 on the mu-constant direction

    upper = 1.0 / math.sqrt(smallest_nonzero(w[u] + w[v]))
    lower = 1.0 / math.sqrt(smallest_nonzero(deg[u] * w[u] + deg[v] * w[v]))
    return lower, upper
