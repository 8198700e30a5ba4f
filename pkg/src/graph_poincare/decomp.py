"""Decomposition of a function into zero-mean pieces supported on tree edges.

For each non-root vertex ``t`` with parent ``t_p`` let
``W(t) = sum_{k in S_t} f(k) mu(k)``. The piece ``f_t`` is supported on
``{t, t_p}`` with ``f_t(t) = W(t) / mu(t)`` and ``f_t(t_p) = -W(t) / mu(t_p)``.
Every piece sums zero against ``mu``, and the pieces add up to ``f`` exactly
when ``f`` itself sums zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph_core import WeightedGraph, as_vertex_function, lp_norm
from .reports import VerificationReport
from .tree import RootedTree, ShadowSummary, shadow_summary

__all__ = ["EdgeDecomposition", "signed_subtree_sums", "decompose", "reconstruct", "q_energy", "verify_energy_bound"]


@dataclass(frozen=True, eq=False)
class EdgeDecomposition:
    """One ``(value_at_t, value_at_parent)`` pair per non-root vertex ``t``."""

    n: int
    vertex: np.ndarray
    parent: np.ndarray
    at_vertex: np.ndarray
    at_parent: np.ndarray

    def __len__(self) -> int:
        return self.vertex.size

    def piece(self, t: int) -> np.ndarray:
        """The dense function ``f_t``."""
        (k,) = np.flatnonzero(self.vertex == t)
        out = np.zeros(self.n)
        out[self.vertex[k]] = self.at_vertex[k]
        out[self.parent[k]] = self.at_parent[k]
        return out

    def dense(self) -> np.ndarray:
        """All pieces as columns of an ``(n, n - 1)`` matrix."""
        out = np.zeros((self.n, self.vertex.size))
        cols = np.arange(self.vertex.size)
        out[self.vertex, cols] = self.at_vertex
        out[self.parent, cols] = self.at_parent
        return out

    def piece_sums(self, g: WeightedGraph) -> np.ndarray:
        """``sum_s f_t(s) mu(s)`` for every piece."""
        return self.at_vertex * g.weights[self.vertex] + self.at_parent * g.weights[self.parent]


def signed_subtree_sums(f, g: WeightedGraph, tree: RootedTree) -> np.ndarray:
    # kept apart from the Hardy accumulator: this one must not take |f|
    a = as_vertex_function(f, g)
    w = g.weights
    acc = (a * w).tolist()
    par = tree.parent.tolist()
    for v in tree.order[:0:-1].tolist():
        acc[par[v]] += acc[v]
    return np.asarray(acc)


def decompose(f, g: WeightedGraph, tree: RootedTree) -> EdgeDecomposition:
    if tree.n != g.n:
        raise ValueError("tree and graph have different vertex counts")
    a = as_vertex_function(f, g)
    if a.ndim != 1:
        raise ValueError("decompose takes a single vertex function")
    w = signed_subtree_sums(a, g, tree)
    t, tp = tree.edge_arrays
    return EdgeDecomposition(
        n=g.n,
        vertex=t,
        parent=tp,
        at_vertex=w[t] / g.weights[t],
        at_parent=-w[t] / g.weights[tp],
    )


def reconstruct(d: EdgeDecomposition, g: WeightedGraph | None = None, tree: RootedTree | None = None) -> np.ndarray:
    """``s -> sum_t f_t(s)``.

    Equals the source function when it sums zero; otherwise the root picks up
    the mean defect ``-(sum_{k != root} f(k) mu(k)) / mu(root)`` instead of
    ``f(root)``.
    """
    out = np.zeros(d.n)
    np.add.at(out, d.vertex, d.at_vertex)
    np.add.at(out, d.parent, d.at_parent)
    return out


def q_energy(d: EdgeDecomposition, g: WeightedGraph, q: float) -> float:
    """``sum_t ||f_t||_q^q``."""
    q = float(q)
    if not 1 < q < np.inf:
        raise ValueError(f"q must lie in (1, inf), got {q}")
    w = g.weights
    return float(np.sum(np.abs(d.at_vertex) ** q * w[d.vertex]) + np.sum(np.abs(d.at_parent) ** q * w[d.parent]))


def energy_bound(summary: ShadowSummary, q: float) -> float:
    """``c^q M 2^q q / (q - 1)``, the factor in front of ``||f||_q^q``."""
    q = float(q)
    if not 1 < q < np.inf:
        raise ValueError(f"q must lie in (1, inf), got {q}")
    return summary.john_constant**q * summary.degree_bound * 2.0**q * q / (q - 1.0)


def verify_energy_bound(
    f, g: WeightedGraph, tree: RootedTree, summary: ShadowSummary | None, q: float, seed: int | None = None
) -> VerificationReport:
    if summary is None:
        summary = shadow_summary(g, tree)
    measured = q_energy(decompose(f, g, tree), g, q)
    theoretical = energy_bound(summary, q) * lp_norm(f, q, g) ** q
    return VerificationReport(
        check_name="decomp.energy_bound",
        parameters={"q": float(q), "c": summary.john_constant, "M": summary.degree_bound, "n": g.n},
        measured=measured,
        theoretical=theoretical,
        passed=measured <= theoretical,
        seed=seed,
    )
