"""The Hardy-type averaging operator over shadows and checks of its bounds.

``T f(t)`` is the ``mu``-average of ``|f|`` over the shadow of ``t``. It is
bounded on l^inf with constant 1, weak (1,1) with constant 1, and bounded on
l^q for ``1 < q < inf`` with constant ``2 (q / (q - 1))^(1/q)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .graph_core import GraphError, WeightedGraph, as_vertex_function, lp_norm
from .tree import RootedTree, ShadowSummary, shadow_summary, subtree_sums

__all__ = [
    "HardyBoundReport",
    "apply_hardy",
    "distribution_measure",
    "hardy_constant",
    "verify_strong_infinity",
    "verify_weak_11",
    "verify_strong_qq",
]


@dataclass(frozen=True)
class HardyBoundReport:
    bound_kind: str  # "strong-infinity" | "weak-1-1" | "strong-qq"
    measured: float
    theoretical: float
    passed: bool
    q: float | None = None
    lam: float | None = None
    trial_seed: int | None = None

    @property
    def margin(self) -> float:
        return self.theoretical - self.measured


def apply_hardy(f, g: WeightedGraph, tree: RootedTree, summary: ShadowSummary | None = None) -> np.ndarray:
    a = as_vertex_function(f, g)
    if summary is None:
        summary = shadow_summary(g, tree)
    elif summary.shadow_measure.size != g.n:
        raise GraphError("shadow summary does not match the graph")
    w = g.weights if a.ndim == 1 else g.weights[:, None]
    sm = summary.shadow_measure if a.ndim == 1 else summary.shadow_measure[:, None]
    return subtree_sums(tree, np.abs(a) * w) / sm


def distribution_measure(f, lam: float, g: WeightedGraph) -> float:
    """``mu({t : |f(t)| > lam})``."""
    if not lam > 0:
        raise ValueError(f"level must be positive, got {lam}")
    a = as_vertex_function(f, g)
    return float(np.sum(g.weights[np.abs(a) > lam]))


def hardy_constant(q: float) -> float:
    """``(2^q q / (q - 1))^(1/q) = 2 (q / (q - 1))^(1/q)``."""
    q = float(q)
    if not 1 < q < np.inf:
        raise ValueError(f"q must lie in (1, inf), got {q}")
    return 2.0 * (q / (q - 1.0)) ** (1.0 / q)


def verify_strong_infinity(g, tree, summary, f, trial_seed=None) -> HardyBoundReport:
    tf = apply_hardy(f, g, tree, summary)
    measured = float(np.max(tf))
    theoretical = lp_norm(f, np.inf, g)
    passed = measured <= theoretical + 1e-12 * theoretical
    return HardyBoundReport("strong-infinity", measured, theoretical, passed, trial_seed=trial_seed)


def verify_weak_11(g, tree, summary, f, lams: Iterable[float], trial_seed=None) -> list[HardyBoundReport]:
    """One report per level; each passes iff ``mu(Tf > lam) < ||f||_1 / lam`` strictly.

    The zero function is rejected: both sides vanish and the strict
    inequality cannot hold.
    """
    a = as_vertex_function(f, g)
    if not np.any(a):
        raise ValueError("weak (1,1) check needs a function that is not identically zero")
    tf = apply_hardy(a, g, tree, summary)
    l1 = lp_norm(a, 1, g)
    out = []
    for lam in lams:
        measured = distribution_measure(tf, lam, g)
        theoretical = l1 / lam
        out.append(
            HardyBoundReport("weak-1-1", measured, theoretical, measured < theoretical, lam=float(lam), trial_seed=trial_seed)
        )
    return out


def verify_strong_qq(g, tree, summary, f, q: float, trial_seed=None) -> HardyBoundReport:
    k = hardy_constant(q)
    tf = apply_hardy(f, g, tree, summary)
    measured = lp_norm(tf, q, g)
    theoretical = k * lp_norm(f, q, g)
    return HardyBoundReport("strong-qq", measured, theoretical, measured <= theoretical, q=float(q), trial_seed=trial_seed)
