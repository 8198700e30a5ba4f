"""Randomized verification suites behind ``graph-poincare verify``.

A suite runs a number of seeded trials, each on one ``(graph, tree)`` case
with a fresh random function, and condenses every check into a single
:class:`VerificationReport` describing its worst trial. Per-trial rows are
kept for CSV export.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

import numpy as np

from .decomp import decompose, energy_bound, q_energy, reconstruct
from .generators import FUNCTION_FAMILIES, corpus, random_function
from .graph_core import WeightedGraph, lp_norm
from .hardy import apply_hardy, distribution_measure, hardy_constant
from .poincare import estimate_sharp_constant, global_ratio, local_edge_check, theoretical_constant
from .reports import VerificationReport
from .tree import RootedTree, ShadowSummary, shadow_summary

__all__ = ["Case", "TrialLog", "SUITES", "corpus_cases", "fixed_cases", "run_suite", "sharp_report"]

DEFAULT_QS = (1.5, 2.0, 3.0, 10.0)
DEFAULT_PS = (1.0, 2.0, 3.0)
WEAK_LEVELS = tuple(np.logspace(-1, 1, 20).tolist())
RECON_RTOL = 1e-10


@dataclass(frozen=True)
class Case:
    g: WeightedGraph
    tree: RootedTree
    summary: ShadowSummary
    seed: int | None = None


def fixed_cases(g: WeightedGraph, tree: RootedTree) -> Callable[[int], Case]:
    case = Case(g, tree, shadow_summary(g, tree))
    return lambda i: case


def corpus_cases(count: int, seed: int, max_n: int = 200) -> Callable[[int], Case]:
    """Cycle through ``count`` seeded random graphs with random spanning trees."""
    cases = [Case(g, t, shadow_summary(g, t), s) for g, t, s in corpus(count, seed, max_n=max_n)]
    return lambda i: cases[i % len(cases)]


@dataclass
class TrialLog:
    """Per-trial outcomes of one named check."""

    name: str
    params: dict
    rows: list = field(default_factory=list)  # (trial, n, measured, theoretical, passed)

    def add(self, trial: int, n: int, measured: float, theoretical: float, passed: bool) -> None:
        self.rows.append((trial, n, float(measured), float(theoretical), bool(passed)))

    def report(self, seed: int | None, runtime_ms: int = 0) -> VerificationReport:
        if not self.rows:
            return VerificationReport(self.name, {**self.params, "trials": 0, "violations": 0}, 0.0, 0.0, True, seed, runtime_ms)
        violations = sum(not r[4] for r in self.rows)

        def badness(r):
            # failures first, then the tightest measured / theoretical ratio
            _, _, m, t, ok = r
            return (not ok, m / t if t > 0 else (np.inf if m > 0 else 0.0))

        worst = max(self.rows, key=badness)
        params = {**self.params, "trials": len(self.rows), "violations": violations, "worst_trial": worst[0]}
        return VerificationReport(self.name, params, worst[2], worst[3], violations == 0, seed, runtime_ms)


def _trial_rng(seed: int, i: int) -> np.random.Generator:
    return np.random.default_rng([seed, i])


def _nonzero_function(case: Case, rng, i: int, zero_mean: bool):
    """Random function for trial ``i``; ``None`` when a zero-mean draw degenerates."""
    f = random_function(case.g, case.tree, rng, FUNCTION_FAMILIES[i % len(FUNCTION_FAMILIES)])
    if not zero_mean:
        return f
    sup = np.max(np.abs(f))
    f0 = f - np.dot(f, case.g.weights) / case.g.total_measure
    # a constant projects to round-off noise, which is not a meaningful test input
    if np.max(np.abs(f0)) <= 1e-9 * sup:
        return None
    return f0


def hardy_suite(cases, trials: int, seed: int, qs: Sequence[float] = DEFAULT_QS, lams=WEAK_LEVELS) -> list[TrialLog]:
    strong_inf = TrialLog("hardy.strong_infinity", {"constant": 1.0})
    weak = TrialLog("hardy.weak_1_1", {"levels": len(lams), "level_min": min(lams), "level_max": max(lams)})
    strong_q = {q: TrialLog("hardy.strong_qq", {"q": float(q), "constant": hardy_constant(q)}) for q in qs}
    for i in range(trials):
        case = cases(i)
        g = case.g
        f = _nonzero_function(case, _trial_rng(seed, i), i, zero_mean=False)
        f = f / np.max(np.abs(f))  # T is homogeneous; the level grid is relative to sup|f| = 1
        tf = apply_hardy(f, g, case.tree, case.summary)
        m, t = float(np.max(tf)), lp_norm(f, np.inf, g)
        strong_inf.add(i, g.n, m, t, m <= t * (1 + 1e-12))
        l1 = lp_norm(f, 1, g)
        for lam in lams:
            m = distribution_measure(tf, lam, g)
            weak.add(i, g.n, m, l1 / lam, m < l1 / lam)
        for q, log in strong_q.items():
            m, t = lp_norm(tf, q, g), hardy_constant(q) * lp_norm(f, q, g)
            log.add(i, g.n, m, t, m <= t)
    return [strong_inf, weak, *strong_q.values()]


def decomp_suite(cases, trials: int, seed: int, qs: Sequence[float] = DEFAULT_QS) -> list[TrialLog]:
    recon = TrialLog("decomp.reconstruction", {"rtol": RECON_RTOL})
    zsum = TrialLog("decomp.zero_sum", {"rtol": RECON_RTOL})
    energy = {q: TrialLog("decomp.energy_bound", {"q": float(q)}) for q in qs}
    for i in range(trials):
        case = cases(i)
        g = case.g
        f = _nonzero_function(case, _trial_rng(seed, i), i, zero_mean=True)
        if f is None:
            continue
        d = decompose(f, g, case.tree)
        tol = RECON_RTOL * float(np.max(np.abs(f))) * g.total_measure
        err = float(np.max(np.abs(reconstruct(d) - f)))
        recon.add(i, g.n, err, tol, err <= tol)
        zs = float(np.max(np.abs(d.piece_sums(g)))) if len(d) else 0.0
        zsum.add(i, g.n, zs, tol, zs <= tol)
        for q, log in energy.items():
            if case.summary.degree_bound == 0:
                continue
            m = q_energy(d, g, q)
            t = energy_bound(case.summary, q) * lp_norm(f, q, g) ** q
            log.add(i, g.n, m, t, m <= t)
    return [recon, zsum, *energy.values()]


def poincare_suite(cases, trials: int, seed: int, ps: Sequence[float] = DEFAULT_PS) -> list[TrialLog]:
    logs = {
        (p, mode): TrialLog("poincare.global", {"p": float(p), "gradient_mode": mode})
        for p in ps
        for mode in ("full", "tree")
    }
    for i in range(trials):
        case = cases(i)
        if case.g.n < 2:
            continue
        f = _nonzero_function(case, _trial_rng(seed, i), i, zero_mean=True)
        if f is None:
            continue
        for (p, mode), log in logs.items():
            r = global_ratio(f, case.g, p, mode, case.tree, case.summary)
            log.add(i, case.g.n, r.ratio, r.theoretical_cp, r.passes)
    return list(logs.values())


def local_suite(cases, trials: int, seed: int, ps: Sequence[float] = (1.0, 1.5, 2.0, 3.0, 10.0)) -> list[TrialLog]:
    logs = {p: TrialLog("poincare.local", {"p": float(p), "constant": 1.0}) for p in ps}
    for i in range(trials):
        case = cases(i)
        g, tree = case.g, case.tree
        if g.n < 2:
            continue
        rng = _trial_rng(seed, i)
        t = int(rng.choice(tree.non_root))
        tp = int(tree.parent[t])
        f = rng.standard_normal(g.n)
        f[t] = rng.standard_normal() * 10.0 ** rng.uniform(-3, 3)
        f[tp] = -f[t] * g.weights[t] / g.weights[tp]
        for p, log in logs.items():
            r = local_edge_check(f, g, tree, t, p)
            log.add(i, g.n, r.ratio, r.theoretical_cp, r.passes)
    return list(logs.values())


SUITES = {
    "hardy": hardy_suite,
    "decomp": decomp_suite,
    "poincare": poincare_suite,
    "local": local_suite,
}


def run_suite(name: str, cases, trials: int, seed: int, timing: bool = False, **kw) -> Iterator[tuple[VerificationReport, TrialLog]]:
    """Run suite ``name`` and yield ``(summary report, trial log)`` per check.

    ``runtime_ms`` is zero unless ``timing`` is set, which keeps repeated
    runs byte-identical.
    """
    start = time.perf_counter()
    logs = SUITES[name](cases, trials, seed, **kw)
    ms = int(round((time.perf_counter() - start) * 1000)) if timing else 0
    for log in logs:
        yield log.report(seed, ms), log


def sharp_report(
    g: WeightedGraph, tree: RootedTree, p: float, restarts: int, iters: int, seed: int, gradient_mode: str = "full", timing: bool = False
) -> tuple[VerificationReport, np.ndarray]:
    start = time.perf_counter()
    est, witness = estimate_sharp_constant(g, tree, p, restarts, iters, seed, gradient_mode)
    s = shadow_summary(g, tree)
    bound = theoretical_constant(s.john_constant, max(s.degree_bound, 1), p)
    ms = int(round((time.perf_counter() - start) * 1000)) if timing else 0
    rep = VerificationReport(
        "poincare.sharp",
        {"p": float(p), "restarts": restarts, "iters": iters, "gradient_mode": gradient_mode,
         "c": s.john_constant, "M": s.degree_bound, "n": g.n},
        est, bound, est <= bound, seed, ms,
    )
    return rep, witness
