import math

import numpy as np
import pytest

from graph_poincare import shadow_summary
from graph_poincare.generators import (
    FUNCTION_FAMILIES,
    corpus,
    grid,
    kary_tree,
    log_path,
    random_connected,
    random_function,
)


def direct_kary_c(k, alpha, depth):
    """Max shadow ratio by summing the geometric level weights directly."""
    best = 1.0
    for level in range(depth + 1):
        own = alpha**level
        below = math.fsum(k**j * alpha ** (level + j) for j in range(depth - level + 1))
        best = max(best, below / own)
    return best


def direct_log_path(N, gamma):
    """max over n of mu(S_n)/mu(n) on the path 2..N, with fsum tail sums."""
    labels = range(2, N + 1)
    mu = [1.0 / (n * math.log(n) ** gamma) for n in labels]
    tail = 0.0
    best, arg = 0.0, None
    for n, m in zip(reversed(labels), reversed(mu)):
        tail += m
        if tail / m >= best:
            best, arg = tail / m, n
    return best, arg, math.fsum(mu)


class TestKary:
    def test_depth_zero(self):
        g, t = kary_tree(2, 0, 0.25)
        assert g.n == 1 and t.root == 0 and g.weights[0] == 1.0

    def test_depth_two(self):
        g, t = kary_tree(2, 2, 0.25)
        assert g.n == 7 and g.edge_count == 6
        assert g.total_measure == pytest.approx(1.75, rel=1e-15)
        assert shadow_summary(g, t).john_constant == pytest.approx(1.75, rel=1e-12)

    @pytest.mark.parametrize("k,alpha", [(2, 0.25), (3, 1 / 6), (2, 0.4), (4, 0.1)])
    def test_matches_direct_sum(self, k, alpha):
        prev = 0.0
        for d in range(0, 8):
            g, t = kary_tree(k, d, alpha)
            c = shadow_summary(g, t).john_constant
            assert c == pytest.approx(direct_kary_c(k, alpha, d), rel=1e-12)
            assert c <= 1 / (1 - k * alpha) * (1 + 1e-12)
            assert c >= prev
            prev = c

    def test_halving_family(self):
        for d in range(1, 9):
            g, t = kary_tree(3, d, 1 / 6)
            assert shadow_summary(g, t).john_constant == pytest.approx(2 - 2.0**-d, rel=1e-12)

    def test_children_numbering(self):
        g, t = kary_tree(3, 2, 0.2)
        assert list(t.children[0]) == [1, 2, 3]
        assert list(t.children[2]) == [7, 8, 9]
        assert shadow_summary(g, t).degree_bound == 4

    def test_errors(self):
        for args in [(2, 2, 0.5), (2, 2, 0.0), (0, 2, 0.1), (2, -1, 0.1)]:
            with pytest.raises(ValueError):
                kary_tree(*args)


class TestLogPath:
    FROZEN = {
        10**3: (319.2758289202976, 424, 1.9649884501113795),
        10**4: (3302.3495439877097, 4096, 2.0011697701606757),
    }

    @pytest.mark.parametrize("N", sorted(FROZEN))
    def test_frozen_values(self, N):
        g, t = log_path(N, 2.0)
        s = shadow_summary(g, t)
        c, label, total = self.FROZEN[N]
        assert s.john_constant == pytest.approx(c, rel=1e-10)
        assert g.labels[s.argmax] == str(label)
        assert g.total_measure == pytest.approx(total, rel=1e-12)

    @pytest.mark.parametrize("N", [10, 57, 500])
    def test_direct_oracle(self, N):
        g, t = log_path(N, 2.0)
        s = shadow_summary(g, t)
        c, label, total = direct_log_path(N, 2.0)
        assert s.john_constant == pytest.approx(c, rel=1e-11)
        assert g.labels[s.argmax] == str(label)
        assert g.total_measure == pytest.approx(total, rel=1e-13)

    def test_layout(self):
        g, t = log_path(5, 2.0)
        assert g.n == 4 and g.labels == ("2", "3", "4", "5")
        assert g.edges == [(0, 1), (1, 2), (2, 3)]
        assert t.root == 0
        assert g.weights[0] == pytest.approx(1 / (2 * math.log(2) ** 2))

    def test_growth_and_finite_measure(self):
        cs = []
        for N in (100, 1000, 10_000):
            g, t = log_path(N, 2.0)
            cs.append(shadow_summary(g, t).john_constant)
            # sum of 1/(n ln^2 n) over n >= 2 is about 2.11
            assert g.total_measure < 2.2
        assert cs == sorted(cs)
        assert cs[-1] > 20

    def test_errors(self):
        with pytest.raises(ValueError):
            log_path(2, 2.0)
        with pytest.raises(ValueError):
            log_path(100, 1.0)


class TestRandomConnected:
    def test_deterministic_and_connected(self):
        a = random_connected(200, 0.05, seed=42)
        b = random_connected(200, 0.05, seed=42)
        assert a.edges == b.edges
        np.testing.assert_array_equal(a.weights, b.weights)
        assert a.is_connected()
        assert random_connected(200, 0.05, seed=43).edges != a.edges

    def test_single_vertex(self):
        g = random_connected(1, 0.5, seed=0)
        assert g.n == 1 and g.edge_count == 0

    def test_tree_only(self):
        g = random_connected(50, 0.0, seed=3)
        assert g.edge_count == 49

    def test_weight_laws(self):
        g = random_connected(60, 0.05, "uniform", seed=1)
        assert g.weights.min() >= 0.5 and g.weights.max() <= 2.0
        h = random_connected(60, 0.0, "exp-depth", seed=1, decay=0.5, min_weight=1e-3)
        assert h.weights[0] == 1.0 and h.weights.min() >= 1e-3

    def test_errors(self):
        with pytest.raises(ValueError):
            random_connected(0, 0.1)
        with pytest.raises(ValueError):
            random_connected(5, 1.5)
        with pytest.raises(ValueError):
            random_connected(5, 0.1, "bogus")


class TestGrid:
    def test_shapes(self):
        assert grid(1, 1).n == 1
        g = grid(2, 2)
        assert g.n == 4 and g.edge_count == 4
        assert grid(3, 3).total_measure == 9.0
        assert grid(3, 4).edge_count == 3 * 3 + 2 * 4

    def test_weights(self):
        assert grid(2, 3, 0.5).total_measure == 3.0
        np.testing.assert_array_equal(grid(1, 3, [1, 2, 3]).weights, [1, 2, 3])

    def test_errors(self):
        with pytest.raises(ValueError):
            grid(0, 3)
        with pytest.raises(ValueError):
            grid(2, 2, [1.0, 2.0])


class TestFunctions:
    def test_families(self):
        rng = np.random.default_rng(0)
        for g, t, _ in corpus(10, seed=1, max_n=50):
            for family in FUNCTION_FAMILIES:
                f = random_function(g, t, rng, family)
                assert f.shape == (g.n,) and np.any(f != 0)
                z = random_function(g, t, rng, family, zero_mean=True)
                assert abs(np.dot(z, g.weights)) <= 1e-12 * max(np.abs(z).max(), 1.0) * g.total_measure

    def test_unknown_family(self):
        g, t = kary_tree(2, 1, 0.25)
        with pytest.raises(ValueError):
            random_function(g, t, np.random.default_rng(0), "bogus")


class TestCorpus:
    def test_deterministic(self):
        a = [(g.edges, g.weights.tolist(), t.parent.tolist()) for g, t, _ in corpus(5, seed=7)]
        b = [(g.edges, g.weights.tolist(), t.parent.tolist()) for g, t, _ in corpus(5, seed=7)]
        assert a == b

    def test_sizes(self):
        for g, t, _ in corpus(30, seed=2, max_n=40):
            assert 2 <= g.n <= 40
            t.check_spans(g)
