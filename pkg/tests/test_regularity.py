"""Tests for the pair regularity test, checked against brute-force subset enumeration."""

import itertools
import math

import numpy as np
import pytest

from szemeredi_codec.codec.errors import InvalidArgumentError
from szemeredi_codec.codec.graph import Graph, pair_density
from szemeredi_codec.codec.refinement import Partition
from szemeredi_codec.codec.regularity import (
    PairStats,
    average_degree,
    check_pair,
    count_irregular,
    neighborhood_deviation,
    pair_stats,
    set_deviation,
    sze_index,
)


def bipartite_graph(block):
    """Graph on ``2m`` vertices whose edges form ``block`` between the two halves."""
    block = np.asarray(block, dtype=float)
    m = block.shape[0]
    w = np.zeros((2 * m, 2 * m))
    w[:m, m:] = block
    w[m:, :m] = block.T
    return Graph(w), np.arange(m), np.arange(m, 2 * m)


def half_dense_pair(m):
    block = np.zeros((m, m))
    block[: m // 2, : m // 2] = 1.0
    return bipartite_graph(block)


def brute_force_witness(block, eps):
    """
    Largest ``|d(X, Y) - d(A, B)|`` over ``|X|, |Y| >= eps m``.

    For a fixed ``Y`` and ``|X| = s`` the extreme densities come from the
    ``s`` rows with the largest or smallest sums into ``Y``, so every ``Y``
    and every size are enumerated exactly.
    """
    m = block.shape[0]
    d = block.sum() / m**2
    least = math.ceil(eps * m - 1e-9)
    subsets = np.array(list(itertools.product([0, 1], repeat=m)), dtype=float)
    sizes_y = subsets.sum(axis=1)
    subsets, sizes_y = subsets[sizes_y >= least], sizes_y[sizes_y >= least]
    into_y = block @ subsets.T  # rows of A x subsets Y
    descending = -np.sort(-into_y, axis=0)
    ascending = np.sort(into_y, axis=0)
    sizes_x = np.arange(1, m + 1)[:, None]
    top = np.cumsum(descending, axis=0) / (sizes_x * sizes_y)
    bottom = np.cumsum(ascending, axis=0) / (sizes_x * sizes_y)
    usable = slice(least - 1, m)
    return max(np.abs(top[usable] - d).max(), np.abs(bottom[usable] - d).max())


class TestPairQuantities:
    def test_average_degree_complete(self):
        g, a, b = bipartite_graph(np.ones((2, 2)))
        assert average_degree(g, a, b) == pytest.approx(2.0)

    def test_average_degree_empty(self):
        g, a, b = bipartite_graph(np.zeros((3, 3)))
        assert average_degree(g, a, b) == 0.0

    def test_average_degree_half(self):
        g, a, b = half_dense_pair(4)
        g2, a2, b2 = bipartite_graph(np.tile([1.0, 0.0], (4, 2)))
        assert average_degree(g2, a2, b2) == pytest.approx(2.0)
        assert average_degree(g, a, b) == pytest.approx(1.0)

    @pytest.mark.parametrize("seed", range(5))
    def test_average_degree_is_m_times_density(self, seed):
        rng = np.random.default_rng(seed)
        g, a, b = bipartite_graph(rng.random((7, 7)) < 0.4)
        assert average_degree(g, a, b) == pytest.approx(7 * pair_density(g, a, b))

    def test_unequal_sizes_rejected(self):
        g, _, _ = half_dense_pair(4)
        with pytest.raises(InvalidArgumentError):
            average_degree(g, [0, 1], [4, 5, 6])

    def test_pair_stats(self):
        g, a, b = half_dense_pair(4)
        stats = pair_stats(g, a, b, order=100)
        assert stats.class_size == 4 and stats.scale == 100
        assert pair_stats(g, a, b).scale == 4

    def test_pair_stats_range(self):
        with pytest.raises(InvalidArgumentError):
            PairStats(avg_degree=5.0, class_size=4)

    def test_neighborhood_deviation_empty(self):
        g, a, b = bipartite_graph(np.zeros((3, 3)))
        stats = pair_stats(g, a, b)
        assert neighborhood_deviation(g, b[0], b[1], a, stats) == 0.0

    def test_neighborhood_deviation_complete(self):
        g, a, b = bipartite_graph(np.ones((2, 2)))
        stats = pair_stats(g, a, b)
        assert neighborhood_deviation(g, b[0], b[1], a, stats) == pytest.approx(0.0)

    def test_neighborhood_deviation_shared_neighbours(self):
        block = np.zeros((4, 4))
        block[:, :2] = 1.0
        g, a, b = bipartite_graph(block)
        stats = PairStats(avg_degree=1.0, class_size=4)
        assert neighborhood_deviation(g, b[0], b[1], a, stats) == pytest.approx(3.75)

    def test_neighborhood_deviation_needs_distinct(self):
        g, a, b = half_dense_pair(4)
        with pytest.raises(InvalidArgumentError):
            neighborhood_deviation(g, b[0], b[0], a, pair_stats(g, a, b))

    @pytest.mark.parametrize("block", [np.zeros((5, 5)), np.ones((5, 5))], ids=["empty", "full"])
    def test_set_deviation_vanishes(self, block):
        g, a, b = bipartite_graph(block)
        assert set_deviation(g, b, a, pair_stats(g, a, b)) == pytest.approx(0.0)

    def test_set_deviation_matches_double_loop(self):
        rng = np.random.default_rng(16)
        g, a, b = bipartite_graph(rng.random((16, 16)) < 0.5)
        stats = pair_stats(g, a, b)
        expected = sum(
            neighborhood_deviation(g, y1, y2, a, stats)
            for y1 in b
            for y2 in b
            if y1 != y2
        ) / len(b) ** 2
        assert set_deviation(g, b, a, stats) == pytest.approx(expected)

    def test_set_deviation_needs_two(self):
        g, a, b = half_dense_pair(4)
        with pytest.raises(InvalidArgumentError):
            set_deviation(g, b[:1], a, pair_stats(g, a, b))


class TestCheckPair:
    def test_sparse_pair_regular_by_condition_one(self):
        g, a, b = bipartite_graph(np.eye(16))
        verdict = check_pair(g, a, b, eps=0.5)
        assert verdict.is_regular and verdict.condition == 1
        assert verdict.cert_i.size == 0 and verdict.cert_j.size == 0
        np.testing.assert_array_equal(verdict.compl_i, a)

    @pytest.mark.parametrize("eps", [0.1, 0.25, 0.5, 0.9])
    def test_complete_pair_regular(self, eps):
        g, a, b = bipartite_graph(np.ones((8, 8)))
        verdict = check_pair(g, a, b, eps)
        assert verdict.is_regular
        assert verdict.condition is None

    @pytest.mark.parametrize("m", [4, 8, 12])
    def test_half_dense_pair_certificates_cover_dense_half(self, m):
        g, a, b = half_dense_pair(m)
        verdict = check_pair(g, a, b, eps=0.25)
        assert not verdict.is_regular
        np.testing.assert_array_equal(verdict.cert_i, a[: m // 2])
        np.testing.assert_array_equal(verdict.cert_j, b[: m // 2])
        assert brute_force_witness(g.weights[np.ix_(a, b)], 0.25) >= 0.25**4

    def test_condition_three_certificate_size(self):
        # Every vertex of B has the same degree, but B splits into two groups
        # with disjoint neighbourhoods, so only condition 3 can fire.
        block = np.zeros((8, 8))
        block[:4, :4] = 1.0
        block[4:, 4:] = 1.0
        g, a, b = bipartite_graph(block)
        eps = 0.5
        verdict = check_pair(g, a, b, eps)
        assert verdict.condition == 3
        assert verdict.cert_j.size >= eps**4 * 8 / 4
        # y0 is the lowest vertex of B; its neighbours and its twins are the certificates
        np.testing.assert_array_equal(verdict.cert_i, a[:4])
        np.testing.assert_array_equal(verdict.cert_j, b[1:4])

    def test_order_scales_thresholds(self):
        g, a, b = half_dense_pair(8)
        # With the graph order standing in, d̄ = 2 < 0.5³ * 100
        verdict = check_pair(g, a, b, eps=0.5, order=100)
        assert verdict.is_regular and verdict.condition == 1

    @pytest.mark.parametrize("seed", range(20))
    def test_class_scale_flags_every_noisy_pair(self, seed):
        # Degree spread of a p = 0.2 random pair (about 1.5 at m = 15) dwarfs
        # ε⁴m = 0.38, so only the graph order leaves such pairs regular.
        rng = np.random.default_rng(seed)
        g, a, b = bipartite_graph(rng.random((15, 15)) < 0.2)
        by_class = check_pair(g, a, b, eps=0.4)
        assert not by_class.is_regular and by_class.condition == 2
        by_graph = check_pair(g, a, b, eps=0.4, order=1000)
        assert by_graph.is_regular and by_graph.condition == 1

    def test_noisy_blocks_certified_by_cluster(self):
        # two planted clusters of 8 on each side, cross noise 0.1
        rng = np.random.default_rng(7)
        labels = np.repeat([0, 1], 8)
        block = np.where(labels[:, None] == labels[None, :], 1.0, rng.random((16, 16)) < 0.1)
        g, a, b = bipartite_graph(block)
        verdict = check_pair(g, a, b, eps=0.3)
        assert verdict.condition == 2
        for cert, side in ((verdict.cert_i, a), (verdict.cert_j, b)):
            assert len(set(labels[np.searchsorted(side, cert)])) == 1
        assert verdict.cert_j.size >= 4

    def test_invalid_arguments(self):
        g, a, b = half_dense_pair(4)
        with pytest.raises(InvalidArgumentError):
            check_pair(g, a, b, eps=0.0)
        with pytest.raises(InvalidArgumentError):
            check_pair(g, a[:1], b[:1], eps=0.3)
        with pytest.raises(InvalidArgumentError):
            check_pair(g, a, a, eps=0.3)

    def test_certificates_partition_classes(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            m = int(rng.integers(2, 11))
            g, a, b = bipartite_graph(rng.random((m, m)) < rng.uniform(0.1, 0.9))
            verdict = check_pair(g, a, b, eps=float(rng.uniform(0.1, 0.5)))
            assert verdict.is_regular == (verdict.condition in (1, None))
            for cert, compl, members in (
                (verdict.cert_i, verdict.compl_i, a),
                (verdict.cert_j, verdict.compl_j, b),
            ):
                assert np.intersect1d(cert, compl).size == 0
                np.testing.assert_array_equal(np.union1d(cert, compl), members)
                if not verdict.is_regular:
                    assert cert.size > 0

    def test_irregular_verdicts_confirmed_by_enumeration(self):
        rng = np.random.default_rng(2024)
        checked = 0
        for _ in range(200):
            m = int(rng.integers(2, 11))
            eps = float(rng.choice([0.2, 0.25, 0.3]))
            block = (rng.random((m, m)) < rng.uniform(0.1, 0.9)).astype(float)
            g, a, b = bipartite_graph(block)
            verdict = check_pair(g, a, b, eps)
            if verdict.is_regular:
                continue
            checked += 1
            assert brute_force_witness(block, eps) >= eps**4 - 1e-12
        assert checked > 100


class TestPartitionQuantities:
    @pytest.fixture
    def complete_graph(self):
        return Graph(np.ones((8, 8)) - np.eye(8))

    def test_sze_index_complete_two_classes(self, complete_graph):
        p = Partition((np.arange(4), np.arange(4, 8)), np.array([], dtype=int))
        assert sze_index(complete_graph, p) == pytest.approx(0.25)

    def test_sze_index_empty(self):
        p = Partition((np.arange(4), np.arange(4, 8)), np.array([], dtype=int))
        assert sze_index(Graph.empty(8), p) == 0.0

    def test_sze_index_needs_two_classes(self, complete_graph):
        with pytest.raises(InvalidArgumentError):
            sze_index(complete_graph, Partition((np.arange(8),), np.array([], dtype=int)))

    def test_sze_index_bounded(self):
        g = Graph(np.ones((64, 64)) - np.eye(64))
        p = Partition(tuple(np.arange(s, s + 2) for s in range(0, 64, 2)), [])
        assert sze_index(g, p) <= 0.5

    def test_count_irregular_all_complete(self, complete_graph):
        p = Partition(tuple(np.arange(s, s + 2) for s in range(0, 8, 2)), [])
        count, verdicts = count_irregular(complete_graph, p, eps=0.3)
        assert count == 0
        assert list(verdicts) == [(s, t) for s in range(4) for t in range(s + 1, 4)]

    def test_count_irregular_half_dense_pair(self):
        g, a, b = half_dense_pair(8)
        p = Partition((a, b), [])
        count, verdicts = count_irregular(g, p, eps=0.25)
        assert count == 1 and not verdicts[(0, 1)].is_regular

    def test_workers_do_not_change_verdicts(self):
        rng = np.random.default_rng(5)
        upper = np.triu(rng.random((40, 40)) < 0.3, 1).astype(float)
        g = Graph(upper + upper.T)
        p = Partition(tuple(np.arange(s, s + 8) for s in range(0, 40, 8)), [])
        serial = count_irregular(g, p, eps=0.3)
        threaded = count_irregular(g, p, eps=0.3, workers=4)
        assert serial[0] == threaded[0]
        assert list(serial[1]) == list(threaded[1])
        for pair in serial[1]:
            np.testing.assert_array_equal(serial[1][pair].cert_j, threaded[1][pair].cert_j)
