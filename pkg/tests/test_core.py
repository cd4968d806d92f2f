import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from planted_clique.core import (CliqueIndicator, Mask, MaskedGraph, ProblemParams, RngStream,
                                 boundary_gamma, default_degree, full_mask, sample_adjacency,
                                 sample_clique, sample_null, sample_planted)
from planted_clique.errors import InvalidParametersError

from conftest import masks


class TestProblemParams:
    def test_from_exponents_rounds_k(self):
        p = ProblemParams.from_exponents(10**4, 0.25, 0.9)
        assert p.k == 1000
        assert p.mask_budget == round((10**4) ** 0.9)
        assert p.boundary_gamma == 0.75
        assert p.epsilon == pytest.approx(0.15)

    def test_delta_derived_from_k(self):
        p = ProblemParams(10**4, 1000)
        assert p.delta == pytest.approx(0.25)

    @pytest.mark.parametrize("kw", [dict(n=0, k=1), dict(n=5, k=0), dict(n=5, k=6),
                                    dict(n=5, k=2, D=-1), dict(n=5, k=2, ell=-1)])
    def test_rejects_invalid(self, kw):
        with pytest.raises(InvalidParametersError):
            ProblemParams(**kw)

    def test_default_degree(self):
        assert default_degree(2) == 1
        assert default_degree(10**6) == math.ceil(math.log(1e6) ** 2 / math.log(math.log(1e6)))
        assert ProblemParams(100, 10).D == default_degree(100)

    def test_boundary_snaps_float_noise(self):
        assert boundary_gamma(0.2) == 0.9
        assert ProblemParams.from_exponents(2000, 0.2, 0.9).epsilon == 0.0


class TestMask:
    def test_canonicalises_and_sorts(self):
        M = Mask.from_pairs(5, [(3, 1), (2, 5), (1, 2)])
        assert M.edges.tolist() == [[1, 2], [1, 3], [2, 5]]

    @pytest.mark.parametrize("pairs", [[(1, 1)], [(1, 2), (2, 1)], [(0, 2)], [(1, 6)]])
    def test_rejects_bad_edges(self, pairs):
        with pytest.raises(InvalidParametersError):
            Mask.from_pairs(5, pairs)

    @given(masks(max_n=15))
    def test_degree_invariants(self, M):
        assert M.degree.sum() == 2 * len(M)
        endpoints = set(M.edges.ravel().tolist())
        assert set(M.vertices.tolist()) == endpoints
        for v in range(1, M.n + 1):
            assert M.degree[v] == sum(v in e for e in M.edge_set())

    def test_immutable(self):
        M = Mask.from_pairs(3, [(1, 2)])
        with pytest.raises(ValueError):
            M.edges[0, 0] = 3


class TestSampleClique:
    def test_unique_subset(self):
        K = sample_clique(5, 5, None, RngStream(1))
        assert K.members.tolist() == [1, 2, 3, 4, 5]

    def test_uniform_over_pairs(self):
        gen = RngStream(7).generator()
        counts = {}
        for _ in range(60000):
            key = tuple(sample_clique(4, 2, None, gen).members.tolist())
            counts[key] = counts.get(key, 0) + 1
        assert set(counts) == set(itertools.combinations(range(1, 5), 2))
        sigma = math.sqrt(60000 * (1 / 6) * (5 / 6))
        assert all(abs(c - 10000) <= 3 * sigma for c in counts.values())
        assert stats.chisquare(list(counts.values())).pvalue > 1e-3

    def test_restricted_support(self):
        gen = RngStream(3).generator()
        seen = {tuple(sample_clique(6, 2, [1, 2, 3], gen).members.tolist()) for _ in range(3000)}
        assert seen == {(1, 2), (1, 3), (2, 3)}

    def test_k_larger_than_subset(self):
        with pytest.raises(InvalidParametersError):
            sample_clique(6, 4, [1, 2, 3], RngStream(0))

    @given(st.integers(1, 30), st.data())
    def test_members_are_k_distinct(self, n, data):
        k = data.draw(st.integers(0, n))
        K = sample_clique(n, k, None, RngStream(data.draw(st.integers(0, 2**32))))
        assert K.k == k and len(set(K.members.tolist())) == k
        assert all(1 <= v <= n for v in K.members.tolist())


class TestSampleNull:
    def test_empty_mask(self):
        assert sample_null(Mask.empty(5), RngStream(0)).values.size == 0

    def test_single_edge_frequency(self):
        M = Mask.from_pairs(2, [(1, 2)])
        gen = RngStream(11).generator()
        vals = np.array([sample_null(M, gen).values[0] for _ in range(100000)])
        freq = (vals == 1).mean()
        assert abs(freq - 0.5) <= 3 * math.sqrt(0.25 / 1e5)

    def test_sum_clt(self):
        M = Mask.from_pairs(101, [(1, j) for j in range(2, 102)])
        gen = RngStream(5).generator()
        sums = np.array([sample_null(M, gen).values.astype(int).sum() for _ in range(10000)])
        assert abs(sums.mean()) <= 3 * math.sqrt(100 / 10**4)


class TestSamplePlanted:
    def test_whole_graph_is_clique(self):
        M = full_mask(6)
        Y, K = sample_planted(ProblemParams(6, 6), M, None, RngStream(0))
        assert (Y.values == 1).all()

    def test_seven_twelfths(self):
        M = Mask.from_pairs(4, [(1, 2)])
        p = ProblemParams(4, 2)
        gen = RngStream(21).generator()
        vals = np.array([sample_planted(p, M, None, gen)[0].values[0] for _ in range(100000)])
        assert abs((vals == 1).mean() - 7 / 12) <= 3 * math.sqrt((7 / 12) * (5 / 12) / 1e5)

    def test_edge_outside_subset_is_fair(self):
        M = Mask.from_pairs(4, [(1, 2)])
        p = ProblemParams(4, 2)
        gen = RngStream(22).generator()
        vals = np.array([sample_planted(p, M, [3, 4], gen)[0].values[0] for _ in range(40000)])
        assert abs((vals == 1).mean() - 0.5) <= 3 * math.sqrt(0.25 / 4e4)

    @given(st.integers(2, 12), st.data())
    def test_full_mask_has_clique_edges(self, n, data):
        k = data.draw(st.integers(1, n))
        Y, K = sample_planted(ProblemParams(n, k), full_mask(n), None,
                              RngStream(data.draw(st.integers(0, 1000))))
        assert (Y.values == 1).sum() >= k * (k - 1) // 2
        ind = K.indicator()
        inside = ind[Y.mask.edges[:, 0]] & ind[Y.mask.edges[:, 1]]
        assert (Y.values[inside] == 1).all()

    def test_k_larger_than_subset(self):
        with pytest.raises(InvalidParametersError):
            sample_planted(ProblemParams(4, 3), Mask.empty(4), [1, 2], RngStream(0))


class TestRngStream:
    def test_reproducible(self):
        M = full_mask(10)
        a = sample_planted(ProblemParams(10, 4), M, None, RngStream(99, 3))
        b = sample_planted(ProblemParams(10, 4), M, None, RngStream(99, 3))
        assert np.array_equal(a[0].values, b[0].values) and a[1] == b[1]

    def test_streams_differ(self):
        draws = {tuple(RngStream(99, i).generator().integers(0, 2**32, 4).tolist()) for i in range(50)}
        assert len(draws) == 50

    def test_negative_index(self):
        with pytest.raises(InvalidParametersError):
            RngStream(0, -1)


def test_masked_graph_validates():
    M = Mask.from_pairs(3, [(1, 2)])
    with pytest.raises(InvalidParametersError):
        MaskedGraph(M, [0])
    with pytest.raises(InvalidParametersError):
        MaskedGraph(M, [1, 1])


def test_adjacency_is_symmetric_pm1():
    A = sample_adjacency(ProblemParams(30, 10), True, RngStream(2))
    assert np.array_equal(A, A.T) and (np.diag(A) == 0).all()
    off = A[~np.eye(30, dtype=bool)]
    assert set(np.unique(off).tolist()) <= {-1, 1}


def test_clique_indicator():
    K = CliqueIndicator(5, [4, 2])
    assert K.members.tolist() == [2, 4] and K.indicator().tolist() == [False, False, True, False, True, False]
