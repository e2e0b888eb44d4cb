import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sigmatch.binomial import binom_cdf
from sigmatch.graph import VertexSet, from_edge_list
from sigmatch.matcher import (
    ParamError, agreement_threshold, count_threshold, first_generation, potential_match,
    sample_index_set, second_generation, signatures, split_vertices,
)
from sigmatch.model import ModelParams, make_rng, sample_correlated

from conftest import random_graph


def complete(n):
    return from_edge_list(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


class TestSplit:
    def test_sizes(self):
        sp = split_vertices(10, 0.4, make_rng(0))
        assert (sp.a.size, sp.b.size, sp.c.size) == (6, 2, 2)

    def test_floor_goes_to_a(self):
        sp = split_vertices(10, 0.45, make_rng(0))
        assert (sp.a.size, sp.b.size, sp.c.size) == (6, 2, 2)

    def test_partition(self):
        sp = split_vertices(57, 0.3, make_rng(3))
        allv = np.concatenate([sp.a.members, sp.b.members, sp.c.members])
        assert sorted(allv.tolist()) == list(range(57))

    def test_empty_b_rejected(self):
        with pytest.raises(ParamError):
            split_vertices(10, 0.1, make_rng(0))

    def test_uniform_membership(self):
        rng = make_rng(77)
        draws = 100_000
        counts = np.zeros(10)
        for _ in range(draws):
            counts[split_vertices(10, 0.4, rng).b.members] += 1
        sigma = np.sqrt(draws * 0.2 * 0.8)
        assert np.all(np.abs(counts - 0.2 * draws) < 3 * sigma)


class TestFirstGeneration:
    def test_single_bucket(self):
        g = random_graph(30, 0.3, seed=0)
        a = VertexSet(30, range(0, 30, 2))
        assert first_generation(g, a, 0.3, 1) == [a]

    def test_complete_graph_top_bucket(self):
        # every degree is 4 and F_{5,1/2}(4) = 31/32 lies in (1/2, 1]
        assert binom_cdf(5, 0.5, 4) == pytest.approx(31 / 32)
        q = first_generation(complete(5), VertexSet.full(5), 0.5, 2)
        assert q[0].size == 0 and q[1] == VertexSet.full(5)

    def test_against_cdf_definition(self):
        g = random_graph(80, 0.25, seed=1)
        a = VertexSet(80, range(5, 75))
        m = 6
        q = first_generation(g, a, 0.25, m)
        for i in a:
            f = binom_cdf(a.size, 0.25, g.induced_degree(i, a))
            ell = next(k for k in range(m) if i in q[k]) + 1
            assert (ell - 1) / m < f <= ell / m + 1e-12

    def test_bucket_sizes_roughly_balanced(self):
        ok = 0
        for s in range(10):
            inst = sample_correlated(ModelParams(200, 0.3, 0.0), rng=s)
            sp = split_vertices(200, 0.4, make_rng(1000 + s))
            sizes = [x.size for x in first_generation(inst.g_pi, sp.a, 0.3, 8)]
            expect = sp.a.size / 8
            ok += all(expect / 3 <= z <= 3 * expect for z in sizes)
        assert ok >= 9

    def test_empty_a_rejected(self):
        with pytest.raises(ParamError):
            first_generation(complete(3), VertexSet.empty(3), 0.5, 2)


class TestSecondGeneration:
    def test_empty_q_gives_all_ones(self):
        g = random_graph(20, 0.3, seed=2)
        b = VertexSet(20, range(10))
        q = [VertexSet.empty(20)] * 3
        sg = second_generation(g, b, q, 0.3)
        assert list(sg.buckets) == [0b111] and sg.buckets[0b111] == b

    def test_fully_adjacent_vertex_sets_bit(self):
        g = from_edge_list(6, [(0, 3), (0, 4), (0, 5)])
        sg = second_generation(g, VertexSet(6, [0]), [VertexSet(6, [3, 4, 5]), VertexSet(6, [1, 2])], 0.5)
        (code,) = sg.codes.tolist()
        assert code & 1 == 1
        assert (code >> 1) & 1 == 0  # 0 neighbours vs p*2 = 1

    def test_partition_and_recompute(self):
        inst = sample_correlated(ModelParams(300, 0.3, 0.0), rng=5)
        g = inst.g_pi
        sp = split_vertices(300, 0.4, make_rng(5))
        q = first_generation(g, sp.a, 0.3, 4)
        sg = second_generation(g, sp.b, q, 0.3)
        union = np.sort(np.concatenate([s.members for s in sg.buckets.values()]))
        assert np.array_equal(union, sp.b.members)
        assert sum(s.size for s in sg.buckets.values()) == sp.b.size
        for code, s in sg.buckets.items():
            for i in s:
                bits = [int(g.neighbor_count_in(i, q[l]) - 0.3 * q[l].size >= -1e-9) for l in range(4)]
                assert code == sum(b << l for l, b in enumerate(bits))

    def test_exact_tie_counts_as_plus(self):
        # p*|Q| = 0.3*10 is 3.0000000000000004 in floating point; 3 neighbours is a tie -> +1
        assert count_threshold(0.3, 10) == 3
        g = from_edge_list(12, [(0, 1), (0, 2), (0, 3)])
        sg = second_generation(g, VertexSet(12, [0]), [VertexSet(12, range(1, 11))], 0.3)
        assert sg.codes.tolist() == [1]


class TestIndexSet:
    def test_full_set(self):
        assert sample_index_set(2, 4, make_rng(0)).tolist() == [0, 1, 2, 3]

    def test_too_large(self):
        with pytest.raises(ParamError):
            sample_index_set(3, 9, make_rng(0))

    def test_huge_code_space(self):
        codes = sample_index_set(60, 100, make_rng(1))
        assert codes.size == 100 and len(set(codes.tolist())) == 100
        assert int(codes.max()) < 2 ** 60
        assert np.all(np.diff(codes.astype(np.float64)) > 0)

    def test_uniform_single_code(self):
        # 1024 per-code checks: 3 sigma would flag ~3 codes by chance, so use
        # the Bonferroni bound per code plus a chi-square on the whole table
        from scipy.stats import chi2
        rng = make_rng(2024)
        draws = 100_000
        codes = np.array([sample_index_set(10, 1, rng)[0] for _ in range(draws)], dtype=np.int64)
        counts = np.bincount(codes, minlength=1024)
        expect = draws / 1024
        sigma = np.sqrt(draws * (1 / 1024) * (1 - 1 / 1024))
        assert np.all(np.abs(counts - expect) < 4.5 * sigma)
        stat = ((counts - expect) ** 2 / expect).sum()
        assert chi2.sf(stat, 1023) > 1e-3


class TestSignatures:
    def test_all_empty_sets_give_ones(self):
        g = random_graph(30, 0.3, seed=3)
        from sigmatch.matcher.stages import SecondGeneration
        sg = SecondGeneration(m=4, vertices=np.array([], dtype=np.int64), codes=np.array([], dtype=np.uint64),
                              buckets={})
        idx = np.array([1, 5, 9], dtype=np.uint64)
        sig = signatures(g, VertexSet(30, range(10)), sg, idx, 0.3)
        assert all(row == (1, 1, 1) for row in sig.as_dict().values())

    def test_one_bit_against_loop(self):
        inst = sample_correlated(ModelParams(200, 0.2, 0.05), rng=8)
        g = inst.g_pi
        sp = split_vertices(200, 0.4, make_rng(8))
        q = first_generation(g, sp.a, 0.2, 3)
        sg = second_generation(g, sp.b, q, 0.2)
        idx = np.array(sorted(sg.buckets), dtype=np.uint64)
        sig = signatures(g, sp.c, sg, idx, 0.2)
        adj = g.adjacency()
        for k, code in enumerate(idx.tolist()):
            r = sg.buckets[code].members
            for v in sp.c.members[:5]:
                naive = int(sum(adj[v, u] for u in r) - 0.2 * r.size >= -1e-9)
                assert sig.bits(int(v))[k] == naive

    def test_code_width_checked(self):
        g = random_graph(10, 0.3, seed=3)
        sg = second_generation(g, VertexSet(10, [0, 1]), [VertexSet(10, [5])] * 2, 0.3)
        with pytest.raises(ParamError):
            signatures(g, VertexSet(10, [3]), sg, np.array([4], dtype=np.uint64), 0.3)


class TestPotentialMatch:
    def test_equal(self):
        f = np.array([1, 0] * 5)
        assert potential_match(f, f, 10, 0.1)

    def test_complement(self):
        f = np.array([1, 0] * 5)
        assert not potential_match(f, 1 - f, 10, 0.1)

    def test_strict_boundary(self):
        # threshold (100/2)(1.1) = 55; agreement 55 fails, 56 passes
        assert agreement_threshold(100, 0.1) == 56
        f = np.zeros(100, dtype=int)
        g = f.copy()
        g[:45] = 1
        assert not potential_match(f, g, 100, 0.1)
        g[44] = 0
        assert potential_match(f, g, 100, 0.1)

    def test_width_mismatch(self):
        with pytest.raises(ParamError):
            potential_match(np.ones(4), np.ones(5), 4, 0.1)

    @settings(max_examples=50)
    @given(st.lists(st.booleans(), min_size=1, max_size=40), st.data(),
           st.floats(0, 1, allow_nan=False))
    def test_symmetric(self, fi, data, slack):
        fj = data.draw(st.lists(st.booleans(), min_size=len(fi), max_size=len(fi)))
        assert potential_match(fi, fj, len(fi), slack) == potential_match(fj, fi, len(fi), slack)
