import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from blockade.certificates import comb_failures
from blockade.errors import DegenerateInput, PreconditionViolated
from blockade.graph import Graph, is_anticomplete_to, is_complete_to, is_restricted, popcount
from blockade.lab.oracles import brute_best_restricted
from blockade.primitives import (
    CombFound,
    SmallCover,
    anticomplete_pair_sparse,
    comb_or_sparse_cover,
    complete_blockade_from_anticomponents,
    covering_set,
    exhaustive_comb,
    rodl_restricted_subgraph,
    small_cover_bound_holds,
)

from conftest import graphs, mask, perfect_matching


def complete_multipartite(sizes):
    edges, start, parts = [], 0, []
    for s in sizes:
        parts.append(list(range(start, start + s)))
        start += s
    for i, p in enumerate(parts):
        for q in parts[i + 1:]:
            edges += [(u, v) for u in p for v in q]
    return Graph.from_edges(start, edges)


# -- complete blockades from anticomponents


def test_complete_4_partite():
    g = complete_multipartite([2, 2, 2, 2])
    bl = complete_blockade_from_anticomponents(g, 2)
    assert len(bl.blocks) >= 2 and min(bl.sizes) >= 2 and not bl.failures()
    for i in range(len(bl.blocks)):
        for j in range(i + 1, len(bl.blocks)):
            assert is_complete_to(g, bl.blocks[i], bl.blocks[j])
    # frozen: 8/2 = 4 is the merge cap, so parts pair up only while below it
    assert bl.blocks == (mask(2, 3), mask(4, 5), mask(6, 7))


def test_k4_k2():
    bl = complete_blockade_from_anticomponents(Graph.complete(4), 2)
    assert bl.blocks == (mask(1), mask(2), mask(3)) and not bl.failures()


def test_empty_graph_violates_precondition():
    with pytest.raises(PreconditionViolated) as info:
        complete_blockade_from_anticomponents(Graph.empty(4), 2)
    assert info.value.witness == 0b1111


# -- covering sets


def test_cover_complete_bipartite():
    g = Graph.from_edges(8, [(u, v) for u in range(4) for v in range(4, 8)])
    assert covering_set(g, 0b1111, 0b11110000, Fraction(1, 2) - Fraction(1, 100)) == 1


def test_cover_matching():
    g, a, b = perfect_matching(4)
    s = covering_set(g, a, b, Fraction(1, 4))
    assert s == a


def test_cover_precondition():
    g = Graph.from_edges(4, [(0, 2)])
    with pytest.raises(PreconditionViolated) as info:
        covering_set(g, mask(0, 1), mask(2, 3), Fraction(1, 4))
    assert info.value.witness == 3


def test_cover_seeded_is_reproducible():
    rng = random.Random(5)
    g = Graph.from_edges(40, [(u, v) for u in range(20) for v in range(20, 40) if rng.random() < 0.5])
    a, b = (1 << 20) - 1, ((1 << 40) - 1) ^ ((1 << 20) - 1)
    x = Fraction(1, 10)
    b = sum(1 << v for v in range(20, 40) if popcount(g.adj[v] & a) >= x * 20)
    s1, s2 = covering_set(g, a, b, x, seed=7), covering_set(g, a, b, x, seed=7)
    assert s1 == s2 and popcount(s1) <= 10
    covered = sum(1 << u for v in range(40) if s1 >> v & 1 for u in range(40) if g.adj[v] >> u & 1) & b
    assert 2 * popcount(covered) >= popcount(b)


# -- combs


def test_single_apex_comb():
    nbrs = list(range(1, 26))
    g = Graph.from_edges(26, [(0, v) for v in nbrs])
    b = mask(*nbrs)
    out = comb_or_sparse_cover(g, 1, b, 25)
    assert out == CombFound((0,), (b,))
    assert out.width == 25


def test_no_edges_small_cover():
    g = Graph.empty(6)
    assert comb_or_sparse_cover(g, mask(0, 1), mask(2, 3, 4, 5), 1) == SmallCover(0)


def test_comb_degree_precondition():
    g = Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)])
    with pytest.raises(PreconditionViolated):
        comb_or_sparse_cover(g, 1, mask(1, 2, 3), 2)


def test_small_cover_bound_exact():
    # 20 * sqrt(4 * 1) = 40
    assert small_cover_bound_holds(40, 4, Fraction(1))
    assert not small_cover_bound_holds(41, 4, Fraction(1))


def test_exhaustive_comb_prefers_longer():
    # two apexes with private pairs: a (2, 2)-comb beats any single apex
    g = Graph.from_edges(6, [(0, 2), (0, 3), (1, 4), (1, 5)])
    apexes, blocks = exhaustive_comb(g, mask(0, 1), mask(2, 3, 4, 5))
    assert apexes == (0, 1) and blocks == [mask(2, 3), mask(4, 5)]
    assert not comb_failures(g, list(apexes), blocks)


# -- anticomplete pairs


def test_empty_32():
    bl = anticomplete_pair_sparse(Graph.empty(32), Fraction(1, 32))
    assert bl.blocks == (1, ((1 << 32) - 1) ^ 1)


def test_32_disjoint_edges():
    g = Graph.from_edges(64, [(2 * i, 2 * i + 1) for i in range(32)])
    bl = anticomplete_pair_sparse(g, Fraction(1, 32))
    x, y = bl.blocks
    assert popcount(x) >= 2 and popcount(y) >= 2 and is_anticomplete_to(g, x, y)


def test_star_not_sparse():
    g = Graph.from_edges(41, [(0, v) for v in range(1, 41)])
    with pytest.raises(PreconditionViolated):
        anticomplete_pair_sparse(g, Fraction(1, 32))


def test_too_small_is_degenerate():
    with pytest.raises(DegenerateInput):
        anticomplete_pair_sparse(Graph.empty(31), Fraction(1, 32))


def test_p5_rejected():
    # P5 plus 27 isolated vertices: sparse enough, but not P5-free
    g = Graph.from_edges(32, [(0, 1), (1, 2), (2, 3), (3, 4)])
    with pytest.raises(PreconditionViolated):
        anticomplete_pair_sparse(g, Fraction(1, 16))


# -- restricted subgraphs


def test_rodl_trivial_cases():
    eps = Fraction(1, 4)
    assert rodl_restricted_subgraph(Graph.complete(30), eps) == (1 << 30) - 1
    g, _, _ = perfect_matching(8)
    assert rodl_restricted_subgraph(g, eps) == g.full


def test_rodl_rejects_bad_eps():
    with pytest.raises(PreconditionViolated):
        rodl_restricted_subgraph(Graph.empty(3), Fraction(1, 2))


@given(graphs(min_n=1, max_n=12), st.sampled_from([Fraction(1, 4), Fraction(1, 3), Fraction(1, 8)]))
def test_rodl_small_is_optimal(g, eps):
    s = rodl_restricted_subgraph(g, eps)
    assert is_restricted(g, eps, s)
    assert popcount(s) == popcount(brute_best_restricted(g, eps))


def test_rodl_large_is_restricted():
    for seed in range(4):
        rng = random.Random(seed)
        g = Graph.from_edges(60, [(u, v) for u in range(60) for v in range(u + 1, 60) if rng.random() < 0.4])
        s = rodl_restricted_subgraph(g, Fraction(1, 4))
        assert s and is_restricted(g, Fraction(1, 4), s)
