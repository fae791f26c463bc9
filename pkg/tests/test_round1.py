from fractions import Fraction

import pytest

from blockade.certificates import Blockade, Relation, verify_certificate
from blockade.errors import DegenerateInput, FinderContractBreach
from blockade.graph import Graph, is_complete_to, is_sparse_to, popcount
from blockade.lab import GeneratorSpec, generate
from blockade.patterns import HOUSE, find_induced_copy
from blockade.round1 import (
    PureBlockadeFound,
    RefineReport,
    Sparser,
    SparsePair,
    XSparseBlockade,
    ceil_root,
    epsone_blockade,
    equal_partition,
    house1_step,
    house2_iterate,
    house3_sparsify,
    house4_blockade,
    refine_layout,
)

from conftest import mask


def accepted(outcome, g, profile):
    return verify_certificate(outcome.certify(g, profile, "test"), g).accepted


def multipartite_comb(blocks=16, parts=5, part_size=2, filler=20):
    """Hub 0 sees every block; each block is complete multipartite with its own apex.

    Any 2-connected induced subgraph lives in one block plus the hub and its apex,
    which is a cograph, so the whole graph is house-free.
    """
    edges, nxt = [], 1
    apex = 1 + blocks * parts * part_size
    for i in range(blocks):
        verts = list(range(nxt, nxt + parts * part_size))
        nxt += len(verts)
        for u in verts:
            edges += [(0, u), (apex + i, u)]
        for p in range(parts):
            for q in range(p + 1, parts):
                edges += [(verts[p * part_size + s], verts[q * part_size + t])
                          for s in range(part_size) for t in range(part_size)]
    return Graph.from_edges(apex + blocks + filler, edges)


def multipartite_plus_isolated(parts=10, part_size=3, isolated=60):
    m = parts * part_size
    edges = [(u, v) for u in range(m) for v in range(u + 1, m) if u // part_size != v // part_size]
    return Graph.from_edges(m + isolated, edges)


def test_ceil_root():
    assert [ceil_root(v, 4) for v in (1, 2, 16, 17, 81)] == [1, 2, 2, 3, 3]


def test_equal_partition():
    parts = equal_partition(0b1111111, 3)
    assert [popcount(p) for p in parts] == [3, 2, 2]
    assert sum(parts) == 0b1111111


# -- single step


def test_house1_sparse_graph_gives_sparser(demo):
    g = Graph.empty(50)
    out = house1_step(g, Fraction(1, 8), Fraction(1, 4), demo)
    assert isinstance(out, Sparser) and out.s == g.full
    assert accepted(out, g, demo)


def test_house1_multipartite_blocks_give_complete_blockade(demo):
    g = multipartite_comb()
    assert find_induced_copy(g, HOUSE) is None
    out = house1_step(g, Fraction(1, 8), Fraction(2, 5), demo)
    assert isinstance(out, PureBlockadeFound) and out.k >= 2
    blocks = out.blockade.blocks
    for i in range(len(blocks)):
        for j in range(i + 1, len(blocks)):
            assert is_complete_to(g, blocks[i], blocks[j])
    assert accepted(out, g, demo)


def test_house1_sparse_pair(demo):
    g = multipartite_plus_isolated()
    x = Fraction(1, 8)
    out = house1_step(g, x, Fraction(1, 4), demo)
    assert isinstance(out, SparsePair)
    assert is_sparse_to(g, out.y_set, out.x_set, x)
    assert accepted(out, g, demo)


# -- accumulation


def test_house2_forwards_sparser(demo):
    g = Graph.empty(50)
    out = house2_iterate(g, Fraction(1, 8), Fraction(1, 4), demo)
    assert isinstance(out, Sparser)


def test_house2_accumulates_sparse_pairs(demo):
    g = Graph.empty(40)
    x, y = Fraction(1, 8), Fraction(1, 5)

    def halving(g, x, y, profile, within=None):
        members = [v for v in range(g.n) if within >> v & 1]
        head = mask(*members[: len(members) // 2])
        return SparsePair(head, within ^ head, x)

    out = house2_iterate(g, x, y, demo, step=halving)
    assert isinstance(out, XSparseBlockade) and out.k == 5
    assert accepted(out, g, demo)


# -- sparsification and the unrestricted case


def test_house3_empty_graph_is_x_sparse_partition(demo):
    g = Graph.empty(64)
    x = Fraction(1, 2000)
    out = house3_sparsify(g, x, demo)
    assert isinstance(out, XSparseBlockade) and out.k >= 2
    assert accepted(out, g, demo)


def test_house3_single_vertex_is_degenerate(demo):
    with pytest.raises(DegenerateInput):
        house3_sparsify(Graph.empty(1), Fraction(1, 2000), demo)


def test_house4_complete_graph(demo):
    g = Graph.complete(64)
    out = house4_blockade(g, Fraction(1, 8), demo)
    assert isinstance(out, PureBlockadeFound) and out.k == 2
    assert is_complete_to(g, *out.blockade.blocks)
    assert accepted(out, g, demo)


def test_house4_empty_graph(demo):
    g = Graph.empty(64)
    out = house4_blockade(g, Fraction(1, 8), demo)
    assert isinstance(out, XSparseBlockade) and out.k >= 2
    assert accepted(out, g, demo)


def test_house4_degenerate(demo):
    with pytest.raises(DegenerateInput):
        house4_blockade(Graph.empty(1), Fraction(1, 8), demo)


# -- layout refinement


def halves_finder(g, x, within=None):
    members = [v for v in range(g.n) if within >> v & 1]
    if len(members) < 2:
        raise DegenerateInput("too small")
    head = mask(*members[: len(members) // 2])
    return XSparseBlockade(Blockade((head, within ^ head)), x)


def test_refine_layout_on_empty_graph_counts_match(demo):
    g = Graph.empty(32)
    report = RefineReport()
    out = refine_layout(g, Fraction(1, 4), 1, halves_finder, demo, report=report)
    assert out.blockade.length >= 2 and not report.violations
    assert all(t == Relation.ANTICOMPLETE for t in out.relations.values())
    assert any(step["action"] == "substitute" for step in report.steps)


def test_refine_layout_rejects_bad_finder(demo):
    def overlapping(g, x, within=None):
        return XSparseBlockade(Blockade((within, within)), x)

    with pytest.raises(FinderContractBreach):
        refine_layout(Graph.empty(32), Fraction(1, 4), 1, overlapping, demo)


def test_refine_layout_rejects_mixed_finder(demo):
    # a P3 split {0}, {1, 2} with 0-1 only: neither pure nor sparse at tiny x
    g = Graph.from_edges(3, [(0, 1)])

    def mixed(g, x, within=None):
        return XSparseBlockade(Blockade((mask(0), mask(1, 2))), x)

    with pytest.raises(FinderContractBreach):
        refine_layout(g, Fraction(1, 4), 1, mixed, demo)


@pytest.mark.parametrize("n,seed", [(16, 1), (64, 2), (200, 3)])
def test_epsone_on_cographs(demo, n, seed):
    g = generate(GeneratorSpec("cograph", n, seed=seed))
    report = RefineReport()
    out = epsone_blockade(g, Fraction(1, 4), demo, report=report)
    assert out.blockade.length >= 2 and not report.violations
    assert Relation.MIXED not in out.relations.values()
    assert accepted(out, g, demo)


def test_epsone_on_complete_graph(demo):
    g = Graph.complete(40)
    out = epsone_blockade(g, Fraction(1, 4), demo)
    assert out.blockade.length >= 2
    assert set(out.relations.values()) == {Relation.COMPLETE}
    assert accepted(out, g, demo)
