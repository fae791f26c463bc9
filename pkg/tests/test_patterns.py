from hypothesis import given

from blockade.graph import Graph, complement
from blockade.lab.oracles import has_copy_by_injections
from blockade.patterns import (
    C5,
    HOUSE,
    P4,
    P5,
    PATTERNS,
    find_induced_copy,
    is_cograph,
    is_copy,
    is_prime_pattern,
    maximal_modules,
)

from conftest import graphs, random_graph


def test_builtin_pattern_edge_sets():
    assert P5.edges() == [(0, 1), (1, 2), (2, 3), (3, 4)]
    assert P4.edges() == [(0, 1), (1, 2), (2, 3)]
    assert sorted(C5.edges()) == [(0, 1), (0, 4), (1, 2), (2, 3), (3, 4)]
    assert HOUSE == complement(P5)


def test_p5_in_itself_is_identity():
    assert find_induced_copy(P5, P5) == {i: i for i in range(5)}


def test_no_p5_in_c5_or_house():
    assert find_induced_copy(C5, P5) is None
    assert find_induced_copy(HOUSE, P5) is None


def test_empty_pattern():
    assert find_induced_copy(P5, Graph.empty(0)) == {}


def test_all_builtins_are_prime():
    assert all(is_prime_pattern(h) for h in PATTERNS.values())


@given(graphs(max_n=8))
def test_matches_injection_oracle(g):
    for h in PATTERNS.values():
        found = find_induced_copy(g, h)
        assert (found is not None) == has_copy_by_injections(g, h)
        if found is not None:
            assert is_copy(g, h, found)


def test_decomposed_search_on_larger_graphs():
    # substitution of random pieces: the search must still find copies inside modules
    for seed in range(6):
        g = random_graph(40, 0.15 + 0.1 * seed, seed)
        for h in PATTERNS.values():
            found = find_induced_copy(g, h)
            if found is not None:
                assert is_copy(g, h, found)


def test_maximal_modules_partition():
    g = random_graph(20, 0.5, 2)
    mods = maximal_modules(g, g.full)
    union = 0
    for m in mods:
        assert not union & m
        union |= m
    assert union == g.full


def test_cograph_check():
    assert is_cograph(Graph.complete(6))
    assert not is_cograph(P4)
