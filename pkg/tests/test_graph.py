import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cliquescale.errors import MalformedInputError
from cliquescale.graph import (
    build_graph,
    comatching,
    complement,
    complete_graph,
    cycle_graph,
    empty_graph,
    induced_subgraph,
    path_graph,
    perfect_matching,
    read_edge_list,
    vertex_set,
    write_edge_list,
)


@st.composite
def graphs(draw, max_n=64):
    n = draw(st.integers(0, max_n))
    if n < 2:
        return n, []
    pairs = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))
    return n, draw(st.lists(pairs, max_size=3 * n))


def test_build_graph_examples():
    tri = build_graph(3, [(0, 1), (1, 2), (0, 2)])
    assert tri == complete_graph(3) and tri.m == 3
    assert build_graph(3, [(0, 1), (1, 0)]).m == 1
    assert build_graph(4, [(0, 1), (2, 3)]) == perfect_matching(2)


def test_build_graph_drops_self_loops():
    assert build_graph(2, [(0, 0), (1, 1), (0, 1)]).edge_list() == [(0, 1)]


@pytest.mark.parametrize("bad", [[(0, 3)], [(-1, 0)], [(0.5, 1)]])
def test_build_graph_rejects_bad_endpoints(bad):
    with pytest.raises(MalformedInputError):
        build_graph(3, bad)


def test_induced_subgraph_examples():
    sub, mapping = induced_subgraph(complete_graph(3), [0, 1])
    assert sub.m == 1 and list(mapping) == [0, 1]
    sub, _ = induced_subgraph(cycle_graph(4), [0, 1, 2])
    assert sub == path_graph(3)
    g = cycle_graph(7)
    assert induced_subgraph(g, range(7))[0] == g


def test_induced_subgraph_rejects_invalid_ids():
    with pytest.raises(MalformedInputError):
        induced_subgraph(cycle_graph(4), [0, 4])
    with pytest.raises(MalformedInputError):
        vertex_set(cycle_graph(4), [1, 1])


def test_complement_examples():
    assert complement(empty_graph(4)) == complete_graph(4)
    assert complement(perfect_matching(2)) == build_graph(4, [(0, 2), (0, 3), (1, 2), (1, 3)])
    assert complement(perfect_matching(2)).degree().tolist() == [2, 2, 2, 2]
    assert comatching(3).m == 15 - 3


@given(graphs())
def test_complement_is_involution(data):
    g = build_graph(*data)
    assert complement(complement(g)) == g


@given(graphs(), st.data())
def test_induced_edge_count_matches_pair_scan(data, draw):
    g = build_graph(*data)
    s = draw.draw(st.sets(st.integers(0, max(0, g.n - 1)), max_size=g.n)) if g.n else set()
    sub, _ = induced_subgraph(g, s)
    edges = set(g.edge_list())
    assert sub.m == sum((u, v) in edges for u, v in itertools.combinations(sorted(s), 2))


@given(graphs())
def test_adjacency_agrees_with_edges(data):
    g = build_graph(*data)
    edges = set(g.edge_list())
    for u, v in itertools.combinations(range(g.n), 2):
        expected = (u, v) in edges
        assert g.has_edge(u, v) == expected == g.has_edge(v, u)
        assert bool(g.bitsets[u] >> v & 1) == expected
        assert bool(int(g.packed_adjacency[u, v // 64]) >> (v % 64) & 1) == expected
    assert all(np.all(np.diff(g.neighbors(v)) > 0) for v in range(g.n))


def test_graph_is_immutable():
    g = cycle_graph(4)
    with pytest.raises(AttributeError):
        g.n = 5
    with pytest.raises(ValueError):
        g.edges[0, 0] = 3


def test_degeneracy_order_is_a_permutation():
    g = build_graph(6, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4)])
    assert sorted(g.degeneracy_order().tolist()) == list(range(6))


def test_edge_list_round_trip(tmp_path):
    g = build_graph(6, [(0, 5), (1, 2), (2, 3)])
    path = tmp_path / "g.txt"
    write_edge_list(g, path)
    assert path.read_text().splitlines()[0] == "6 3"
    assert read_edge_list(path) == g


def test_read_edge_list_rejects_bad_files(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("3 2\n0 1\n")
    with pytest.raises(MalformedInputError):
        read_edge_list(path)
    path.write_text("3 1\n0 7\n")
    with pytest.raises(MalformedInputError):
        read_edge_list(path)
