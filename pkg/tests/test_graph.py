import io
import itertools
import threading

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from locgame.errors import EdgeListError, InvalidConfig
from locgame.graph import (
    UNREACHABLE, GnpParams, Graph, bfs_distances, complete_graph, cycle_graph, diameter,
    format_edge_list, generate_gnp, is_connected, neighborhood, parse_edge_list, path_graph,
    read_edge_list, sphere, star_graph, write_edge_list,
)
from conftest import from_nx


@st.composite
def graphs(draw, max_n=24):
    n = draw(st.integers(1, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return Graph.from_edges(n, edges)


# -- construction ----------------------------------------------------------

def test_adjacency_symmetric_sorted():
    g = Graph.from_edges(5, [(3, 1), (0, 4), (1, 0)])
    assert g.adjacency == [[1, 4], [0, 3], [], [1], [0]]
    assert g.m == 3


@pytest.mark.parametrize("edges", [[(0, 0)], [(0, 1), (1, 0)], [(0, 5)], [(-1, 2)]])
def test_from_edges_rejects_bad_input(edges):
    with pytest.raises(InvalidConfig):
        Graph.from_edges(3, edges)


@given(graphs())
def test_adjacency_invariants(g):
    for v in range(g.n):
        nb = g.neighbors(v)
        assert v not in nb
        assert list(nb) == sorted(set(nb.tolist()))
        for u in nb:
            assert v in g.neighbors(u)


# -- G(n, p) ----------------------------------------------------------------

def test_gnp_complete_and_empty():
    assert generate_gnp(GnpParams(5, 1.0, 7)).m == 10
    assert generate_gnp(GnpParams(4, 0.0, 7)).m == 0


def test_gnp_regression_pin():
    g = generate_gnp(GnpParams(1000, 0.01, 42))
    assert 4000 <= g.m <= 6000
    assert g.m == 5081


def test_gnp_deterministic():
    a = generate_gnp(GnpParams(300, 0.05, 9))
    b = generate_gnp(GnpParams(300, 0.05, 9))
    assert a == b and a.adjacency == b.adjacency
    assert generate_gnp(GnpParams(300, 0.05, 10)) != a


def test_gnp_edge_count_mean():
    n, p, seeds = 200, 0.03, 100
    mean_m = np.mean([generate_gnp(GnpParams(n, p, s)).m for s in range(seeds)])
    N = n * (n - 1) / 2
    sd_of_mean = np.sqrt(N * p * (1 - p) / seeds)
    assert abs(mean_m - p * N) <= 3 * sd_of_mean


def test_gnp_pair_marginals_uniform():
    # every pair, not only early ones in the lexicographic order, gets probability p
    n, p, seeds = 12, 0.3, 2000
    counts = np.zeros((n, n))
    for s in range(seeds):
        e = generate_gnp(GnpParams(n, p, s)).edges()
        counts[e[:, 0], e[:, 1]] += 1
    freq = counts[np.triu_indices(n, 1)] / seeds
    sd = np.sqrt(p * (1 - p) / seeds)
    assert np.all(np.abs(freq - p) < 5 * sd)


@pytest.mark.parametrize("kw", [dict(n=0, p=0.5, seed=1), dict(n=3, p=1.5, seed=1), dict(n=3, p=-0.1, seed=1)])
def test_gnp_params_validated(kw):
    with pytest.raises(InvalidConfig):
        GnpParams(**kw)


# -- distances ---------------------------------------------------------------

def test_bfs_examples(two_edges):
    assert bfs_distances(path_graph(5), 0).tolist() == [0, 1, 2, 3, 4]
    assert bfs_distances(two_edges, 0).tolist() == [0, 1, UNREACHABLE, UNREACHABLE]
    assert bfs_distances(cycle_graph(6), 0).tolist() == [0, 1, 2, 3, 2, 1]


def test_unreachable_exceeds_finite():
    assert UNREACHABLE > 10 ** 9


@given(graphs())
@settings(max_examples=60)
def test_bfs_matches_networkx(g):
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges().tolist())
    for v in range(g.n):
        ref = nx.single_source_shortest_path_length(h, v)
        row = bfs_distances(g, v)
        for u in range(g.n):
            assert row[u] == ref.get(u, UNREACHABLE)


def test_batched_rows_match_single_source():
    g = generate_gnp(GnpParams(400, 0.02, 3))
    rows = g.distance_rows(range(0, 400, 7))
    for i, v in enumerate(range(0, 400, 7)):
        assert np.array_equal(rows[i], g.bfs_levels([v]))


def test_sparse_batched_path_matches_single_source():
    # above the dense cutoff the batched BFS switches to sparse products
    g = generate_gnp(GnpParams(5000, 0.002, 4))
    rows = g.distance_rows([0, 17, 4999])
    for i, v in enumerate([0, 17, 4999]):
        assert np.array_equal(rows[i], g.bfs_levels([v]))


def test_distance_cache_concurrent_fill():
    g = generate_gnp(GnpParams(600, 0.02, 5))
    ref = generate_gnp(GnpParams(600, 0.02, 5)).distance_rows(range(600))
    out = [None] * 8

    def work(i):
        out[i] = g.distance_rows(range(600))

    threads = [threading.Thread(target=work, args=(i,)) for i in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    for rows in out:
        assert np.array_equal(rows, ref)
    assert g.cached_sources() == 600


# -- spheres, neighborhoods ---------------------------------------------------

def test_sphere_examples():
    p5 = path_graph(5)
    assert sphere(p5, 2, 1) == {1, 3}
    assert sphere(p5, 0, 4) == {4}
    assert sphere(complete_graph(4), 0, 2) == set()
    assert sphere(p5, 3, 0) == {3}


def test_neighborhood_examples():
    assert neighborhood(path_graph(5), {0, 4}, 1) == {0, 1, 3, 4}
    assert neighborhood(cycle_graph(6), {0}, 2) == {0, 1, 2, 4, 5}
    g = generate_gnp(GnpParams(50, 0.1, 1))
    assert neighborhood(g, set(range(50)), 3) == set(range(50))
    assert neighborhood(g, {3, 7}, 0) == {3, 7}


@given(graphs(), st.data())
@settings(max_examples=60)
def test_sphere_is_neighborhood_shell(g, data):
    v = data.draw(st.integers(0, g.n - 1))
    for j in range(1, g.n + 1):
        assert sphere(g, v, j) == neighborhood(g, {v}, j) - neighborhood(g, {v}, j - 1)


@given(graphs(), st.data())
@settings(max_examples=60)
def test_spheres_partition_component(g, data):
    v = data.draw(st.integers(0, g.n - 1))
    shells = [sphere(g, v, j) for j in range(g.n)]
    union = set().union(*shells)
    assert sum(map(len, shells)) == len(union)
    h = nx.Graph(g.edges().tolist())
    h.add_nodes_from(range(g.n))
    assert union == nx.node_connected_component(h, v)


# -- diameter, connectivity ----------------------------------------------------

def test_diameter_examples(two_edges):
    assert diameter(path_graph(5)) == 4
    assert diameter(complete_graph(4)) == 1
    assert diameter(cycle_graph(6)) == 3
    assert diameter(two_edges) == UNREACHABLE
    assert diameter(Graph.from_edges(1, [])) == 0


def test_connectivity_examples(two_edges):
    assert is_connected(complete_graph(3))
    assert not is_connected(two_edges)
    assert is_connected(Graph.from_edges(1, []))


@given(graphs(max_n=40))
@settings(max_examples=60)
def test_diameter_matches_pairwise_scan(g):
    best, disconnected = 0, False
    for v in range(g.n):
        row = bfs_distances(g, v)
        if (row == UNREACHABLE).any():
            disconnected = True
        best = max(best, int(row[row != UNREACHABLE].max()))
    assert diameter(g) == (UNREACHABLE if disconnected else best)
    assert is_connected(g) == (not disconnected)


def test_diameter_on_random_graphs_vs_networkx():
    for s in range(10):
        g = generate_gnp(GnpParams(64, 0.08, s))
        h = nx.Graph(g.edges().tolist())
        h.add_nodes_from(range(64))
        expected = nx.diameter(h) if nx.is_connected(h) else UNREACHABLE
        assert diameter(g) == expected


# -- named families ----------------------------------------------------------

def test_named_graphs():
    assert star_graph(4).degree(0) == 4 and star_graph(4).n == 5
    assert cycle_graph(5).degrees().tolist() == [2] * 5
    assert complete_graph(6).m == 15
    assert from_nx(nx.petersen_graph()).m == 15


# -- edge-list I/O ----------------------------------------------------------

def test_edge_list_roundtrip():
    g = generate_gnp(GnpParams(80, 0.1, 2))
    text = format_edge_list(g)
    assert text.splitlines()[0] == f"80 {g.m}"
    assert parse_edge_list(text) == g
    buf = io.StringIO()
    write_edge_list(g, buf)
    buf.seek(0)
    assert read_edge_list(buf) == g
    assert format_edge_list(read_edge_list(io.StringIO(text))) == text


@pytest.mark.parametrize("text", [
    "3 1\n0 0\n",          # self-loop
    "3 2\n0 1\n0 1\n",     # duplicate
    "3 1\n2 1\n",          # u > v
    "3 2\n0 1\n",          # count mismatch
    "3 1\n0 3\n",          # out of range
    "x y\n",               # garbage header
])
def test_edge_list_rejects(text):
    with pytest.raises(EdgeListError):
        parse_edge_list(text)


def test_edge_hash_depends_on_edges_only():
    a = Graph.from_edges(4, [(0, 1), (2, 3)])
    b = Graph.from_edges(4, [(3, 2), (1, 0)])
    assert a.edge_hash() == b.edge_hash()
    assert a.edge_hash() != Graph.from_edges(4, [(0, 1)]).edge_hash()
