import numpy as np
import pytest

from graphon_moments.graphons import ConstantGraphon, CosineGraphon
from graphon_moments.graphs import (
    EdgeListParseError,
    Graph,
    GraphError,
    parse_edge_list,
    sample_graph,
    validate_graph,
    write_edge_list,
)
from graphon_moments.rng import philox_stream


def test_parse_basic():
    g = parse_edge_list("0 1\n1 2")
    assert g.n == 3
    assert g.edges() == [(0, 1), (1, 2)]


def test_parse_empty():
    g = parse_edge_list("")
    assert g.n == 0
    assert g.num_edges == 0


def test_parse_rejects_self_loop():
    with pytest.raises(GraphError):
        parse_edge_list("0 0")


def test_parse_rejects_duplicate_even_reversed():
    with pytest.raises(GraphError):
        parse_edge_list("0 1\n1 0")


def test_parse_malformed_token_reports_line():
    with pytest.raises(EdgeListParseError, match="line 2"):
        parse_edge_list("0 1\n1 x")


def test_parse_comments_and_blanks_ignored():
    g = parse_edge_list("# a comment\n\n0 1\n")
    assert g.n == 2 and g.num_edges == 1


def test_header_wins_over_max_index():
    g = parse_edge_list("n 5\n0 1")
    assert g.n == 5
    assert g.adjacency[4] == ()


def test_header_too_small_rejected():
    with pytest.raises(GraphError):
        parse_edge_list("n 2\n0 3")


def test_write_canonical_k3():
    g = Graph.from_edges(3, [(1, 2), (0, 2), (0, 1)])
    assert write_edge_list(g) == "n 3\n0 1\n0 2\n1 2"


def test_write_empty_graph_keeps_n():
    g = Graph.from_edges(2, [])
    assert write_edge_list(g) == "n 2"


def test_round_trip_random_graphs():
    for i in range(100):
        n = int(philox_stream(i).integers(0, 30))
        g = sample_graph(ConstantGraphon(0.3), n, 500 + i).graph
        assert parse_edge_list(write_edge_list(g)) == g


def test_sample_constant_one_gives_complete_graph():
    for seed in (0, 1, 99):
        g = sample_graph(ConstantGraphon(1.0), 4, seed).graph
        assert g.num_edges == 6


def test_sample_constant_zero_gives_empty_graph():
    g = sample_graph(ConstantGraphon(0.0), 5, 7).graph
    assert g.num_edges == 0
    assert g.n == 5


def test_sample_zero_nodes():
    sg = sample_graph(ConstantGraphon(0.5), 0, 1)
    assert sg.graph.n == 0 and sg.latents == ()


def test_sample_deterministic():
    a = sample_graph(CosineGraphon(), 50, 123)
    b = sample_graph(CosineGraphon(), 50, 123)
    assert a == b
    c = sample_graph(CosineGraphon(), 50, 124)
    assert a != c


def test_sample_latents_in_range_and_invariants():
    sg = sample_graph(ConstantGraphon(0.4), 60, 11)
    assert len(sg.latents) == 60
    assert all(0.0 <= x <= 1.0 for x in sg.latents)
    validate_graph(sg.graph)


def test_sample_edge_density_matches_binomial():
    # 50 seeds of ER(200, 0.5): mean density within 3 standard errors.
    n, p, seeds = 200, 0.5, 50
    pairs = n * (n - 1) // 2
    dens = [
        sample_graph(ConstantGraphon(p), n, s).graph.num_edges / pairs
        for s in range(seeds)
    ]
    se = np.sqrt(p * (1 - p) / (pairs * seeds))
    assert abs(np.mean(dens) - p) < 3 * se


def test_validate_catches_asymmetry():
    bad = Graph(n=2, adjacency=((1,), ()))
    with pytest.raises(GraphError):
        validate_graph(bad)
