import itertools
import math

import numpy as np
import pytest

from graphon_moments.graphons import ConstantGraphon
from graphon_moments.graphs import Graph, sample_graph
from graphon_moments.motifs import (
    MOTIFS,
    CensusError,
    MomentVector,
    average_moments,
    brute_force_counts,
    census_dataset,
    census_from_json,
    census_to_json,
    constant_graphon_moments,
    count_induced,
    densities_from_counts,
    graph_moments,
)


def _labeled_copies_by_enumeration(motif):
    """Count labeled graphs on k fixed vertices isomorphic to the motif."""
    k = motif.k
    pairs = list(itertools.combinations(range(k), 2))
    target = {frozenset(e) for e in motif.edges}
    hits = set()
    for perm in itertools.permutations(range(k)):
        hits.add(frozenset(frozenset((perm[a], perm[b])) for a, b in target))
    # sanity: every relabeling keeps the edge count
    assert all(len(h) == len(target) for h in hits)
    del pairs
    return len(hits)


@pytest.mark.parametrize("motif", MOTIFS, ids=[m.name for m in MOTIFS])
def test_labeled_copy_counts_match_enumeration(motif):
    assert motif.labeled_copies == _labeled_copies_by_enumeration(motif)


def test_catalog_labeled_copies_vector():
    assert [m.labeled_copies for m in MOTIFS] == [1, 3, 1, 12, 4, 3, 12, 6, 1]


def test_count_k4():
    g = Graph.from_edges(4, itertools.combinations(range(4), 2))
    assert count_induced(g).tolist() == [6, 0, 4, 0, 0, 0, 0, 0, 1]


def test_count_path3():
    g = Graph.from_edges(3, [(0, 1), (1, 2)])
    assert count_induced(g).tolist() == [2, 1, 0, 0, 0, 0, 0, 0, 0]


def test_count_star():
    g = Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)])
    assert count_induced(g).tolist() == [3, 3, 0, 0, 1, 0, 0, 0, 0]


def test_count_c4():
    g = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
    assert count_induced(g).tolist() == [4, 4, 0, 0, 0, 1, 0, 0, 0]


def test_count_empty():
    g = Graph.from_edges(10, [])
    assert count_induced(g).tolist() == [0] * 9
    assert brute_force_counts(g).tolist() == [0] * 9


def test_oracle_equivalence_random():
    probs = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]
    for i in range(200):
        n = 4 + (i % 17)
        g = sample_graph(ConstantGraphon(probs[i % 9]), n, 9000 + i).graph
        assert np.array_equal(count_induced(g), brute_force_counts(g)), f"graph {i}"


def test_brute_force_guard():
    with pytest.raises(CensusError):
        brute_force_counts(Graph.from_edges(31, []))


def test_densities_reject_small_n():
    with pytest.raises(CensusError):
        densities_from_counts(np.zeros(9, dtype=int), 3)


def test_densities_k4():
    g = Graph.from_edges(4, itertools.combinations(range(4), 2))
    d = densities_from_counts(count_induced(g), 4)
    assert d[2] == pytest.approx(1.0)  # every triple is a triangle
    assert d[0] == pytest.approx(1.0)
    assert d[8] == pytest.approx(1.0)


def test_densities_star():
    g = Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)])
    d = densities_from_counts(count_induced(g), 4)
    assert d[4] == pytest.approx(1 / (math.comb(4, 4) * 4))  # 0.25
    assert d[0] == pytest.approx(0.5)


def test_densities_never_exceed_one_consistency():
    with pytest.raises(CensusError):
        densities_from_counts([7, 0, 0, 0, 0, 0, 0, 0, 0], 4)  # max 6 edges at n=4


def test_average_single_is_identity():
    g = Graph.from_edges(5, [(0, 1), (2, 3)])
    v = graph_moments(g)
    avg = average_moments([v])
    assert np.array_equal(avg.densities, v.densities)
    assert avg.provenance == ("empirical", 1.0)


def test_average_linear():
    a = MomentVector(np.full(9, 0.2), ("empirical", 1.0))
    b = MomentVector(np.full(9, 0.4), ("empirical", 1.0))
    assert np.allclose(average_moments([a, b]).densities, 0.3)


def test_average_empty_rejected():
    with pytest.raises(CensusError):
        average_moments([])


def test_er_densities_match_closed_form():
    # Averaged densities of ER(n, p) graphs approach p^e (1-p)^(pairs-e).
    n, p, reps = 100, 0.5, 30
    vecs = [graph_moments(sample_graph(ConstantGraphon(p), n, 400 + s).graph) for s in range(reps)]
    avg = average_moments(vecs).densities
    expected = constant_graphon_moments(p)
    spread = np.std([v.densities for v in vecs], axis=0) / np.sqrt(reps)
    assert np.all(np.abs(avg - expected) < 4 * spread + 1e-4)


def test_census_parallel_matches_serial():
    graphs = [sample_graph(ConstantGraphon(0.3), 20, s).graph for s in range(12)]
    per_serial, avg_serial = census_dataset(graphs, jobs=1)
    per_par, avg_par = census_dataset(graphs, jobs=4)
    for a, b in zip(per_serial, per_par):
        assert np.array_equal(a.densities, b.densities)
    assert np.array_equal(avg_serial.densities, avg_par.densities)


def test_census_json_round_trip():
    graphs = [sample_graph(ConstantGraphon(0.4), 10, s).graph for s in range(3)]
    per, avg = census_dataset(graphs)
    text = census_to_json(per, avg, files=["a", "b", "c"])
    per2, avg2 = census_from_json(text)
    assert np.array_equal(avg.densities, avg2.densities)
    assert all(np.array_equal(x.densities, y.densities) for x, y in zip(per, per2))


def test_moment_vector_validation():
    with pytest.raises(CensusError):
        MomentVector(np.full(9, 1.5), ("empirical", 1.0))
    with pytest.raises(CensusError):
        MomentVector(np.zeros(5), ("empirical", 1.0))
