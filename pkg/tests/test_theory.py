import itertools
import math

import numpy as np
import pytest

from graphon_moments.graphons import ConstantGraphon, analytic_graphon
from graphon_moments.theory import (
    NONISOMORPHIC_GRAPH_COUNTS,
    TheoryError,
    cut_distance_certificate,
    deviation_probability_bound,
    mixing_density_gap,
    reference_density,
    simulate_concentration,
)


def _count_nonisomorphic(k: int) -> int:
    """Independent enumeration of simple graphs on k vertices up to iso."""
    pairs = list(itertools.combinations(range(k), 2))
    canonical = set()
    for bits in range(2 ** len(pairs)):
        edges = {frozenset(p) for i, p in enumerate(pairs) if bits >> i & 1}
        best = min(
            tuple(sorted(tuple(sorted((perm[a], perm[b]))) for a, b in edges))
            for perm in itertools.permutations(range(k))
        )
        canonical.add(best)
    return len(canonical)


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_pattern_count_table(k):
    assert NONISOMORPHIC_GRAPH_COUNTS[k - 1] == _count_nonisomorphic(k)


def test_deviation_bound_reference_point():
    b = deviation_probability_bound(50, 200, 2, 0.2)
    assert b.applicable
    assert b.value == pytest.approx(2.0 * math.exp(-625 * 0.195**2), rel=1e-12)
    assert b.value == pytest.approx(9.6e-11, rel=0.01)


def test_deviation_bound_vacuous_at_bias():
    b = deviation_probability_bound(10, 100, 2, 2 * 1 / (2 * 100))
    assert b.applicable and b.value == pytest.approx(2.0)


def test_deviation_bound_inapplicable_below_bias():
    b = deviation_probability_bound(10, 100, 4, 1e-4)
    assert not b.applicable and b.value is None


def test_certificate_k3():
    cert = cut_distance_certificate(50, 200, 3, 0.05)
    assert cert.motif_tolerance == pytest.approx(3.0**-9)
    assert cert.node_threshold == pytest.approx(6 * 3**9)
    assert cert.node_threshold == pytest.approx(118098)
    assert cert.cut_bound == pytest.approx(22 / math.sqrt(math.log2(3)), rel=1e-12)
    assert cert.cut_bound == pytest.approx(17.47, abs=0.01)
    assert cert.vacuous
    assert cert.num_patterns == 4
    assert not cert.applies  # n = 200 is far below the threshold


def test_certificate_k2_defined_k1_rejected():
    cert = cut_distance_certificate(10, 100, 2, 0.1)
    assert cert.cut_bound == pytest.approx(22.0)
    with pytest.raises(TheoryError):
        cut_distance_certificate(10, 100, 1, 0.1)
    with pytest.raises(TheoryError):
        cut_distance_certificate(10, 100, 6, 0.1)


def test_simulation_never_exceeds_bound_reference_case():
    prob, bound = simulate_concentration(
        ConstantGraphon(0.5), 0, num_graphs=50, num_nodes=200,
        tolerance=0.2, trials=200, seed=0,
    )
    assert prob == 0.0
    assert bound == pytest.approx(9.6e-11, rel=0.01)


def test_simulation_deterministic_graphon():
    prob, _ = simulate_concentration(
        ConstantGraphon(1.0), 0, num_graphs=3, num_nodes=30,
        tolerance=0.1, trials=20, seed=5,
    )
    assert prob == 0.0


def test_simulation_rejects_tolerance_below_bias():
    with pytest.raises(TheoryError):
        simulate_concentration(ConstantGraphon(0.5), 8, 5, 20, 0.01, 5, 0)


def test_reference_density_constant_closed_form():
    assert reference_density(ConstantGraphon(0.3), 1) == pytest.approx(0.3**2 * 0.7)


def test_reference_density_quadrature_vs_known_integral():
    # edge density of W(x, y) = xy is 1/4
    assert reference_density(analytic_graphon(1), 0) == pytest.approx(0.25, abs=1e-10)


def test_mixing_gap_reference_values():
    graphon_space, moment_space = mixing_density_gap(0.2, 0.8, 0.5)
    assert graphon_space == pytest.approx(0.125)
    assert moment_space == pytest.approx(0.08)


def test_mixing_gap_degenerate_and_endpoint():
    a, b = mixing_density_gap(0.4, 0.4, 0.7)
    assert a == pytest.approx(b)
    a, b = mixing_density_gap(0.3, 0.9, 1.0)
    assert a == pytest.approx(0.3**2 * 0.7) and b == pytest.approx(0.3**2 * 0.7)


def test_mixing_gap_strict_for_distinct_levels():
    for p1, p2, alpha in [(0.2, 0.8, 0.5), (0.1, 0.4, 0.25), (0.35, 0.9, 0.75)]:
        g, m = mixing_density_gap(p1, p2, alpha)
        assert abs(g - m) > 1e-6


def test_mixing_gap_domain():
    with pytest.raises(TheoryError):
        mixing_density_gap(0.0, 0.5, 0.5)
