"""Calculators for the supporting theory, plus a simulation harness.

Covers the sub-Gaussian deviation bound for averaged motif densities, the
cut-distance certificate built on the inverse counting lemma, a sampling
experiment that checks the deviation bound empirically, and the closed-form
gap showing that moment vectors are not closed under convex combination.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graphons import ConstantGraphon, Graphon
from .graphs import Graph
from .motifs import MOTIFS, constant_graphon_moments, count_induced, densities_from_counts
from .rng import child_seed
from . import graphs as _graphs
from .evaluation import quadrature_density

# Number of non-isomorphic simple graphs on k = 1..5 vertices.
NONISOMORPHIC_GRAPH_COUNTS = (1, 2, 4, 11, 34)


class TheoryError(ValueError):
    pass


@dataclass(frozen=True)
class ConcentrationBound:
    """Deviation-probability bound; inapplicable below the bias threshold."""

    applicable: bool
    value: float | None
    bias_threshold: float


def deviation_probability_bound(num_graphs: int, num_nodes: int, motif_size: int,
                                tolerance: float) -> ConcentrationBound:
    """P[|averaged density - true density| >= tolerance] upper bound:
    2 exp(-(P n / 4 k^2) (tolerance - k(k-1)/(2n))^2).

    The k(k-1)/(2n) term is the finite-size bias of per-graph densities;
    tolerances below it make the bound inapplicable.
    """
    if num_graphs < 1 or num_nodes < 1 or motif_size < 1:
        raise TheoryError("num_graphs, num_nodes and motif_size must be positive")
    bias = motif_size * (motif_size - 1) / (2.0 * num_nodes)
    if tolerance < bias:
        return ConcentrationBound(applicable=False, value=None, bias_threshold=bias)
    exponent = (num_graphs * num_nodes / (4.0 * motif_size**2)) * (tolerance - bias) ** 2
    return ConcentrationBound(applicable=True, value=2.0 * math.exp(-exponent),
                              bias_threshold=bias)


@dataclass(frozen=True)
class CutDistanceCertificate:
    """Everything needed to decide whether the cut-distance bound binds."""

    motif_size: int
    num_graphs: int
    num_nodes: int
    confidence: float
    num_patterns: int          # non-isomorphic simple graphs on k vertices
    motif_tolerance: float     # 3^(-k^2)
    kernel_sup: float          # C = 1 for [0,1] graphons
    cut_bound: float           # 22 C / sqrt(log2 k)
    failure_probability: float
    node_threshold: float      # need n > k(k-1) / motif_tolerance
    applies: bool
    vacuous: bool              # cut_bound > 1 carries no information


def cut_distance_certificate(num_graphs: int, num_nodes: int, motif_size: int,
                             confidence: float) -> CutDistanceCertificate:
    """Evaluate the cut-distance guarantee for k-vertex motif matching.

    Uses motif tolerance 3^(-k^2), sampling tolerance half of it, and a
    union bound over all non-isomorphic k-vertex patterns.  k = 1 is
    rejected (the cut bound divides by log2 k).
    """
    if not (2 <= motif_size <= 5):
        raise TheoryError(f"motif size must be in 2..5, got {motif_size}")
    if not (0.0 < confidence < 1.0):
        raise TheoryError(f"confidence must be in (0, 1), got {confidence}")
    if num_graphs < 1 or num_nodes < 1:
        raise TheoryError("num_graphs and num_nodes must be positive")
    k = motif_size
    delta = 3.0 ** (-(k**2))
    n_k = NONISOMORPHIC_GRAPH_COUNTS[k - 1]
    kernel_sup = 1.0
    eta = 22.0 * kernel_sup / math.sqrt(math.log2(k))
    single = deviation_probability_bound(num_graphs, num_nodes, k, delta / 2.0)
    failure = n_k * single.value if single.applicable else float("inf")
    node_threshold = k * (k - 1) / delta
    applies = (num_nodes > node_threshold) and (failure < confidence)
    return CutDistanceCertificate(
        motif_size=k,
        num_graphs=num_graphs,
        num_nodes=num_nodes,
        confidence=confidence,
        num_patterns=n_k,
        motif_tolerance=delta,
        kernel_sup=kernel_sup,
        cut_bound=eta,
        failure_probability=failure,
        node_threshold=node_threshold,
        applies=applies,
        vacuous=eta > 1.0,
    )


def reference_density(w: Graphon, motif_index: int) -> float:
    """True induced density of one motif: closed form for constant
    graphons, tensor quadrature otherwise."""
    if isinstance(w, ConstantGraphon):
        return float(constant_graphon_moments(w.p)[motif_index])
    return quadrature_density(w, motif_index, num_nodes=48)


def _single_motif_density(g: Graph, motif_index: int) -> float:
    if motif_index == 0:
        if g.n < 2:
            raise TheoryError("edge density needs n >= 2")
        return 2.0 * g.num_edges / (g.n * (g.n - 1))
    return float(densities_from_counts(count_induced(g), g.n).densities[motif_index])


def simulate_concentration(w: Graphon, motif_index: int, num_graphs: int, num_nodes: int,
                           tolerance: float, trials: int, seed: int) -> tuple[float, float]:
    """Estimate the deviation probability by sampling and compare it to the
    bound.  Returns (empirical_probability, bound_value)."""
    if trials < 1:
        raise TheoryError("trials must be >= 1")
    motif = MOTIFS[motif_index]
    bound = deviation_probability_bound(num_graphs, num_nodes, motif.k, tolerance)
    if not bound.applicable:
        raise TheoryError(
            f"tolerance {tolerance} below the bias threshold {bound.bias_threshold}"
        )
    truth = reference_density(w, motif_index)
    hits = 0
    for t in range(trials):
        dens = [
            _single_motif_density(
                _graphs.sample_graph(w, num_nodes, child_seed(seed, t, p)).graph,
                motif_index,
            )
            for p in range(num_graphs)
        ]
        if abs(float(np.mean(dens)) - truth) >= tolerance:
            hits += 1
    return hits / trials, float(bound.value)


def mixing_density_gap(p1: float, p2: float, alpha: float) -> tuple[float, float]:
    """Two-edge-path density of mixed constant graphons, two ways.

    Returns (density of the graphon-space mix, mix of the densities):
    p_a^2 (1 - p_a) with p_a = alpha p1 + (1-alpha) p2, versus
    alpha p1^2 (1-p1) + (1-alpha) p2^2 (1-p2).  The two differ whenever
    p1 != p2 and alpha is interior, which is why mixing happens in moment
    space rather than kernel space.
    """
    for name, v in (("p1", p1), ("p2", p2)):
        if not (0.0 < v < 1.0):
            raise TheoryError(f"{name} must be in (0, 1), got {v}")
    if not (0.0 <= alpha <= 1.0):
        raise TheoryError(f"alpha must be in [0, 1], got {alpha}")
    p_mix = alpha * p1 + (1.0 - alpha) * p2
    graphon_space = p_mix**2 * (1.0 - p_mix)
    moment_space = alpha * p1**2 * (1.0 - p1) + (1.0 - alpha) * p2**2 * (1.0 - p2)
    return graphon_space, moment_space
