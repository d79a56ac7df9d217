"""Graphon estimation by induced-motif moment matching.

The package samples graphs from graphons, counts 2-4 node induced motifs,
fits a small coordinate network whose Monte-Carlo motif densities match the
empirical ones, generates mixup-augmented graph datasets in moment space,
and ships evaluation metrics plus calculators for the supporting
concentration and cut-distance bounds.
"""

__version__ = "0.1.0"

from .graphs import Graph, SampledGraph, parse_edge_list, sample_graph, write_edge_list
from .graphons import (
    ConstantGraphon,
    CosineGraphon,
    GridGraphon,
    Graphon,
    ModelGraphon,
    analytic_graphon,
    discretize,
)
from .motifs import (
    MOTIFS,
    MomentVector,
    average_moments,
    brute_force_counts,
    constant_graphon_moments,
    count_induced,
    densities_from_counts,
)

__all__ = [
    "Graph",
    "SampledGraph",
    "parse_edge_list",
    "write_edge_list",
    "sample_graph",
    "Graphon",
    "ConstantGraphon",
    "CosineGraphon",
    "GridGraphon",
    "ModelGraphon",
    "analytic_graphon",
    "discretize",
    "MOTIFS",
    "MomentVector",
    "count_induced",
    "brute_force_counts",
    "densities_from_counts",
    "average_moments",
    "constant_graphon_moments",
    "__version__",
]
