"""Exact induced counting of the nine 2-4 node motifs, and moment vectors.

The counter works from degrees, per-edge triangle counts, and a codegree
matrix built by wedge iteration, so its cost is O(e*d + n*d^2) plus an
O(e*|common|^2) clique pass; no subgraph enumeration.  Non-induced subgraph
counts are converted to induced counts by inclusion-exclusion against the
denser 4-vertex patterns.
"""

from __future__ import annotations

import itertools
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .graphs import Graph


@dataclass(frozen=True)
class Motif:
    """A small pattern graph on vertices 0..k-1."""

    label: str
    name: str
    k: int
    edges: tuple[tuple[int, int], ...]
    automorphisms: int

    @property
    def labeled_copies(self) -> int:
        """Distinct copies of the pattern on k fixed labeled vertices."""
        return math.factorial(self.k) // self.automorphisms

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def num_pairs(self) -> int:
        return self.k * (self.k - 1) // 2


MOTIFS: tuple[Motif, ...] = (
    Motif("F0", "edge", 2, ((0, 1),), 2),
    Motif("F1", "path3", 3, ((0, 1), (1, 2)), 2),
    Motif("F2", "triangle", 3, ((0, 1), (0, 2), (1, 2)), 6),
    Motif("F3", "path4", 4, ((0, 1), (1, 2), (2, 3)), 2),
    Motif("F4", "star3", 4, ((0, 1), (0, 2), (0, 3)), 6),
    Motif("F5", "cycle4", 4, ((0, 1), (1, 2), (2, 3), (0, 3)), 8),
    Motif("F6", "paw", 4, ((0, 1), (0, 2), (1, 2), (0, 3)), 2),
    Motif("F7", "diamond", 4, ((0, 1), (0, 2), (1, 2), (1, 3), (2, 3)), 4),
    Motif("F8", "clique4", 4, ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)), 24),
)

NUM_MOTIFS = len(MOTIFS)
MOTIF_LABELS = tuple(m.label for m in MOTIFS)


class CensusError(ValueError):
    """Census precondition failure or internal inconsistency."""


@dataclass(frozen=True)
class MomentVector:
    """Nine induced-motif densities in catalog order, with provenance.

    Provenance is a (kind, value) pair: ("empirical", P graphs averaged),
    ("model", L Monte-Carlo samples) or ("mixed", alpha).
    """

    densities: np.ndarray
    provenance: tuple[str, float]

    def __post_init__(self):
        d = np.asarray(self.densities, dtype=float)
        if d.shape != (NUM_MOTIFS,):
            raise CensusError(f"moment vector must have {NUM_MOTIFS} entries, got {d.shape}")
        if not np.all(np.isfinite(d)):
            raise CensusError("moment vector has non-finite entries")
        if d.min() < -1e-12 or d.max() > 1.0 + 1e-12:
            raise CensusError(f"densities outside [0, 1]: {d}")
        object.__setattr__(self, "densities", np.clip(d, 0.0, 1.0))
        self.densities.setflags(write=False)

    def __getitem__(self, i: int) -> float:
        return float(self.densities[i])


def count_induced(g: Graph) -> np.ndarray:
    """Exact induced counts of the nine motifs, as int64 in catalog order."""
    n = g.n
    counts = np.zeros(NUM_MOTIFS, dtype=np.int64)
    edges = g.edge_array()
    m = len(edges)
    counts[0] = m
    if m == 0 or n < 3:
        return counts

    deg = g.degrees()
    adj = np.zeros((n, n), dtype=bool)
    adj[edges[:, 0], edges[:, 1]] = True
    adj[edges[:, 1], edges[:, 0]] = True

    # codeg[a, b] = common-neighbor count for a != b (diagonal holds degrees)
    codeg = np.zeros((n, n), dtype=np.int64)
    for v in range(n):
        nb = np.asarray(g.adjacency[v], dtype=np.int64)
        if len(nb) >= 2:
            codeg[np.ix_(nb, nb)] += 1

    tri_e = codeg[edges[:, 0], edges[:, 1]]
    tri_total = int(tri_e.sum())
    if tri_total % 3:
        raise CensusError("triangle incidence not divisible by 3")
    triangles = tri_total // 3
    wedges = int((deg * (deg - 1) // 2).sum())
    counts[1] = wedges - 3 * triangles
    counts[2] = triangles
    if n < 4:
        return counts

    # Non-induced 4-vertex subgraph counts.
    n_path4 = int(((deg[edges[:, 0]] - 1) * (deg[edges[:, 1]] - 1)).sum()) - 3 * triangles
    n_star3 = int((deg * (deg - 1) * (deg - 2) // 6).sum())
    pairs2 = codeg * (codeg - 1) // 2
    cyc4_ordered = int(pairs2.sum() - np.trace(pairs2))
    if cyc4_ordered % 4:
        raise CensusError("4-cycle incidence not divisible by 4")
    n_cycle4 = cyc4_ordered // 4
    n_diamond = int((tri_e * (tri_e - 1) // 2).sum())

    tri_v = np.zeros(n, dtype=np.int64)
    np.add.at(tri_v, edges[:, 0], tri_e)
    np.add.at(tri_v, edges[:, 1], tri_e)
    tri_v //= 2
    n_paw = int((tri_v * (deg - 2)).sum())

    k4_incidence = 0
    for u, v in edges[tri_e >= 2]:
        common = np.flatnonzero(adj[u] & adj[v])
        k4_incidence += int(adj[np.ix_(common, common)].sum())
    if k4_incidence % 12:
        raise CensusError("clique incidence not divisible by 12")
    n_clique4 = k4_incidence // 12  # ordered pairs within 6 edges per clique

    # Induced counts by inclusion-exclusion (subgraph copies inside the
    # denser patterns: diamond holds 1 C4 / 4 paws / 2 stars / 6 paths,
    # K4 holds 3 / 12 / 4 / 12, paw holds 1 star / 2 paths, C4 holds 4 paths).
    counts[8] = n_clique4
    counts[7] = n_diamond - 6 * counts[8]
    counts[5] = n_cycle4 - counts[7] - 3 * counts[8]
    counts[6] = n_paw - 4 * counts[7] - 12 * counts[8]
    counts[4] = n_star3 - counts[6] - 2 * counts[7] - 4 * counts[8]
    counts[3] = n_path4 - 4 * counts[5] - 2 * counts[6] - 6 * counts[7] - 12 * counts[8]
    if counts.min() < 0:
        raise CensusError(f"negative induced count: {counts}")
    return counts


# Classification key for induced subgraphs: (k, num_edges, sorted degrees).
_SIGNATURES = {
    (2, 1, (1, 1)): 0,
    (3, 2, (1, 1, 2)): 1,
    (3, 3, (2, 2, 2)): 2,
    (4, 3, (1, 1, 2, 2)): 3,
    (4, 3, (1, 1, 1, 3)): 4,
    (4, 4, (2, 2, 2, 2)): 5,
    (4, 4, (1, 2, 2, 3)): 6,
    (4, 5, (2, 2, 3, 3)): 7,
    (4, 6, (3, 3, 3, 3)): 8,
}


def brute_force_counts(g: Graph) -> np.ndarray:
    """Reference counter: enumerate all 2-, 3-, 4-subsets (n <= 30 only)."""
    if g.n > 30:
        raise CensusError(f"brute-force counting refused for n={g.n} > 30")
    adj = [set(a) for a in g.adjacency]
    counts = np.zeros(NUM_MOTIFS, dtype=np.int64)
    for k in (2, 3, 4):
        for subset in itertools.combinations(range(g.n), k):
            deg = [0] * k
            num = 0
            for a, b in itertools.combinations(range(k), 2):
                if subset[b] in adj[subset[a]]:
                    deg[a] += 1
                    deg[b] += 1
                    num += 1
            idx = _SIGNATURES.get((k, num, tuple(sorted(deg))))
            if idx is not None:
                counts[idx] += 1
    return counts


def densities_from_counts(counts, n: int) -> MomentVector:
    """Normalize counts into induced densities: count / (C(n,k) * c_F).

    The normalizer is the number of placements of the labeled pattern on n
    vertices, which makes the result the empirical analogue of the induced
    density integral.
    """
    if n < 4:
        raise CensusError(f"densities need n >= 4 (all motif sizes representable), got n={n}")
    counts = np.asarray(counts, dtype=np.int64)
    dens = np.empty(NUM_MOTIFS, dtype=float)
    for i, motif in enumerate(MOTIFS):
        total = math.comb(n, motif.k) * motif.labeled_copies
        if counts[i] < 0 or counts[i] > total:
            raise CensusError(
                f"count {counts[i]} for {motif.name} outside [0, {total}] at n={n}"
            )
        dens[i] = counts[i] / total
    return MomentVector(dens, ("empirical", 1.0))


def graph_moments(g: Graph) -> MomentVector:
    return densities_from_counts(count_induced(g), g.n)


def average_moments(vectors: list[MomentVector]) -> MomentVector:
    """Elementwise mean of per-graph moment vectors."""
    if not vectors:
        raise CensusError("cannot average an empty list of moment vectors")
    stacked = np.stack([v.densities for v in vectors])
    return MomentVector(stacked.mean(axis=0), ("empirical", float(len(vectors))))


def constant_graphon_moments(p: float) -> np.ndarray:
    """Closed-form induced densities of the constant-p graphon:
    p^{edges} (1-p)^{pairs - edges} per motif."""
    p = float(p)
    return np.array(
        [p**m.num_edges * (1.0 - p) ** (m.num_pairs - m.num_edges) for m in MOTIFS]
    )


def census_dataset(graphs: list[Graph], jobs: int = 1) -> tuple[list[MomentVector], MomentVector]:
    """Per-graph moments plus their average; result is independent of jobs."""
    if not graphs:
        raise CensusError("empty dataset")
    if jobs > 1 and len(graphs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            per_graph = list(pool.map(graph_moments, graphs, chunksize=1))
    else:
        per_graph = [graph_moments(g) for g in graphs]
    return per_graph, average_moments(per_graph)


def census_to_json(per_graph: list[MomentVector], average: MomentVector, files=None) -> str:
    doc = {
        "motifs": list(MOTIF_LABELS),
        "per_graph": [[float(x) for x in v.densities] for v in per_graph],
        "average": [float(x) for x in average.densities],
        "num_graphs": len(per_graph),
    }
    if files is not None:
        doc["files"] = list(files)
    return json.dumps(doc, indent=2)


def census_from_json(text: str) -> tuple[list[MomentVector], MomentVector]:
    doc = json.loads(text)
    if doc.get("motifs") != list(MOTIF_LABELS):
        raise CensusError(f"census file motif order mismatch: {doc.get('motifs')}")
    per_graph = [MomentVector(np.asarray(row, float), ("empirical", 1.0)) for row in doc["per_graph"]]
    average = MomentVector(np.asarray(doc["average"], float), ("empirical", float(doc["num_graphs"])))
    if len(per_graph) != doc["num_graphs"]:
        raise CensusError("num_graphs does not match per_graph length")
    return per_graph, average
