"""Simple undirected graphs: representation, edge-list IO, graphon sampling.

A graph is stored as per-vertex sorted neighbor tuples.  Graphs are
immutable after construction and safe to share across threads.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .rng import philox_stream


class GraphError(ValueError):
    """Invalid graph structure (self-loop, duplicate edge, bad index)."""


class EdgeListParseError(ValueError):
    """Malformed edge-list text; message carries the offending line number."""


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph with sorted adjacency lists."""

    n: int
    adjacency: tuple[tuple[int, ...], ...]

    @classmethod
    def from_edges(cls, n: int, edges) -> "Graph":
        if n < 0:
            raise GraphError(f"vertex count must be non-negative, got {n}")
        adj: list[list[int]] = [[] for _ in range(n)]
        seen = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) outside vertex range [0, {n})")
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise GraphError(f"duplicate edge ({key[0]}, {key[1]})")
            seen.add(key)
            adj[u].append(v)
            adj[v].append(u)
        return cls(n=n, adjacency=tuple(tuple(sorted(a)) for a in adj))

    @property
    def num_edges(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def edges(self) -> list[tuple[int, int]]:
        """All edges as (u, v) with u < v, lexicographically sorted."""
        return [(u, v) for u in range(self.n) for v in self.adjacency[u] if u < v]

    def edge_array(self) -> np.ndarray:
        """Edges as an (m, 2) int array with u < v rows."""
        e = self.edges()
        if not e:
            return np.empty((0, 2), dtype=np.int64)
        return np.asarray(e, dtype=np.int64)

    def degrees(self) -> np.ndarray:
        return np.array([len(a) for a in self.adjacency], dtype=np.int64)


def validate_graph(g: Graph) -> None:
    """Check all structural invariants; raises GraphError on violation."""
    if g.n < 0:
        raise GraphError("negative vertex count")
    if len(g.adjacency) != g.n:
        raise GraphError("adjacency length does not match vertex count")
    for u, nbrs in enumerate(g.adjacency):
        if list(nbrs) != sorted(set(nbrs)):
            raise GraphError(f"adjacency of {u} is not sorted/duplicate-free")
        for v in nbrs:
            if not (0 <= v < g.n):
                raise GraphError(f"neighbor {v} of {u} outside [0, {g.n})")
            if v == u:
                raise GraphError(f"self-loop at {u}")
            if u not in g.adjacency[v]:
                raise GraphError(f"asymmetric edge ({u}, {v})")


@dataclass(frozen=True)
class SampledGraph:
    """A graph drawn from a graphon, with the latent positions that made it."""

    graph: Graph
    latents: tuple[float, ...]
    seed: int

    def __post_init__(self):
        if len(self.latents) != self.graph.n:
            raise GraphError("latents length must equal vertex count")
        if any(not (0.0 <= x <= 1.0) for x in self.latents):
            raise GraphError("latents must lie in [0, 1]")


def parse_edge_list(text: str) -> Graph:
    """Parse "u v" lines into a Graph.

    Blank lines and lines starting with '#' are ignored.  An optional
    "n <N>" header fixes the vertex count (needed for trailing isolated
    vertices); otherwise n = 1 + max index seen.
    """
    edges: list[tuple[int, int]] = []
    header_n: int | None = None
    max_idx = -1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "n":
            if header_n is not None:
                raise EdgeListParseError(f"line {lineno}: repeated 'n' header")
            if len(parts) != 2:
                raise EdgeListParseError(f"line {lineno}: header must be 'n <N>'")
            try:
                header_n = int(parts[1])
            except ValueError:
                raise EdgeListParseError(f"line {lineno}: bad vertex count {parts[1]!r}") from None
            if header_n < 0:
                raise EdgeListParseError(f"line {lineno}: negative vertex count")
            continue
        if len(parts) != 2:
            raise EdgeListParseError(f"line {lineno}: expected 'u v', got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise EdgeListParseError(f"line {lineno}: non-integer token in {line!r}") from None
        if u < 0 or v < 0:
            raise EdgeListParseError(f"line {lineno}: negative vertex index")
        edges.append((u, v))
        max_idx = max(max_idx, u, v)
    n = header_n if header_n is not None else max_idx + 1
    return Graph.from_edges(n, edges)


def write_edge_list(g: Graph) -> str:
    """Canonical edge-list text: "n <N>" header, then sorted "u v" lines."""
    lines = [f"n {g.n}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines)


def sample_graph(w, n: int, seed: int) -> SampledGraph:
    """Draw a graph of n vertices from graphon w.

    Latent positions are n i.i.d. uniforms; each pair i<j gets an edge
    independently with probability w(eta_i, eta_j).  The Philox stream is
    consumed in a fixed order (n latents first, then one uniform per pair
    in row-major i<j order), so identical (w, n, seed) reproduce the graph
    bit-exactly.
    """
    if n < 0:
        raise GraphError(f"vertex count must be non-negative, got {n}")
    rng = philox_stream(seed)
    latents = rng.random(n)
    iu, ju = np.triu_indices(n, k=1)
    thresholds = rng.random(len(iu))
    if len(iu):
        probs = np.asarray(w.evaluate(latents[iu], latents[ju]), dtype=float)
        keep = thresholds < probs
        edge_iter = zip(iu[keep].tolist(), ju[keep].tolist())
    else:
        edge_iter = ()
    graph = Graph.from_edges(n, edge_iter)
    return SampledGraph(graph=graph, latents=tuple(latents.tolist()), seed=int(seed))


# ---------------------------------------------------------------------------
# Dataset directory convention: one ".edges" file per graph, optional sibling
# ".latents" file with one float per line.


def save_graph(g: Graph, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(write_edge_list(g) + "\n")


def load_graph(path: str) -> Graph:
    with open(path) as fh:
        return parse_edge_list(fh.read())


def save_sampled_graph(sg: SampledGraph, edges_path: str) -> None:
    """Write the .edges file and its sibling .latents file."""
    save_graph(sg.graph, edges_path)
    base, _ = os.path.splitext(edges_path)
    with open(base + ".latents", "w") as fh:
        for x in sg.latents:
            fh.write(format(x, ".17g") + "\n")


def load_dataset(directory: str) -> list[tuple[str, Graph]]:
    """Load every .edges file in a directory, sorted by filename."""
    names = sorted(f for f in os.listdir(directory) if f.endswith(".edges"))
    out = []
    for name in names:
        path = os.path.join(directory, name)
        try:
            out.append((name, load_graph(path)))
        except (EdgeListParseError, GraphError) as exc:
            raise type(exc)(f"{name}: {exc}") from exc
    return out
