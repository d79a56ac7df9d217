"""Moment-space mixup augmentation.

Class-average moment vectors are mixed convexly, the network is trained on
the mixed target, and labeled synthetic graphs are sampled from the
resulting graphon.  Mixed targets need not be achievable by any graphon
(moment vectors are not closed under convex combination), so the train
report's residuals are attached to the result for callers to inspect.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from .graphons import ModelGraphon
from .graphs import Graph, SampledGraph, sample_graph, save_sampled_graph
from .inr import InrParams, save_model
from .motifs import MomentVector, average_moments, graph_moments
from .rng import child_seed, philox_stream
from .training import TrainConfig, TrainReport, train

_SELECT_STREAM = 301
_GENERATE_STREAM = 302


class MixupError(ValueError):
    pass


@dataclass(frozen=True)
class MixupConfig:
    alpha: float
    n_sample: int
    n_nodes: int
    n_graphs: int
    label_a: int = 0
    label_b: int = 1
    trainer: TrainConfig = field(default_factory=TrainConfig)
    seed: int = 0

    def __post_init__(self):
        if not (0.0 <= self.alpha <= 1.0):
            raise MixupError(f"alpha must be in [0, 1], got {self.alpha}")
        if self.n_sample < 1:
            raise MixupError("n_sample must be >= 1")
        if self.n_nodes < 4:
            raise MixupError("n_nodes must be >= 4")
        if self.n_graphs < 0:
            raise MixupError("n_graphs must be >= 0")


@dataclass(frozen=True)
class AugmentedSample:
    graph: Graph
    soft_label: tuple[float, float]

    def __post_init__(self):
        if any(v < 0 for v in self.soft_label) or abs(sum(self.soft_label) - 1.0) > 1e-12:
            raise MixupError(f"soft label must be a probability vector, got {self.soft_label}")


@dataclass
class AugmentResult:
    samples: list[AugmentedSample]
    sampled: list[SampledGraph]
    params: InrParams
    report: TrainReport
    target: MomentVector
    moments_a: MomentVector
    moments_b: MomentVector
    config: MixupConfig


def mix_moments(m_a: MomentVector, m_b: MomentVector, alpha: float) -> MomentVector:
    """Convex combination alpha * m_a + (1 - alpha) * m_b."""
    if not (0.0 <= alpha <= 1.0):
        raise MixupError(f"alpha must be in [0, 1], got {alpha}")
    mixed = alpha * m_a.densities + (1.0 - alpha) * m_b.densities
    return MomentVector(mixed, ("mixed", float(alpha)))


def _class_average(graphs: list[Graph], n_sample: int, rng) -> MomentVector:
    if len(graphs) < n_sample:
        raise MixupError(f"class has {len(graphs)} graphs, need at least {n_sample}")
    picked = sorted(rng.choice(len(graphs), size=n_sample, replace=False).tolist())
    return average_moments([graph_moments(graphs[i]) for i in picked])


def augment(class_a: list[Graph], class_b: list[Graph], cfg: MixupConfig) -> AugmentResult:
    """Run the full augmentation: select, census, mix, train, sample."""
    select_rng = philox_stream(cfg.seed, _SELECT_STREAM)
    moments_a = _class_average(class_a, cfg.n_sample, select_rng)
    moments_b = _class_average(class_b, cfg.n_sample, select_rng)
    target = mix_moments(moments_a, moments_b, cfg.alpha)

    params, report = train(target, cfg.trainer)
    model = ModelGraphon(params)

    soft_label = (float(cfg.alpha), float(1.0 - cfg.alpha))
    samples = []
    sampled = []
    for k in range(cfg.n_graphs):
        sg = sample_graph(model, cfg.n_nodes, child_seed(cfg.seed, _GENERATE_STREAM, k))
        sampled.append(sg)
        samples.append(AugmentedSample(graph=sg.graph, soft_label=soft_label))
    return AugmentResult(
        samples=samples,
        sampled=sampled,
        params=params,
        report=report,
        target=target,
        moments_a=moments_a,
        moments_b=moments_b,
        config=cfg,
    )


def write_augmented(result: AugmentResult, out_dir: str) -> dict:
    """Write .edges/.latents files, labels.tsv, the model, and a manifest."""
    os.makedirs(out_dir, exist_ok=True)
    cfg = result.config
    rows = []
    for k, sg in enumerate(result.sampled):
        name = f"aug_{k:04d}.edges"
        save_sampled_graph(sg, os.path.join(out_dir, name))
        label = result.samples[k].soft_label
        rows.append((name, label))
    with open(os.path.join(out_dir, "labels.tsv"), "w") as fh:
        fh.write("file\tclass_a\tclass_b\tweight_a\tweight_b\n")
        for name, label in rows:
            fh.write(f"{name}\t{cfg.label_a}\t{cfg.label_b}\t{label[0]:.12g}\t{label[1]:.12g}\n")
    model_path = os.path.join(out_dir, "model.inr")
    save_model(result.params, model_path)
    manifest = {
        "alpha": cfg.alpha,
        "n_sample": cfg.n_sample,
        "n_nodes": cfg.n_nodes,
        "n_graphs": cfg.n_graphs,
        "labels": [cfg.label_a, cfg.label_b],
        "seed": cfg.seed,
        "target_moments": [float(x) for x in result.target.densities],
        "class_a_moments": [float(x) for x in result.moments_a.densities],
        "class_b_moments": [float(x) for x in result.moments_b.densities],
        "train_report": result.report.to_dict(),
        "model_file": "model.inr",
    }
    with open(os.path.join(out_dir, "mixup_manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2)
    return manifest
