"""Training loop: fit the coordinate network to a target moment vector.

The loss is the weighted MSE between target densities and Monte-Carlo
densities of the network, with weights equal to inverse target densities
(floored to avoid division by absent motifs).  Updates are Adam; training
stops at max_epochs or when the best loss has not improved relatively by
the threshold for `patience` consecutive epochs.  Everything is
deterministic in (target, config): tuples for epoch e come from the
Philox stream (seed, 201, e), initialization from the init stream of the
same seed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .inr import (
    GradVector,
    InrParams,
    grad_to_vector,
    init_params,
    loss_and_grad,
    mc_moments,
    params_to_vector,
    vector_to_params,
)
from .motifs import NUM_MOTIFS, MomentVector
from .rng import philox_stream

_TUPLE_STREAM = 201
_ESTIMATE_STREAM = 202


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    mc_samples: int = 20000
    max_epochs: int = 5000
    learning_rate: float = 1e-2
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    patience: int = 200
    improvement_threshold: float = 1e-5
    weight_floor: float = 1e-6
    resample_tuples: bool = True
    hidden_width: int = 64
    seed: int = 0

    def __post_init__(self):
        if self.mc_samples < 1:
            raise ConfigError("mc_samples must be >= 1")
        if self.max_epochs < 1:
            raise ConfigError("max_epochs must be >= 1")
        if self.learning_rate <= 0:
            raise ConfigError("learning_rate must be positive")
        if self.patience < 1:
            raise ConfigError("patience must be >= 1")
        if self.hidden_width < 1:
            raise ConfigError("hidden_width must be >= 1")
        if self.weight_floor <= 0:
            raise ConfigError("weight_floor must be positive")


@dataclass
class TrainReport:
    epochs_run: int
    final_loss: float
    residuals: np.ndarray
    stop_reason: str
    loss_trajectory: list[tuple[int, float]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "epochs_run": self.epochs_run,
            "final_loss": self.final_loss,
            "residuals": [float(r) for r in self.residuals],
            "stop_reason": self.stop_reason,
            "loss_trajectory": [[int(e), float(v)] for e, v in self.loss_trajectory],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


class TrainingDiverged(RuntimeError):
    """Non-finite loss or gradient; carries the partial report."""

    def __init__(self, message: str, report: TrainReport):
        super().__init__(message)
        self.report = report


def weights_from_moments(target, floor: float = 1e-6) -> np.ndarray:
    """Inverse-density loss weights: w_i = 1 / max(m_i, floor)."""
    m = target.densities if isinstance(target, MomentVector) else np.asarray(target, float)
    return 1.0 / np.maximum(m, floor)


class PlateauDetector:
    """Stops when the best loss goes `patience` epochs without a relative
    improvement of at least `threshold`."""

    def __init__(self, patience: int, threshold: float):
        self.patience = patience
        self.threshold = threshold
        self.best = np.inf
        self.stale = 0

    def update(self, loss: float) -> bool:
        if loss < self.best * (1.0 - self.threshold):
            self.best = loss
            self.stale = 0
        else:
            self.stale += 1
        return self.stale >= self.patience


def draw_tuples(num: int, seed: int, stream_labels: tuple[int, ...]) -> np.ndarray:
    rng = philox_stream(seed, *stream_labels)
    return rng.random((num, 4))


def train(target: MomentVector, cfg: TrainConfig) -> tuple[InrParams, TrainReport]:
    """Fit network parameters to the target moment vector."""
    weights = weights_from_moments(target, cfg.weight_floor)
    params = init_params(cfg.hidden_width, cfg.seed)
    theta = params_to_vector(params)
    m1 = np.zeros_like(theta)
    m2 = np.zeros_like(theta)
    plateau = PlateauDetector(cfg.patience, cfg.improvement_threshold)
    trajectory: list[tuple[int, float]] = []
    tuples = draw_tuples(cfg.mc_samples, cfg.seed, (_TUPLE_STREAM, 0))
    stop_reason = "max_epochs"
    epochs_run = 0
    loss = np.nan

    for epoch in range(cfg.max_epochs):
        if cfg.resample_tuples and epoch > 0:
            tuples = draw_tuples(cfg.mc_samples, cfg.seed, (_TUPLE_STREAM, epoch))
        params = vector_to_params(theta, params)
        loss, grad, _ = loss_and_grad(params, tuples, target, weights)
        g = grad_to_vector(grad)
        epochs_run = epoch + 1
        trajectory.append((epoch, loss))
        if not np.isfinite(loss) or not np.all(np.isfinite(g)):
            report = _build_report(epochs_run, loss, np.full(NUM_MOTIFS, np.nan), "diverged", trajectory)
            raise TrainingDiverged(f"non-finite loss/gradient at epoch {epoch}", report)
        if plateau.update(loss):
            stop_reason = "plateau"
            break
        t = epoch + 1
        m1 = cfg.beta1 * m1 + (1.0 - cfg.beta1) * g
        m2 = cfg.beta2 * m2 + (1.0 - cfg.beta2) * g**2
        m1_hat = m1 / (1.0 - cfg.beta1**t)
        m2_hat = m2 / (1.0 - cfg.beta2**t)
        theta = theta - cfg.learning_rate * m1_hat / (np.sqrt(m2_hat) + cfg.adam_eps)

    params = vector_to_params(theta, params)
    final_moments = estimate_moments(params, cfg.mc_samples, cfg.seed)
    residuals = np.abs(target.densities - final_moments.densities)
    report = _build_report(epochs_run, float(loss), residuals, stop_reason, trajectory)
    return params, report


def _build_report(epochs_run, final_loss, residuals, stop_reason, trajectory) -> TrainReport:
    step = max(1, len(trajectory) // 500)
    kept = [pt for i, pt in enumerate(trajectory) if i % step == 0 or i == len(trajectory) - 1]
    return TrainReport(
        epochs_run=epochs_run,
        final_loss=final_loss,
        residuals=np.asarray(residuals, float),
        stop_reason=stop_reason,
        loss_trajectory=kept,
    )


def estimate_moments(params: InrParams, num_samples: int, seed: int) -> MomentVector:
    """Monte-Carlo densities of the model on a fresh seeded tuple batch."""
    if num_samples < 1:
        raise ConfigError("num_samples must be >= 1")
    tuples = draw_tuples(num_samples, seed, (_ESTIMATE_STREAM,))
    return MomentVector(mc_moments(params, tuples), ("model", float(num_samples)))


# ---------------------------------------------------------------------------
# Config file: flat key=value lines, one per TrainConfig field.

_BOOL_STRINGS = {"true": True, "false": False, "1": True, "0": False}


def config_to_text(cfg: TrainConfig) -> str:
    lines = []
    for f in fields(TrainConfig):
        value = getattr(cfg, f.name)
        if isinstance(value, bool):
            value = "true" if value else "false"
        lines.append(f"{f.name}={value}")
    return "\n".join(lines)


def config_from_text(text: str, base: TrainConfig | None = None) -> TrainConfig:
    cfg = base or TrainConfig()
    overrides = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
        overrides[key.strip()] = value.strip()
    return apply_overrides(cfg, overrides)


def apply_overrides(cfg: TrainConfig, overrides: dict[str, str]) -> TrainConfig:
    valid = {f.name: f.type for f in fields(TrainConfig)}
    parsed = {}
    for key, value in overrides.items():
        if key not in valid:
            raise ConfigError(f"unknown config key {key!r}")
        current = getattr(cfg, key)
        if isinstance(current, bool):
            if value.lower() not in _BOOL_STRINGS:
                raise ConfigError(f"bad boolean for {key}: {value!r}")
            parsed[key] = _BOOL_STRINGS[value.lower()]
        elif isinstance(current, int):
            parsed[key] = int(value)
        else:
            parsed[key] = float(value)
    return replace(cfg, **parsed)


def load_config(path: str, base: TrainConfig | None = None) -> TrainConfig:
    with open(path) as fh:
        return config_from_text(fh.read(), base)


def save_config(cfg: TrainConfig, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(config_to_text(cfg) + "\n")
