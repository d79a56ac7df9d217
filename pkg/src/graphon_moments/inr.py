"""One-hidden-layer coordinate network representing an estimated graphon.

forward maps (x, y) in [0,1]^2 to an edge probability in (0, 1).  Inputs
are ordered canonically (min, max) before the pass, so symmetry is exact
with a single evaluation.  The hidden activation is tanh and the output is
squashed by a sigmoid to guarantee the graphon range.

loss_and_grad evaluates the Monte-Carlo motif densities of the network on
a shared batch of 4-coordinate tuples (six pair evaluations per tuple,
reused by all nine motifs) and backpropagates the weighted-MSE loss in
closed form; the derivative of each per-tuple product with respect to one
pair factor is the product of the remaining factors, negated for
complement factors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .motifs import MOTIFS, NUM_MOTIFS, MomentVector
from .rng import philox_stream

_INIT_STREAM = 101

# The six vertex pairs of a 4-tuple, in fixed slot order.
PAIR_SLOTS: tuple[tuple[int, int], ...] = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))

# Per motif: slots carrying an edge factor and slots carrying a (1 - q)
# factor, restricted to pairs among the motif's first k vertices.
_MOTIF_FACTORS: list[tuple[tuple[int, ...], tuple[int, ...]]] = []
for _motif in MOTIFS:
    _edge_slots = []
    _gap_slots = []
    for _s, (_a, _b) in enumerate(PAIR_SLOTS):
        if _b < _motif.k:
            if (_a, _b) in _motif.edges:
                _edge_slots.append(_s)
            else:
                _gap_slots.append(_s)
    _MOTIF_FACTORS.append((tuple(_edge_slots), tuple(_gap_slots)))


class InrError(ValueError):
    """Invalid network parameters or inputs."""


@dataclass
class InrParams:
    """Network parameters: input weights (H, 2), input biases (H,),
    output weights (H,), output bias, activation tag and the init seed."""

    w_in: np.ndarray
    b_in: np.ndarray
    w_out: np.ndarray
    b_out: float
    activation: str = "tanh"
    seed: int = 0

    def __post_init__(self):
        self.w_in = np.asarray(self.w_in, dtype=float)
        self.b_in = np.asarray(self.b_in, dtype=float)
        self.w_out = np.asarray(self.w_out, dtype=float)
        self.b_out = float(self.b_out)
        h = self.hidden_width
        if h < 1 or self.w_in.shape != (h, 2) or self.b_in.shape != (h,) or self.w_out.shape != (h,):
            raise InrError("inconsistent parameter shapes")
        if self.activation != "tanh":
            raise InrError(f"unsupported activation {self.activation!r}")
        for arr in (self.w_in, self.b_in, self.w_out):
            if not np.all(np.isfinite(arr)):
                raise InrError("non-finite parameters")
        if not np.isfinite(self.b_out):
            raise InrError("non-finite parameters")

    @property
    def hidden_width(self) -> int:
        return self.w_in.shape[0]

    @property
    def num_parameters(self) -> int:
        return self.w_in.size + self.b_in.size + self.w_out.size + 1

    def copy(self) -> "InrParams":
        return InrParams(
            self.w_in.copy(), self.b_in.copy(), self.w_out.copy(), self.b_out,
            self.activation, self.seed,
        )


@dataclass
class GradVector:
    """Loss gradient with the same shape as InrParams."""

    w_in: np.ndarray
    b_in: np.ndarray
    w_out: np.ndarray
    b_out: float


def params_to_vector(p: InrParams) -> np.ndarray:
    return np.concatenate([p.w_in.ravel(), p.b_in, p.w_out, [p.b_out]])


def vector_to_params(vec: np.ndarray, template: InrParams) -> InrParams:
    h = template.hidden_width
    vec = np.asarray(vec, dtype=float)
    return InrParams(
        w_in=vec[: 2 * h].reshape(h, 2),
        b_in=vec[2 * h : 3 * h],
        w_out=vec[3 * h : 4 * h],
        b_out=float(vec[4 * h]),
        activation=template.activation,
        seed=template.seed,
    )


def grad_to_vector(g: GradVector) -> np.ndarray:
    return np.concatenate([g.w_in.ravel(), g.b_in, g.w_out, [g.b_out]])


def init_params(hidden_width: int, seed: int) -> InrParams:
    """Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases."""
    if hidden_width < 1:
        raise InrError(f"hidden width must be >= 1, got {hidden_width}")
    rng = philox_stream(seed, _INIT_STREAM)
    s_in = 1.0 / np.sqrt(2.0)
    s_out = 1.0 / np.sqrt(hidden_width)
    w_in = rng.uniform(-s_in, s_in, size=(hidden_width, 2))
    w_out = rng.uniform(-s_out, s_out, size=hidden_width)
    return InrParams(
        w_in=w_in,
        b_in=np.zeros(hidden_width),
        w_out=w_out,
        b_out=0.0,
        seed=int(seed),
    )


def _forward_ordered(params: InrParams, lo: np.ndarray, hi: np.ndarray):
    x = np.stack([lo, hi], axis=-1)
    hidden = np.tanh(x @ params.w_in.T + params.b_in)
    return expit(hidden @ params.w_out + params.b_out)


def forward(params: InrParams, x, y):
    """Symmetric edge probability; scalars or broadcastable arrays."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if (x.size and (x.min() < 0.0 or x.max() > 1.0)) or (
        y.size and (y.min() < 0.0 or y.max() > 1.0)
    ):
        raise InrError("coordinates outside the unit square")
    x, y = np.broadcast_arrays(x, y)
    out = _forward_ordered(params, np.minimum(x, y), np.maximum(x, y))
    if out.ndim == 0:
        return float(out)
    return out


def _pair_probabilities(params: InrParams, tuples: np.ndarray):
    """Edge probabilities q (L, 6) plus the intermediates needed to backprop.

    The returned hidden buffer is private to the caller and may be reused
    in place by the backward pass.
    """
    a = tuples[:, [p[0] for p in PAIR_SLOTS]]
    b = tuples[:, [p[1] for p in PAIR_SLOTS]]
    x = np.stack([np.minimum(a, b), np.maximum(a, b)], axis=-1)  # (L, 6, 2)
    hidden = x @ params.w_in.T  # (L, 6, H)
    hidden += params.b_in
    np.tanh(hidden, out=hidden)
    q = expit(hidden @ params.w_out + params.b_out)  # (L, 6)
    return q, hidden, x


def _motif_products(q: np.ndarray):
    """Monte-Carlo densities and per-factor leave-one-out products.

    Returns (mhat, factor_info) where factor_info[f] is a list of
    (slot, sign, leave_one_out) triples; the density derivative w.r.t.
    q[:, slot] is sign * leave_one_out / L.
    """
    num = q.shape[0]
    mhat = np.empty(NUM_MOTIFS)
    factor_info = []
    for f in range(NUM_MOTIFS):
        edge_slots, gap_slots = _MOTIF_FACTORS[f]
        cols = [q[:, s] for s in edge_slots] + [1.0 - q[:, s] for s in gap_slots]
        signs = [1.0] * len(edge_slots) + [-1.0] * len(gap_slots)
        slots = list(edge_slots) + list(gap_slots)
        factors = np.stack(cols, axis=1)  # (L, P)
        p = factors.shape[1]
        prefix = np.ones((num, p + 1))
        np.cumprod(factors, axis=1, out=prefix[:, 1:])
        suffix = np.ones((num, p + 1))
        np.cumprod(factors[:, ::-1], axis=1, out=suffix[:, 1:])
        suffix = suffix[:, ::-1]
        mhat[f] = prefix[:, -1].mean()
        loo = prefix[:, :-1] * suffix[:, 1:]  # product of the other factors
        factor_info.append(list(zip(slots, signs, loo.T)))
    return mhat, factor_info


def mc_moments(params: InrParams, tuples: np.ndarray) -> np.ndarray:
    """Monte-Carlo induced densities for a fixed tuple batch (no gradient)."""
    tuples = _check_tuples(tuples)
    q, _, _ = _pair_probabilities(params, tuples)
    mhat, _ = _motif_products(q)
    return mhat


def _check_tuples(tuples: np.ndarray) -> np.ndarray:
    tuples = np.asarray(tuples, dtype=float)
    if tuples.ndim != 2 or tuples.shape[1] != 4 or tuples.shape[0] < 1:
        raise InrError(f"tuples must be a non-empty (L, 4) array, got {tuples.shape}")
    if tuples.min() < 0.0 or tuples.max() > 1.0:
        raise InrError("tuple coordinates outside [0, 1]")
    return tuples


def loss_and_grad(
    params: InrParams,
    tuples: np.ndarray,
    target,
    weights: np.ndarray,
) -> tuple[float, GradVector, MomentVector]:
    """Weighted-MSE moment loss, its exact gradient, and the MC densities."""
    tuples = _check_tuples(tuples)
    target = target.densities if isinstance(target, MomentVector) else np.asarray(target, float)
    weights = np.asarray(weights, dtype=float)
    if target.shape != (NUM_MOTIFS,) or weights.shape != (NUM_MOTIFS,):
        raise InrError("target and weights must have one entry per motif")
    if weights.min() < 0.0:
        raise InrError("weights must be non-negative")

    num = tuples.shape[0]
    q, hidden, x = _pair_probabilities(params, tuples)
    mhat, factor_info = _motif_products(q)

    residual = target - mhat
    loss = float(np.sum(weights * residual**2))

    dq = np.zeros_like(q)
    for f in range(NUM_MOTIFS):
        upstream = -2.0 * weights[f] * residual[f] / num
        if upstream == 0.0:
            continue
        for slot, sign, loo in factor_info[f]:
            dq[:, slot] += (upstream * sign) * loo

    dlogit = dq
    dlogit *= q
    dlogit *= 1.0 - q  # sigmoid derivative q(1-q)
    g_b_out = float(dlogit.sum())
    g_w_out = dlogit.reshape(-1) @ hidden.reshape(-1, params.hidden_width)
    # Reuse the hidden buffer: h -> (1 - h^2) * dlogit * w_out == dz
    hidden *= hidden
    np.subtract(1.0, hidden, out=hidden)
    hidden *= dlogit[..., None]
    hidden *= params.w_out
    flat_dz = hidden.reshape(-1, params.hidden_width)
    g_b_in = flat_dz.sum(axis=0)
    g_w_in = flat_dz.T @ x.reshape(-1, 2)

    grad = GradVector(w_in=g_w_in, b_in=g_b_in, w_out=g_w_out, b_out=g_b_out)
    return loss, grad, MomentVector(mhat, ("model", float(num)))


# ---------------------------------------------------------------------------
# Model file: text header then every parameter as a decimal float, one per
# line, in fixed order w_in (row-major), b_in, w_out, b_out.

_MODEL_MAGIC = "inr-graphon"
_MODEL_VERSION = 1


class ModelFormatError(ValueError):
    pass


def model_to_text(params: InrParams) -> str:
    lines = [
        f"{_MODEL_MAGIC} v{_MODEL_VERSION}",
        f"hidden {params.hidden_width}",
        f"activation {params.activation}",
        f"seed {params.seed}",
    ]
    lines.extend(format(v, ".17g") for v in params_to_vector(params))
    return "\n".join(lines)


def model_from_text(text: str) -> InrParams:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if len(lines) < 5 or lines[0] != f"{_MODEL_MAGIC} v{_MODEL_VERSION}":
        raise ModelFormatError("not a recognized model file")
    fields = {}
    for ln in lines[1:4]:
        key, _, value = ln.partition(" ")
        fields[key] = value
    try:
        h = int(fields["hidden"])
        seed = int(fields["seed"])
        activation = fields["activation"]
    except (KeyError, ValueError):
        raise ModelFormatError("bad model header") from None
    values = lines[4:]
    expected = 2 * h + h + h + 1
    if len(values) != expected:
        raise ModelFormatError(f"expected {expected} parameters, found {len(values)}")
    try:
        vec = np.array([float(v) for v in values])
    except ValueError:
        raise ModelFormatError("non-numeric parameter") from None
    template = InrParams(
        w_in=np.zeros((h, 2)), b_in=np.zeros(h), w_out=np.zeros(h), b_out=0.0,
        activation=activation, seed=seed,
    )
    return vector_to_params(vec, template)


def save_model(params: InrParams, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(model_to_text(params) + "\n")


def load_model(path: str) -> InrParams:
    with open(path) as fh:
        return model_from_text(fh.read())
