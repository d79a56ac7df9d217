"""Graphon kinds: analytic closed forms, constant, cosine, grid, model-backed.

Every graphon is an immutable object with a vectorized ``evaluate(x, y)``
mapping [0,1]^2 -> [0,1].  Symmetry is exact for all kinds: the closed
forms are symmetric expressions, grids are symmetric matrices, and the
model kind orders its inputs canonically before the forward pass.
"""

from __future__ import annotations

import numpy as np


class GraphonDomainError(ValueError):
    """Coordinates outside the unit square."""


class Graphon:
    """Base class; subclasses implement _eval on validated arrays."""

    def evaluate(self, x, y):
        """Evaluate the kernel; accepts scalars or broadcastable arrays."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.size and (x.min() < 0.0 or x.max() > 1.0):
            raise GraphonDomainError("x outside [0, 1]")
        if y.size and (y.min() < 0.0 or y.max() > 1.0):
            raise GraphonDomainError("y outside [0, 1]")
        v = self._eval(x, y)
        if np.ndim(v) == 0:
            return float(v)
        return v

    def _eval(self, x, y):  # pragma: no cover - abstract
        raise NotImplementedError

    def describe(self) -> str:  # pragma: no cover - abstract
        raise NotImplementedError


class ConstantGraphon(Graphon):
    def __init__(self, p: float):
        p = float(p)
        if not (0.0 <= p <= 1.0):
            raise ValueError(f"constant graphon level must be in [0, 1], got {p}")
        self.p = p

    def _eval(self, x, y):
        return np.broadcast_to(np.float64(self.p), np.broadcast_shapes(x.shape, y.shape)).copy()

    def describe(self) -> str:
        return f"constant:{self.p:g}"


class CosineGraphon(Graphon):
    """W(x, y) = 0.5 + 0.1 cos(pi x) cos(pi y)."""

    def _eval(self, x, y):
        return 0.5 + 0.1 * np.cos(np.pi * x) * np.cos(np.pi * y)

    def describe(self) -> str:
        return "cosine"


def _block(x):
    # Half-block index with the left boundary closed and x = 1 clamped into
    # the upper block; fixes the measure-zero boundary deterministically.
    return np.minimum(np.floor(2.0 * x), 1.0)


_ANALYTIC_FORMS = {
    1: lambda x, y: x * y,
    2: lambda x, y: np.exp(-(x**0.7 + y**0.7)),
    3: lambda x, y: 0.25 * (x**2 + y**2 + np.sqrt(x) + np.sqrt(y)),
    4: lambda x, y: 0.5 * (x + y),
    5: lambda x, y: 1.0 / (1.0 + np.exp(-2.0 * (x**2 + y**2))),
    6: lambda x, y: 1.0 / (1.0 + np.exp(-np.maximum(x, y) ** 2 - np.minimum(x, y) ** 4)),
    7: lambda x, y: np.exp(-np.maximum(x, y) ** 0.75),
    8: lambda x, y: np.exp(-0.5 * (np.minimum(x, y) + np.sqrt(x) + np.sqrt(y))),
    9: lambda x, y: np.log1p(np.maximum(x, y)),
    10: lambda x, y: np.abs(x - y),
    11: lambda x, y: 1.0 - np.abs(x - y),
    12: lambda x, y: np.where(_block(x) == _block(y), 0.8, 0.0),
    13: lambda x, y: np.where(_block(x) != _block(y), 0.8, 0.0),
}


class AnalyticGraphon(Graphon):
    """One of the 13 closed-form benchmark graphons."""

    def __init__(self, graphon_id: int):
        graphon_id = int(graphon_id)
        if graphon_id not in _ANALYTIC_FORMS:
            raise ValueError(f"analytic graphon id must be in 1..13, got {graphon_id}")
        self.graphon_id = graphon_id
        self._form = _ANALYTIC_FORMS[graphon_id]

    def _eval(self, x, y):
        return self._form(x, y)

    def describe(self) -> str:
        return f"analytic:{self.graphon_id}"


def analytic_graphon(graphon_id: int) -> AnalyticGraphon:
    return AnalyticGraphon(graphon_id)


def cosine_graphon() -> CosineGraphon:
    return CosineGraphon()


class GridGraphon(Graphon):
    """Piecewise-constant graphon backed by a symmetric R x R matrix.

    Lookup is nearest-cell at cell centers (no interpolation), which keeps
    symmetry exact and matches step-function semantics.
    """

    def __init__(self, values: np.ndarray):
        values = np.asarray(values, dtype=float)
        validate_grid(values)
        self.values = values
        self.values.setflags(write=False)

    @property
    def resolution(self) -> int:
        return self.values.shape[0]

    def _eval(self, x, y):
        r = self.resolution
        i = np.minimum((x * r).astype(np.int64), r - 1)
        j = np.minimum((y * r).astype(np.int64), r - 1)
        return self.values[i, j]

    def describe(self) -> str:
        return f"grid:R={self.resolution}"


class ModelGraphon(Graphon):
    """Graphon backed by trained coordinate-network parameters."""

    def __init__(self, params):
        self.params = params

    def _eval(self, x, y):
        from .inr import forward

        return forward(self.params, x, y)

    def describe(self) -> str:
        return f"model:H={self.params.hidden_width}"


class GridFormatError(ValueError):
    """Malformed grid CSV or invalid grid values."""


def validate_grid(values: np.ndarray) -> None:
    if values.ndim != 2 or values.shape[0] != values.shape[1] or values.shape[0] < 1:
        raise GridFormatError(f"grid must be square with R >= 1, got shape {values.shape}")
    if not np.all(np.isfinite(values)):
        raise GridFormatError("grid contains non-finite entries")
    if values.min() < 0.0 or values.max() > 1.0:
        raise GridFormatError("grid entries must lie in [0, 1]")
    if not np.array_equal(values, values.T):
        raise GridFormatError("grid must be symmetric")


def discretize(w: Graphon, resolution: int) -> np.ndarray:
    """Sample w at cell centers ((i+0.5)/R, (j+0.5)/R) into an R x R matrix."""
    if resolution < 1:
        raise ValueError(f"resolution must be >= 1, got {resolution}")
    centers = (np.arange(resolution) + 0.5) / resolution
    values = np.asarray(w.evaluate(centers[:, None], centers[None, :]), dtype=float)
    return values


def grid_to_csv(values: np.ndarray) -> str:
    """Grid CSV: first line R, then R comma-separated rows (exact decimals)."""
    validate_grid(values)
    lines = [str(values.shape[0])]
    for row in values:
        lines.append(",".join(format(x, ".17g") for x in row))
    return "\n".join(lines)


def grid_from_csv(text: str) -> np.ndarray:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise GridFormatError("empty grid file")
    try:
        r = int(lines[0])
    except ValueError:
        raise GridFormatError(f"bad resolution line {lines[0]!r}") from None
    if len(lines) != r + 1:
        raise GridFormatError(f"expected {r} rows, found {len(lines) - 1}")
    try:
        values = np.array([[float(t) for t in ln.split(",")] for ln in lines[1:]], dtype=float)
    except ValueError:
        raise GridFormatError("non-numeric grid entry") from None
    if values.shape != (r, r):
        raise GridFormatError(f"row lengths do not match resolution {r}")
    validate_grid(values)
    return values


def save_grid(values: np.ndarray, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(grid_to_csv(values) + "\n")


def load_grid(path: str) -> np.ndarray:
    with open(path) as fh:
        return grid_from_csv(fh.read())


def graphon_from_spec(spec: str) -> Graphon:
    """Build a graphon from a CLI spec string.

    Accepted forms: "<id 1..13>", "constant:<p>", "cosine", "grid:<path>",
    "model:<path>".
    """
    spec = spec.strip()
    if spec == "cosine":
        return CosineGraphon()
    if spec.startswith("constant:"):
        return ConstantGraphon(float(spec.split(":", 1)[1]))
    if spec.startswith("grid:"):
        return GridGraphon(load_grid(spec.split(":", 1)[1]))
    if spec.startswith("model:"):
        from .inr import load_model

        return ModelGraphon(load_model(spec.split(":", 1)[1]))
    try:
        return AnalyticGraphon(int(spec))
    except ValueError:
        raise ValueError(
            f"bad graphon spec {spec!r}: expected id 1..13, constant:p, cosine, "
            "grid:PATH, or model:PATH"
        ) from None
