"""Two-layer perceptron baseline: tanh hidden units, logistic output.

Weights are stored with the bias as the last column, so ``w1`` is
``(M, d + 1)`` and ``w2`` is ``(1, M + 1)``. Training is plain full-batch
backpropagation with momentum on the squared error.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .network import Classification

SCHEMA_VERSION = 1


def logistic(a):
    with np.errstate(over="ignore"):
        return 1.0 / (1.0 + np.exp(-a))


@dataclass(frozen=True, eq=False)
class MlpModel:
    w1: np.ndarray
    w2: np.ndarray

    def __post_init__(self):
        w1 = np.array(self.w1, dtype=float)
        w2 = np.array(self.w2, dtype=float).reshape(1, -1)
        if w1.ndim != 2 or w1.shape[0] < 1 or w1.shape[1] < 2:
            raise ValueError(f"w1 must be (M, d+1) with d, M >= 1, got {w1.shape}")
        if w2.shape != (1, w1.shape[0] + 1):
            raise ValueError(f"w2 must be (1, {w1.shape[0] + 1}), got {w2.shape}")
        if not (np.all(np.isfinite(w1)) and np.all(np.isfinite(w2))):
            raise ValueError("weights must be finite")
        w1.flags.writeable = False
        w2.flags.writeable = False
        object.__setattr__(self, "w1", w1)
        object.__setattr__(self, "w2", w2)

    def __eq__(self, other):
        if not isinstance(other, MlpModel):
            return NotImplemented
        return np.array_equal(self.w1, other.w1) and np.array_equal(self.w2, other.w2)

    __hash__ = None

    @property
    def d(self) -> int:
        return self.w1.shape[1] - 1

    @property
    def M(self) -> int:
        return self.w1.shape[0]

    def _inputs(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1:] != (self.d,) or x.ndim > 2:
            raise ValueError(f"expected {self.d} inputs per record, got shape {x.shape}")
        return x

    def _hidden(self, x):
        return np.tanh(x @ self.w1[:, :-1].T + self.w1[:, -1])

    def forward(self, x):
        """Network output for one input vector (float) or a batch (array)."""
        x = self._inputs(x)
        y = logistic(self._hidden(x) @ self.w2[0, :-1] + self.w2[0, -1])
        return float(y) if x.ndim == 1 else y

    def classify(self, x) -> Classification:
        y = self.forward(x)
        return Classification(int(y >= 0.5), y)

    def classify_batch(self, x) -> np.ndarray:
        return (self.forward(np.atleast_2d(x)) >= 0.5).astype(np.int64)

    def gradient(self, x, label) -> tuple[np.ndarray, np.ndarray]:
        """Gradient of ``(y - label)**2`` w.r.t. (w1, w2).

        With a batch of inputs the per-record gradients are averaged.
        """
        x = np.atleast_2d(self._inputs(x))
        t = np.broadcast_to(np.asarray(label, dtype=float), (len(x),))
        h = self._hidden(x)
        y = logistic(h @ self.w2[0, :-1] + self.w2[0, -1])
        delta_out = 2.0 * (y - t) * y * (1.0 - y)  # (n,)
        delta_hid = delta_out[:, None] * self.w2[0, :-1] * (1.0 - h * h)  # (n, M)
        n = len(x)
        g2 = np.append(delta_out @ h, delta_out.sum())[None, :] / n
        g1 = np.hstack([delta_hid.T @ x, delta_hid.sum(axis=0)[:, None]]) / n
        return g1, g2

    def loss(self, x, labels) -> float:
        y = np.atleast_1d(self.forward(np.atleast_2d(x)))
        return float(np.mean((y - np.asarray(labels, dtype=float)) ** 2))

    # serialisation ---------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "d": self.d,
            "M": self.M,
            "w1": self.w1.tolist(),
            "w2": self.w2.tolist(),
        }

    @classmethod
    def from_dict(cls, d) -> "MlpModel":
        if d.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {d.get('schema_version')!r}")
        model = cls(np.array(d["w1"], dtype=float), np.array(d["w2"], dtype=float))
        if (model.d, model.M) != (d["d"], d["M"]):
            raise ValueError("d / M do not match the stored weight shapes")
        return model

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "MlpModel":
        return cls.from_dict(json.loads(text))

    def save(self, path) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def load(cls, path) -> "MlpModel":
        return cls.from_json(Path(path).read_text())


@dataclass(frozen=True)
class TrainingConfig:
    cycles: int = 1000
    learning_rate: float = 0.01
    momentum: float = 0.9
    seed: int = 0

    def __post_init__(self):
        if self.cycles < 1:
            raise ValueError("cycles must be >= 1")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be > 0")
        if not 0 <= self.momentum < 1:
            raise ValueError("momentum must lie in [0, 1)")


def init_mlp(d: int, M: int, rng: np.random.Generator) -> MlpModel:
    """Uniform weights in +-1/sqrt(fan_in) for each layer."""
    if d < 1 or M < 1:
        raise ValueError("need d >= 1 and M >= 1")
    a1, a2 = 1 / np.sqrt(d), 1 / np.sqrt(M)
    return MlpModel(rng.uniform(-a1, a1, (M, d + 1)), rng.uniform(-a2, a2, (1, M + 1)))


def train_mlp(inputs, labels, config: TrainingConfig = TrainingConfig(), hidden: int = 17, check_balance: bool = True) -> MlpModel:
    """Full-batch gradient descent with momentum for `config.cycles` passes.

    The classes must be balanced (see ``data.balance``) unless
    `check_balance` is switched off.
    """
    x = np.asarray(inputs, dtype=float)
    y = np.asarray(labels, dtype=float)
    if x.ndim != 2 or len(x) == 0 or len(x) != len(y):
        raise ValueError("need a non-empty (n, d) input matrix and n labels")
    if not np.all((y == 0) | (y == 1)):
        raise ValueError("labels must be 0 or 1")
    if check_balance and np.sum(y == 1) != np.sum(y == 0):
        raise ValueError(f"unbalanced training data: {int(np.sum(y == 1))} positive vs {int(np.sum(y == 0))} negative")

    model = init_mlp(x.shape[1], hidden, np.random.default_rng(config.seed))
    w1, w2 = model.w1.copy(), model.w2.copy()
    v1, v2 = np.zeros_like(w1), np.zeros_like(w2)
    for _ in range(config.cycles):
        g1, g2 = MlpModel(w1, w2).gradient(x, y)
        v1 = config.momentum * v1 - config.learning_rate * g1
        v2 = config.momentum * v2 - config.learning_rate * g2
        w1 = w1 + v1
        w2 = w2 + v2
    return MlpModel(w1, w2)
