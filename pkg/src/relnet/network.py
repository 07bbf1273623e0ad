"""Relational network: every feature is a node predicted from all the others.

Node ``k`` is estimated as ``sum_{j != k} w[k, j] * f(x_j)`` where ``f`` is
one edge activation shared by the whole network. There are no biases and no
hidden nodes; the weight matrix itself is the model and doubles as a
readable map of how strongly each feature depends on each other one.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

SCHEMA_VERSION = 1


class Activation(str, Enum):
    LINEAR = "linear"
    LOGISTIC = "logistic"
    TANH = "tanh"

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self is Activation.LINEAR:
            return x
        if self is Activation.LOGISTIC:
            with np.errstate(over="ignore"):
                return 1.0 / (1.0 + np.exp(-x))
        return np.tanh(x)


class Classification(NamedTuple):
    label: int
    raw: float


@dataclass(frozen=True, eq=False)
class RelationalNetwork:
    """Immutable weight matrix plus node names and edge activation.

    ``weights[k, j]`` is the influence of node ``j`` on node ``k``. The
    diagonal is zero and every weight lies in [0, 1].
    """

    node_names: tuple[str, ...]
    weights: np.ndarray
    activation: Activation

    def __post_init__(self):
        names = tuple(self.node_names)
        w = np.array(self.weights, dtype=float)  # private copy
        n = len(names)
        if n < 2:
            raise ValueError("a relational network needs at least two nodes")
        if w.shape != (n, n):
            raise ValueError(f"weights must be {n}x{n}, got {w.shape}")
        if not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")
        if np.any(np.diag(w) != 0):
            raise ValueError("self-edges are not allowed: diagonal must be zero")
        if np.any(w < 0) or np.any(w > 1):
            raise ValueError("weights must lie in [0, 1]")
        w.flags.writeable = False
        object.__setattr__(self, "node_names", names)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "activation", Activation(self.activation))

    def __eq__(self, other):
        if not isinstance(other, RelationalNetwork):
            return NotImplemented
        return (
            self.node_names == other.node_names
            and self.activation == other.activation
            and np.array_equal(self.weights, other.weights)
        )

    __hash__ = None

    @property
    def n_nodes(self) -> int:
        return len(self.node_names)

    def index(self, node) -> int:
        """Accept a node name or an integer index, return the index."""
        if isinstance(node, str):
            try:
                return self.node_names.index(node)
            except ValueError:
                raise KeyError(f"no node named {node!r}") from None
        k = int(node)
        if not 0 <= k < self.n_nodes:
            raise IndexError(f"node index {k} out of range for {self.n_nodes} nodes")
        return k

    def _check(self, observed) -> np.ndarray:
        x = np.asarray(observed, dtype=float)
        if x.shape[-1:] != (self.n_nodes,) or x.ndim > 2:
            raise ValueError(f"expected {self.n_nodes} node values per record, got shape {x.shape}")
        return x

    def node_predict(self, observed, k) -> float:
        """Raw (unclamped) estimate of node `k` from the other nodes.

        The k-th observed value is never read.
        """
        k = self.index(k)
        x = self._check(observed)
        if x.ndim != 1:
            raise ValueError("node_predict takes a single record")
        others = np.arange(self.n_nodes) != k
        return float(self.weights[k, others] @ self.activation(x[others]))

    def predict_all(self, observed) -> np.ndarray:
        """Raw estimates for every node; accepts one record or an (n, N) batch."""
        x = self._check(observed)
        return self.activation(x) @ self.weights.T

    def classify(self, observed, target) -> Classification:
        """Clamp the target's raw estimate into [0, 1] and round (ties go up)."""
        raw = min(max(self.node_predict(observed, target), 0.0), 1.0)
        return Classification(int(raw >= 0.5), raw)

    def classify_batch(self, observed, target) -> np.ndarray:
        k = self.index(target)
        raw = np.clip(self.predict_all(np.atleast_2d(observed))[:, k], 0.0, 1.0)
        return (raw >= 0.5).astype(np.int64)

    # serialisation ---------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "node_names": list(self.node_names),
            "activation": self.activation.value,
            "weights": self.weights.tolist(),
        }

    @classmethod
    def from_dict(cls, d) -> "RelationalNetwork":
        if d.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {d.get('schema_version')!r}")
        return cls(tuple(d["node_names"]), np.array(d["weights"], dtype=float), Activation(d["activation"]))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RelationalNetwork":
        return cls.from_dict(json.loads(text))

    def save(self, path) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def load(cls, path) -> "RelationalNetwork":
        return cls.from_json(Path(path).read_text())


def zero_network(node_names: Sequence[str], activation=Activation.LINEAR) -> RelationalNetwork:
    n = len(node_names)
    return RelationalNetwork(tuple(node_names), np.zeros((n, n)), activation)
