"""Metropolis-Hastings search over relational network weights.

The chain is used as an optimiser: it walks the weight space with reflected
Gaussian proposals and Metropolis acceptance, and the lowest-error matrix it
ever visits is returned. ``temperature=0`` turns it into greedy descent.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .network import Activation, RelationalNetwork


class Mode(str, Enum):
    ALL_FEATURES = "all-features"
    TARGET_ONLY = "target-only"


@dataclass(frozen=True)
class SamplerConfig:
    seed: int = 0
    max_iterations: int = 20_000
    step_scale: float = 0.05
    temperature: float = 0.01
    mode: Mode = Mode.ALL_FEATURES
    target: int | None = None  # None means the last node
    trace_every: int = 1

    def __post_init__(self):
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be >= 0")
        if not self.step_scale > 0:
            raise ValueError("step_scale must be > 0")
        if not self.temperature >= 0:
            raise ValueError("temperature must be >= 0")
        if self.trace_every < 1:
            raise ValueError("trace_every must be >= 1")
        object.__setattr__(self, "mode", Mode(self.mode))


@dataclass
class TrainReport:
    best_error: float
    error_trace: list[float] = field(default_factory=list)
    accepted_count: int = 0
    iterations_run: int = 0
    mode: Mode = Mode.ALL_FEATURES
    target: int = 0

    def to_dict(self) -> dict:
        return {
            "best_error": self.best_error,
            "accepted_count": self.accepted_count,
            "iterations_run": self.iterations_run,
            "mode": Mode(self.mode).value,
            "target": self.target,
            "error_trace": list(self.error_trace),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _squared_error(values: np.ndarray, activated: np.ndarray, weights: np.ndarray, mode: Mode, target: int) -> float:
    if mode is Mode.TARGET_ONLY:
        resid = values[:, target] - activated @ weights[target]
    else:
        resid = values - activated @ weights.T
    return float(np.mean(resid * resid))


def _check_data(data, n_nodes: int) -> np.ndarray:
    x = np.asarray(data, dtype=float)
    if x.ndim != 2 or len(x) == 0:
        raise ValueError("need a non-empty (records, nodes) matrix")
    if x.shape[1] != n_nodes:
        raise ValueError(f"data has {x.shape[1]} columns, network has {n_nodes} nodes")
    return x


def mse(net: RelationalNetwork, data, mode=Mode.ALL_FEATURES, target=None) -> float:
    """Mean squared difference between recorded and reconstructed node values.

    ``all-features`` averages over every (record, node) pair; ``target-only``
    averages over records at the target node only.
    """
    x = _check_data(data, net.n_nodes)
    t = net.n_nodes - 1 if target is None else net.index(target)
    return _squared_error(x, net.activation(x), net.weights, Mode(mode), t)


def reflect(values):
    """Fold values back into [0, 1] by mirroring at the walls.

    Same result as repeatedly mapping v < 0 to -v and v > 1 to 2 - v.
    """
    t = np.mod(values, 2.0)
    return np.where(t > 1.0, 2.0 - t, t)


def propose(weights, step_scale: float, rng: np.random.Generator) -> np.ndarray:
    """Gaussian step on every off-diagonal weight, reflected into [0, 1]."""
    w = np.asarray(weights, dtype=float)
    off = ~np.eye(len(w), dtype=bool)
    cand = np.zeros_like(w)
    cand[off] = reflect(w[off] + step_scale * rng.standard_normal(off.sum()))
    return cand


def metropolis_accept(current_err: float, cand_err: float, temperature: float, rng: np.random.Generator) -> bool:
    """Always take a candidate that is no worse; take a worse one with
    probability ``exp(-(cand_err - current_err) / temperature)``, never at zero
    temperature."""
    if cand_err <= current_err:
        return True
    if temperature <= 0:
        return False
    return rng.random() < math.exp(-(cand_err - current_err) / temperature)


def initial_weights(n_nodes: int, rng: np.random.Generator) -> np.ndarray:
    w = rng.random((n_nodes, n_nodes))
    np.fill_diagonal(w, 0.0)
    return w


def train(
    data,
    activation=Activation.LINEAR,
    config: SamplerConfig = SamplerConfig(),
    node_names: Sequence[str] | None = None,
) -> tuple[RelationalNetwork, TrainReport]:
    """Fit a relational network to normalised records.

    `data` is an (n, N) matrix with every feature in [0, 1] (the target is
    just another column). Returns the best network visited and a report.
    """
    activation = Activation(activation)
    x = np.asarray(data, dtype=float)
    if x.ndim != 2 or x.shape[1] < 2:
        raise ValueError("need a (records, nodes) matrix with at least two nodes")
    n_nodes = x.shape[1]
    names = tuple(node_names) if node_names is not None else tuple(f"x{i}" for i in range(n_nodes))
    x = _check_data(x, len(names))
    target = n_nodes - 1 if config.target is None else config.target
    if not 0 <= target < n_nodes:
        raise IndexError(f"target {target} out of range")

    rng = np.random.default_rng(config.seed)
    activated = activation(x)  # edge inputs never change during the walk
    if config.mode is Mode.TARGET_ONLY:
        values = x[:, target]
    else:
        values = x
    off = ~np.eye(n_nodes, dtype=bool)
    n_off = int(off.sum())
    w = np.zeros((n_nodes, n_nodes))

    def err(off_values):
        # same arithmetic as _squared_error, on a reused buffer
        w[off] = off_values
        if config.mode is Mode.TARGET_ONLY:
            resid = values - activated @ w[target]
        else:
            resid = values - activated @ w.T
        return float(np.mean(resid * resid))

    # the walk runs on the off-diagonal entries only; draws match propose()
    current = initial_weights(n_nodes, rng)[off]
    current_err = err(current)
    best, best_err = current, current_err
    trace = [best_err]
    accepted = 0
    for it in range(1, config.max_iterations + 1):
        cand = reflect(current + config.step_scale * rng.standard_normal(n_off))
        cand_err = err(cand)
        if metropolis_accept(current_err, cand_err, config.temperature, rng):
            current, current_err = cand, cand_err
            accepted += 1
            if current_err < best_err:
                best, best_err = current, current_err
        if it % config.trace_every == 0 or it == config.max_iterations:
            trace.append(best_err)

    best_w = np.zeros((n_nodes, n_nodes))
    best_w[off] = best
    net = RelationalNetwork(names, best_w, activation)
    report = TrainReport(best_err, trace, accepted, config.max_iterations, config.mode, target)
    return net, report
