"""Confusion matrices, accuracy, model comparison and weight relation reports."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .network import RelationalNetwork


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def to_dict(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn}


def confusion(truth, predicted) -> ConfusionMatrix:
    t = np.asarray(truth)
    p = np.asarray(predicted)
    if t.shape != p.shape or t.ndim != 1:
        raise ValueError(f"truth and predictions must be equal-length vectors, got {t.shape} and {p.shape}")
    if len(t) == 0:
        raise ValueError("cannot build a confusion matrix from no predictions")
    for name, v in (("truth", t), ("predicted", p)):
        if not np.all((v == 0) | (v == 1)):
            raise ValueError(f"{name} labels must be 0 or 1")
    t, p = t == 1, p == 1
    return ConfusionMatrix(
        tp=int(np.sum(t & p)),
        fp=int(np.sum(~t & p)),
        tn=int(np.sum(~t & ~p)),
        fn=int(np.sum(t & ~p)),
    )


def accuracy(m: ConfusionMatrix) -> float:
    """Percentage of correct predictions, 100 * (TP + TN) / total."""
    if m.total < 1:
        raise ValueError("accuracy of an empty confusion matrix is undefined")
    return 100.0 * (m.tp + m.tn) / m.total


def _ratio(num, den):
    return num / den if den else None


def rates(m: ConfusionMatrix) -> dict:
    """Positive predictive value, sensitivity and specificity.

    A rate whose denominator is zero is reported as None.
    """
    return {
        "ppv": _ratio(m.tp, m.tp + m.fp),
        "tpr": _ratio(m.tp, m.tp + m.fn),
        "tnr": _ratio(m.tn, m.tn + m.fp),
    }


# ---------------------------------------------------------------------------
# Comparison table


@dataclass(frozen=True)
class ComparisonRow:
    name: str
    matrix: ConfusionMatrix
    accuracy: float
    ppv: float | None
    tpr: float | None
    tnr: float | None

    def metrics(self) -> dict:
        return {"accuracy": round(self.accuracy, 2), "ppv": self.ppv, "tpr": self.tpr, "tnr": self.tnr}


def compare(models: Sequence[tuple[str, ConfusionMatrix]]) -> list[ComparisonRow]:
    """One row per model, best accuracy first (stable for ties)."""
    if not models:
        raise ValueError("nothing to compare")
    rows = [ComparisonRow(name, m, accuracy(m), **rates(m)) for name, m in models]
    return sorted(rows, key=lambda r: -r.accuracy)


def comparison_to_dict(rows: Sequence[ComparisonRow]) -> dict:
    return {"models": [{"name": r.name, "matrix": r.matrix.to_dict(), "metrics": r.metrics()} for r in rows]}


def _fmt(v):
    return "-" if v is None else f"{v:.4f}"


def format_comparison(rows: Sequence[ComparisonRow]) -> str:
    header = ("model", "accuracy%", "ppv", "tpr", "tnr", "tp", "fn", "fp", "tn")
    body = [
        (r.name, f"{r.accuracy:.2f}", _fmt(r.ppv), _fmt(r.tpr), _fmt(r.tnr),
         str(r.matrix.tp), str(r.matrix.fn), str(r.matrix.fp), str(r.matrix.tn))
        for r in rows
    ]
    widths = [max(len(row[i]) for row in [header, *body]) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) if i == 0 else c.rjust(w) for i, (c, w) in enumerate(zip(row, widths))) for row in [header, *body]]
    return "\n".join(line.rstrip() for line in lines) + "\n"


def accuracy_plot_csv(rows: Sequence[ComparisonRow]) -> str:
    """Two-column CSV (model, accuracy) for bar-chart plotting."""
    return "model,accuracy\n" + "".join(f"{r.name},{r.accuracy:.2f}\n" for r in rows)


# ---------------------------------------------------------------------------
# Relations


@dataclass(frozen=True)
class RelationEntry:
    feature_name: str
    weight_into_target: float
    weight_from_target: float


@dataclass(frozen=True)
class RelationReport:
    target_name: str
    activation: str
    entries: tuple[RelationEntry, ...]

    def to_dict(self) -> dict:
        return {
            "target": self.target_name,
            "activation": self.activation,
            "entries": [vars(e) for e in self.entries],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_text(self) -> str:
        width = max(len(e.feature_name) for e in self.entries)
        lines = [f"# {self.activation} network, weights into {self.target_name}"]
        lines += [f"{e.feature_name.ljust(width)}  {e.weight_into_target:.4f}" for e in self.entries]
        return "\n".join(lines) + "\n"


def relation_report(net: RelationalNetwork, target) -> RelationReport:
    """Rank the other nodes by the weight of their edge into `target`.

    Ties keep node order.
    """
    t = net.index(target)
    entries = [
        RelationEntry(net.node_names[j], float(net.weights[t, j]), float(net.weights[j, t]))
        for j in range(net.n_nodes)
        if j != t
    ]
    entries.sort(key=lambda e: -e.weight_into_target)
    return RelationReport(net.node_names[t], net.activation.value, tuple(entries))
