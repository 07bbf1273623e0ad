"""Survey data handling: schema, validation, encoding, balancing, splitting.

Records are kept as raw integers (after look-up encoding of categorical
tokens) and only turned into model inputs by :func:`encode`. Normalisation
always uses the schema ranges, never per-sample statistics, so that the same
record encodes identically regardless of which dataset it sits in.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

KINDS = ("integer", "binary", "categorical")
ENCODINGS = ("normalized", "four_bit", "label")


@dataclass(frozen=True)
class Feature:
    name: str
    kind: str
    min: int
    max: int
    mlp_encoding: str = "normalized"
    categories: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"{self.name}: unknown kind {self.kind!r}")
        if self.mlp_encoding not in ENCODINGS:
            raise ValueError(f"{self.name}: unknown encoding {self.mlp_encoding!r}")
        if not self.min < self.max:
            raise ValueError(f"{self.name}: need min < max, got [{self.min}, {self.max}]")
        if self.mlp_encoding == "four_bit" and (self.min < 0 or self.max > 15):
            raise ValueError(f"{self.name}: four_bit features must lie in [0, 15]")
        if self.kind == "binary" and (self.min, self.max) != (0, 1):
            raise ValueError(f"{self.name}: binary features have range [0, 1]")
        if self.kind == "categorical":
            if not self.categories:
                raise ValueError(f"{self.name}: categorical feature without categories")
            if (self.min, self.max) != (1, len(self.categories)):
                raise ValueError(f"{self.name}: categorical range must be [1, {len(self.categories)}]")
        object.__setattr__(self, "categories", tuple(self.categories))

    @property
    def width(self) -> int:
        """Number of MLP input columns this feature occupies."""
        return {"normalized": 1, "four_bit": 4, "label": 0}[self.mlp_encoding]

    def to_dict(self) -> dict:
        d = {
            "name": self.name,
            "kind": self.kind,
            "min": self.min,
            "max": self.max,
            "mlp_encoding": self.mlp_encoding,
        }
        if self.categories:
            d["categories"] = list(self.categories)
        return d


@dataclass(frozen=True)
class FeatureSchema:
    features: tuple[Feature, ...]
    target_name: str

    def __post_init__(self):
        object.__setattr__(self, "features", tuple(self.features))
        names = self.names
        if len(names) < 2:
            raise ValueError("a schema needs at least two features")
        if len(set(names)) != len(names):
            raise ValueError("feature names must be unique")
        if self.target_name not in names:
            raise ValueError(f"target {self.target_name!r} is not a feature")
        for f in self.features:
            is_target = f.name == self.target_name
            if is_target != (f.mlp_encoding == "label"):
                raise ValueError("exactly the target feature uses the 'label' encoding")
        if self.target.kind != "binary":
            raise ValueError("the target feature must be binary")

    @property
    def names(self) -> list[str]:
        return [f.name for f in self.features]

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"no feature named {name!r}") from None

    @property
    def target_index(self) -> int:
        return self.index(self.target_name)

    @property
    def target(self) -> Feature:
        return self.features[self.target_index]

    @property
    def mlp_dim(self) -> int:
        return sum(f.width for f in self.features)

    def mlp_columns(self) -> list[str]:
        cols = []
        for f in self.features:
            if f.mlp_encoding == "normalized":
                cols.append(f.name)
            elif f.mlp_encoding == "four_bit":
                cols.extend(f"{f.name}_bit{b}" for b in (3, 2, 1, 0))
        return cols

    def to_dict(self) -> dict:
        return {"target": self.target_name, "features": [f.to_dict() for f in self.features]}

    @classmethod
    def from_dict(cls, d: Mapping) -> "FeatureSchema":
        feats = [
            Feature(
                name=f["name"],
                kind=f["kind"],
                min=int(f["min"]),
                max=int(f["max"]),
                mlp_encoding=f.get("mlp_encoding", "normalized"),
                categories=tuple(f.get("categories", ())),
            )
            for f in d["features"]
        ]
        return cls(tuple(feats), d["target"])

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    @classmethod
    def load(cls, path) -> "FeatureSchema":
        return cls.from_dict(json.loads(Path(path).read_text()))


def default_schema() -> FeatureSchema:
    """The six antenatal survey variables with their recorded ranges."""
    return FeatureSchema(
        (
            Feature("Age", "integer", 1, 60, "normalized"),
            Feature("Education", "integer", 0, 13, "four_bit"),
            Feature("Parity", "integer", 0, 15, "four_bit"),
            Feature("Gravidity", "integer", 0, 11, "four_bit"),
            Feature("FatherAge", "integer", 1, 90, "normalized"),
            Feature("HIV", "binary", 0, 1, "label"),
        ),
        target_name="HIV",
    )


# ---------------------------------------------------------------------------
# Field level encoding


def lookup_encode(token: str, table: Sequence[str]) -> int | None:
    """1-based position of `token` in `table`, or None if it is not listed."""
    if len(table) == 0:
        raise ValueError("empty look-up table")
    try:
        return list(table).index(token) + 1
    except ValueError:
        return None


def normalize(value, vmin: float, vmax: float):
    """Min-max scale `value` from [vmin, vmax] to [0, 1]. Works on arrays."""
    if not vmin < vmax:
        raise ValueError(f"need min < max, got [{vmin}, {vmax}]")
    v = np.asarray(value, dtype=float)
    if np.any(v < vmin) or np.any(v > vmax) or np.any(np.isnan(v)):
        raise ValueError(f"value outside [{vmin}, {vmax}]; validate before normalizing")
    out = (v - vmin) / (vmax - vmin)
    return float(out) if out.ndim == 0 else out


def denormalize(u, vmin: int, vmax: int):
    """Inverse of :func:`normalize`, rounded back onto the integer grid."""
    out = np.rint(vmin + np.asarray(u, dtype=float) * (vmax - vmin)).astype(np.int64)
    return int(out) if out.ndim == 0 else out


def four_bit(value) -> list[int]:
    """Unsigned 4-bit binary of `value`, most significant bit first."""
    if isinstance(value, (bool, np.bool_)) or int(value) != value or not 0 <= value <= 15:
        raise ValueError(f"four_bit needs an integer in [0, 15], got {value!r}")
    v = int(value)
    return [(v >> b) & 1 for b in (3, 2, 1, 0)]


def _four_bit_columns(values: np.ndarray) -> np.ndarray:
    v = np.asarray(values, dtype=np.int64)
    if v.size and (v.min() < 0 or v.max() > 15):
        raise ValueError("four_bit needs integers in [0, 15]")
    return np.stack([(v >> b) & 1 for b in (3, 2, 1, 0)], axis=-1).astype(float)


# ---------------------------------------------------------------------------
# Records


class Validation(NamedTuple):
    complete: bool
    bad_fields: tuple[str, ...]
    values: dict  # field -> int, or None when missing / dropped


def _coerce(value, feature: Feature):
    """Turn a raw field into an int on the feature's scale, or None."""
    if value is None:
        return None
    if isinstance(value, str):
        token = value.strip()
        if token == "":
            return None
        if feature.kind == "categorical":
            code = lookup_encode(token, feature.categories)
            if code is not None:
                return code
        try:
            value = float(token)
        except ValueError:
            return None
    if isinstance(value, (bool, np.bool_)):
        value = int(value)
    try:
        f = float(value)
    except (TypeError, ValueError):
        return None
    if not np.isfinite(f) or f != int(f):
        return None
    return int(f)


def validate(record: Mapping, schema: FeatureSchema) -> Validation:
    """Check every field against its schema range.

    Out-of-range values are dropped (set to None), never clamped, and the
    record is reported incomplete together with the offending field names.
    Missing and unparseable fields count as offending too.
    """
    values, bad = {}, []
    for f in schema.features:
        v = _coerce(record.get(f.name), f)
        if v is None or not f.min <= v <= f.max:
            bad.append(f.name)
            v = None
        values[f.name] = v
    return Validation(not bad, tuple(bad), values)


@dataclass
class Dataset:
    """Complete records as an (n, F) integer matrix in schema column order.

    Records that failed validation are kept in `incomplete` (with the bad
    fields removed) for later imputation; they never reach an encoded view.
    """

    schema: FeatureSchema
    records: np.ndarray
    incomplete: list = field(default_factory=list)

    def __post_init__(self):
        r = np.asarray(self.records, dtype=np.int64)
        if r.size == 0:
            r = r.reshape(0, len(self.schema.features))
        if r.ndim != 2 or r.shape[1] != len(self.schema.features):
            raise ValueError(f"records must have shape (n, {len(self.schema.features)})")
        self.records = r

    def __len__(self):
        return len(self.records)

    @property
    def labels(self) -> np.ndarray:
        return self.records[:, self.schema.target_index]

    def subset(self, idx) -> "Dataset":
        return Dataset(self.schema, self.records[np.asarray(idx, dtype=np.int64)])

    @classmethod
    def from_rows(cls, rows: Iterable[Mapping], schema: FeatureSchema) -> "Dataset":
        complete, incomplete = [], []
        for row in rows:
            check = validate(row, schema)
            if check.complete:
                complete.append([check.values[n] for n in schema.names])
            else:
                incomplete.append({k: v for k, v in check.values.items() if v is not None})
        return cls(schema, np.array(complete, dtype=np.int64), incomplete)


def read_csv(path, schema: FeatureSchema | None = None) -> Dataset:
    """Load a survey CSV (header row of feature names, empty cell = missing)."""
    schema = schema or default_schema()
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ValueError(f"{path}: empty file")
        missing = set(schema.names) - set(reader.fieldnames)
        if missing:
            raise ValueError(f"{path}: missing columns {sorted(missing)}")
        return Dataset.from_rows(reader, schema)


def write_csv(dataset: Dataset, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(dataset.schema.names)
        w.writerows(dataset.records.tolist())


# ---------------------------------------------------------------------------
# Model views


@dataclass(frozen=True)
class EncodedDataset:
    relnet_view: np.ndarray  # (n, F), every feature (target included) in [0, 1]
    mlp_inputs: np.ndarray  # (n, schema.mlp_dim)
    labels: np.ndarray  # (n,) 0/1


def relnet_view(dataset: Dataset) -> np.ndarray:
    cols = [normalize(dataset.records[:, i], f.min, f.max) for i, f in enumerate(dataset.schema.features)]
    return np.column_stack(cols) if len(dataset) else np.zeros((0, len(cols)))


def mlp_view(dataset: Dataset) -> tuple[np.ndarray, np.ndarray]:
    schema = dataset.schema
    blocks = []
    for i, f in enumerate(schema.features):
        col = dataset.records[:, i]
        if f.mlp_encoding == "normalized":
            blocks.append(np.reshape(normalize(col, f.min, f.max), (-1, 1)))
        elif f.mlp_encoding == "four_bit":
            blocks.append(_four_bit_columns(col).reshape(-1, 4))
    X = np.hstack(blocks) if blocks else np.zeros((len(dataset), 0))
    return X, dataset.labels.copy()


def encode(dataset: Dataset) -> EncodedDataset:
    X, y = mlp_view(dataset)
    return EncodedDataset(relnet_view(dataset), X, y)


def export_encoded(dataset: Dataset, path, seed=None) -> Path:
    """Write MLP-encoded columns plus label to `path` and a JSON sidecar.

    The sidecar lands next to the CSV as ``<stem>.manifest.json``.
    """
    path = Path(path)
    X, y = mlp_view(dataset)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(dataset.schema.mlp_columns() + [dataset.schema.target_name])
        for row, label in zip(X.tolist(), y.tolist()):
            w.writerow([repr(v) for v in row] + [label])
    manifest = {
        "schema": dataset.schema.to_dict(),
        "counts": {
            "records": len(dataset),
            "positive": int(np.sum(y == 1)),
            "negative": int(np.sum(y == 0)),
        },
        "incomplete_count": len(dataset.incomplete),
        "seed": seed,
    }
    side = path.with_name(path.stem + ".manifest.json")
    side.write_text(json.dumps(manifest, indent=2) + "\n")
    return side


# ---------------------------------------------------------------------------
# Balancing and splitting


class BalanceError(ValueError):
    """Raised when one class has no records to re-use."""


def balance_indices(labels, seed) -> np.ndarray:
    """Indices that oversample the minority class up to the majority count.

    Minority records are consumed in cycles; each full cycle is a fresh
    seeded permutation, so every record is re-used as evenly as possible.
    The majority class is kept as is and the result is shuffled.
    """
    y = np.asarray(labels)
    pos = np.flatnonzero(y == 1)
    neg = np.flatnonzero(y == 0)
    if len(pos) + len(neg) != len(y):
        raise BalanceError("labels must be 0 or 1")
    if len(pos) == 0 or len(neg) == 0:
        raise BalanceError(f"need both classes, got {len(pos)} positive and {len(neg)} negative")
    rng = np.random.default_rng(seed)
    minority, majority = (pos, neg) if len(pos) < len(neg) else (neg, pos)
    picks = []
    need = len(majority)
    while need > 0:
        cycle = rng.permutation(minority)[:need]
        picks.append(cycle)
        need -= len(cycle)
    idx = np.concatenate([majority, *picks])
    return rng.permutation(idx)


def balance(dataset: Dataset, seed) -> Dataset:
    return dataset.subset(balance_indices(dataset.labels, seed))


def split(dataset: Dataset, test_size: int, seed) -> tuple[Dataset, Dataset]:
    """Seeded shuffle, then carve off `test_size` records as the test set.

    The test side is left at its natural class ratio. Incomplete records stay
    with the training side (where they are ignored).
    """
    n = len(dataset)
    if not 0 <= test_size <= n:
        raise ValueError(f"test_size {test_size} outside [0, {n}]")
    order = np.random.default_rng(seed).permutation(n)
    train = dataset.subset(np.sort(order[test_size:]))
    train.incomplete = list(dataset.incomplete)
    test = dataset.subset(np.sort(order[:test_size]))
    return train, test


# ---------------------------------------------------------------------------
# Synthetic data


class Planted(NamedTuple):
    from_feature: str
    to_feature: str
    coefficient: float


def _parents_first(schema: FeatureSchema, planted: Sequence[Planted]) -> list[int]:
    parents = {i: set() for i in range(len(schema.features))}
    for p in planted:
        parents[schema.index(p.to_feature)].add(schema.index(p.from_feature))
    order, done = [], set()
    while len(order) < len(parents):
        ready = [i for i in parents if i not in done and parents[i] <= done]
        if not ready:
            raise ValueError("planted dependencies contain a cycle")
        order.append(ready[0])
        done.add(ready[0])
    return order


def synth_generate(
    schema: FeatureSchema | None = None,
    n: int = 1000,
    positive_rate: float = 0.25,
    planted: Sequence = (),
    noise_std: float = 0.05,
    seed=0,
) -> Dataset:
    """Generate `n` complete records with planted linear dependencies.

    Features without incoming dependencies are uniform over their integer
    range. A dependent feature is, in normalised units, the weighted sum of
    its sources plus Gaussian noise, clipped to [0, 1] and rounded onto the
    feature's integer grid. For the binary target the same weighted sum is a
    risk score: the top ``round(positive_rate * n)`` scores are labelled
    positive, so the positive fraction matches the requested rate.
    """
    schema = schema or default_schema()
    if not 0.0 <= positive_rate <= 1.0:
        raise ValueError(f"positive_rate must lie in [0, 1], got {positive_rate}")
    if n < 0:
        raise ValueError("n must be non-negative")
    if noise_std < 0:
        raise ValueError("noise_std must be non-negative")
    planted = [Planted(*p) for p in planted]
    for p in planted:
        if not np.isfinite(p.coefficient):
            raise ValueError(f"non-finite coefficient in {p}")
        if p.from_feature == p.to_feature:
            raise ValueError(f"self dependency {p}")

    rng = np.random.default_rng(seed)
    F = len(schema.features)
    raw = np.zeros((n, F), dtype=np.int64)
    unit = np.zeros((n, F))
    target = schema.target_index
    for i in _parents_first(schema, planted):
        f = schema.features[i]
        incoming = [p for p in planted if schema.index(p.to_feature) == i]
        score = sum(
            (p.coefficient * unit[:, schema.index(p.from_feature)] for p in incoming),
            np.zeros(n),
        )
        if i == target:
            score = score + (noise_std * rng.standard_normal(n) if incoming else rng.random(n))
            k = int(round(positive_rate * n))
            col = np.zeros(n, dtype=np.int64)
            col[np.argsort(-score, kind="stable")[:k]] = 1
        elif incoming:
            score = np.clip(score + noise_std * rng.standard_normal(n), 0.0, 1.0)
            col = denormalize(score, f.min, f.max)
        else:
            col = rng.integers(f.min, f.max + 1, size=n)
        raw[:, i] = col
        unit[:, i] = normalize(col, f.min, f.max)
    return Dataset(schema, raw)


def parse_planted(spec: str) -> Planted:
    """Parse ``FROM:TO:COEF`` (e.g. ``Age:HIV:0.8``)."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise ValueError(f"planted dependency must be FROM:TO:COEF, got {spec!r}")
    return Planted(parts[0], parts[1], float(parts[2]))
