"""Feature schemas, instances, mixed one-hot encoding, and L1 distance weights.

A schema describes each feature as either categorical (fixed level set) or
continuous (bounded range), plus a mutability flag and an optional distance
weight override.  Instances are positionally aligned value tuples.  The mixed
encoding expands every categorical feature into a one-hot block and passes
continuous values through unchanged, in schema order.

Distance between instances is a weighted L1: continuous differences are
scaled by the inverse median absolute deviation of the training column, and
every changed categorical feature contributes a flat per-feature cost.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

import numpy as np
import yaml

CATEGORICAL = "categorical"
CONTINUOUS = "continuous"

# Floor for the median absolute deviation before inversion; a constant column
# gets a large-but-finite weight of 1/EPSILON_MAD instead of an infinite one.
EPSILON_MAD = 1e-4


class SchemaError(ValueError):
    """A schema definition, or a value checked against one, is invalid."""


class DatasetError(ValueError):
    """A dataset file cannot be loaded against the given schema."""

    def __init__(self, message: str, diagnostics: Sequence["RowDiagnostic"] = ()):
        super().__init__(message)
        self.diagnostics = list(diagnostics)


class RowDiagnostic(NamedTuple):
    """One rejected row: 1-based data row index, offending column, message."""

    row: int
    column: str
    message: str

    def __str__(self) -> str:
        return f"row {self.row}, column {self.column!r}: {self.message}"


class FeatureChange(NamedTuple):
    """A single feature whose value differs between two instances."""

    feature: str
    old: object
    new: object


@dataclass(frozen=True)
class FeatureSpec:
    """One feature: categorical with a level set, or continuous with bounds."""

    name: str
    kind: str
    levels: tuple[str, ...] = ()
    lower: float = 0.0
    upper: float = 0.0
    mutable: bool = True
    weight: float | None = None

    def __post_init__(self):
        if not self.name:
            raise SchemaError("feature name must be nonempty")
        if self.kind == CATEGORICAL:
            if not self.levels:
                raise SchemaError(f"feature {self.name!r}: level set must be nonempty")
            if len(set(self.levels)) != len(self.levels):
                raise SchemaError(f"feature {self.name!r}: duplicate levels")
            object.__setattr__(self, "levels", tuple(self.levels))
        elif self.kind == CONTINUOUS:
            if not (math.isfinite(self.lower) and math.isfinite(self.upper)):
                raise SchemaError(f"feature {self.name!r}: bounds must be finite")
            if not self.lower < self.upper:
                raise SchemaError(
                    f"feature {self.name!r}: lower bound {self.lower} must be "
                    f"strictly below upper bound {self.upper}"
                )
        else:
            raise SchemaError(f"feature {self.name!r}: unknown kind {self.kind!r}")
        if self.weight is not None and not (
            math.isfinite(self.weight) and self.weight > 0
        ):
            raise SchemaError(f"feature {self.name!r}: weight override must be positive")

    @property
    def is_categorical(self) -> bool:
        return self.kind == CATEGORICAL

    @property
    def encoded_width(self) -> int:
        return len(self.levels) if self.is_categorical else 1

    def check_value(self, value) -> float | str:
        """Validate one raw value for this feature, normalizing its type."""
        if self.is_categorical:
            if not isinstance(value, str) or value not in self.levels:
                raise SchemaError(
                    f"feature {self.name!r}: {value!r} is not one of the "
                    f"declared levels {list(self.levels)}"
                )
            return value
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise SchemaError(f"feature {self.name!r}: {value!r} is not numeric")
        value = float(value)
        if not math.isfinite(value):
            raise SchemaError(f"feature {self.name!r}: value must be finite")
        if not (self.lower <= value <= self.upper):
            raise SchemaError(
                f"feature {self.name!r}: {value} outside bounds "
                f"[{self.lower}, {self.upper}]"
            )
        return value


@dataclass(frozen=True)
class FeatureSchema:
    """Ordered collection of feature specs with derived encoding layout."""

    features: tuple[FeatureSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "features", tuple(self.features))
        names = [f.name for f in self.features]
        if len(set(names)) != len(names):
            raise SchemaError("feature names must be unique")
        if not names:
            raise SchemaError("schema must declare at least one feature")

    def __len__(self) -> int:
        return len(self.features)

    def __iter__(self):
        return iter(self.features)

    @cached_property
    def _index(self) -> dict[str, int]:
        return {f.name: i for i, f in enumerate(self.features)}

    @cached_property
    def column_spans(self) -> tuple[tuple[int, int], ...]:
        """Half-open encoded column range for each feature, in schema order."""
        spans = []
        start = 0
        for f in self.features:
            spans.append((start, start + f.encoded_width))
            start += f.encoded_width
        return tuple(spans)

    @property
    def encoded_width(self) -> int:
        return self.column_spans[-1][1]

    def index_of(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise SchemaError(f"unknown feature {name!r}") from None

    def feature(self, name: str) -> FeatureSpec:
        return self.features[self.index_of(name)]

    def validate_instance(self, instance: "Instance") -> None:
        if len(instance.values) != len(self.features):
            raise SchemaError(
                f"instance has {len(instance.values)} values, "
                f"schema expects {len(self.features)}"
            )
        for spec, value in zip(self.features, instance.values):
            spec.check_value(value)

    def instance_from_mapping(self, mapping: dict) -> "Instance":
        """Build a validated Instance from a feature-name -> value mapping.

        Collects every per-feature problem before failing, so callers can
        report field-level errors; the raised SchemaError carries a
        ``problems`` list of (feature name, message) pairs.
        """
        problems: list[tuple[str, str]] = []
        values = []
        for spec in self.features:
            if spec.name not in mapping:
                problems.append((spec.name, "missing value"))
                values.append(None)
                continue
            try:
                values.append(spec.check_value(mapping[spec.name]))
            except SchemaError as exc:
                problems.append((spec.name, str(exc)))
                values.append(None)
        for name in mapping:
            if name not in self._index:
                problems.append((name, "unknown feature"))
        if problems:
            err = SchemaError(
                "invalid instance: " + "; ".join(f"{n}: {m}" for n, m in problems)
            )
            err.problems = problems
            raise err
        return Instance(tuple(values))

    def instance_to_mapping(self, instance: "Instance") -> dict:
        return {f.name: v for f, v in zip(self.features, instance.values)}

    def canonical_form(self) -> list:
        """Stable nested structure used for hashing and serialization."""
        form = []
        for f in self.features:
            entry: dict = {"name": f.name, "kind": f.kind, "mutable": f.mutable}
            if f.is_categorical:
                entry["levels"] = list(f.levels)
            else:
                entry["min"] = f.lower
                entry["max"] = f.upper
            if f.weight is not None:
                entry["weight"] = f.weight
            form.append(entry)
        return form

    @cached_property
    def schema_hash(self) -> str:
        payload = json.dumps(self.canonical_form(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class Instance:
    """One value per schema feature, positionally aligned."""

    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))

    def replace(self, index: int, value) -> "Instance":
        vals = list(self.values)
        vals[index] = value
        return Instance(tuple(vals))


def encode(instance: Instance, schema: FeatureSchema) -> np.ndarray:
    """Mixed encoding: one-hot per categorical level, raw continuous values.

    Column order is deterministic: features in schema order, categorical
    blocks expanded in declared level order.
    """
    schema.validate_instance(instance)
    out = np.zeros(schema.encoded_width)
    for spec, value, (start, stop) in zip(
        schema.features, instance.values, schema.column_spans
    ):
        if spec.is_categorical:
            out[start + spec.levels.index(value)] = 1.0
        else:
            out[start] = value
    return out


def decode(vector: np.ndarray, schema: FeatureSchema) -> Instance:
    """Invert :func:`encode`; exact for categorical, bit-exact for continuous."""
    vector = np.asarray(vector, dtype=float)
    if vector.shape != (schema.encoded_width,):
        raise SchemaError(
            f"vector has shape {vector.shape}, expected ({schema.encoded_width},)"
        )
    values = []
    for spec, (start, stop) in zip(schema.features, schema.column_spans):
        block = vector[start:stop]
        if spec.is_categorical:
            ones = np.flatnonzero(block == 1.0)
            if len(ones) != 1 or np.count_nonzero(block) != 1:
                raise SchemaError(
                    f"feature {spec.name!r}: block {block.tolist()} is not one-hot"
                )
            values.append(spec.levels[int(ones[0])])
        else:
            values.append(float(block[0]))
    return Instance(tuple(values))


@dataclass(frozen=True)
class DistanceWeights:
    """Per-feature L1 weights: continuous scale factors and categorical flip costs."""

    continuous: dict[str, float]
    categorical: dict[str, float]

    def __post_init__(self):
        for name, w in {**self.continuous, **self.categorical}.items():
            if not (math.isfinite(w) and w > 0):
                raise SchemaError(f"weight for {name!r} must be strictly positive")

    def scaled(self, factor: float) -> "DistanceWeights":
        return DistanceWeights(
            {k: v * factor for k, v in self.continuous.items()},
            {k: v * factor for k, v in self.categorical.items()},
        )


def mad_weights(data: Sequence[Instance], schema: FeatureSchema) -> DistanceWeights:
    """Inverse-MAD weights for continuous features, flat flip costs for categorical.

    MAD is the median of absolute deviations from the column median, clamped
    below by EPSILON_MAD so constant columns stay finite (but expensive to
    change).  A feature's ``weight`` override, when present, replaces the
    computed value.
    """
    if not data:
        raise DatasetError("cannot compute distance weights from an empty dataset")
    continuous: dict[str, float] = {}
    categorical: dict[str, float] = {}
    for i, spec in enumerate(schema.features):
        if spec.is_categorical:
            categorical[spec.name] = spec.weight if spec.weight is not None else 1.0
        elif spec.weight is not None:
            continuous[spec.name] = spec.weight
        else:
            column = np.array([inst.values[i] for inst in data], dtype=float)
            mad = float(np.median(np.abs(column - np.median(column))))
            continuous[spec.name] = 1.0 / max(mad, EPSILON_MAD)
    return DistanceWeights(continuous, categorical)


def distance(
    a: Instance, b: Instance, schema: FeatureSchema, weights: DistanceWeights
) -> float:
    """Weighted L1 distance; a categorical flip counts once per feature."""
    total = 0.0
    for spec, va, vb in zip(schema.features, a.values, b.values):
        if spec.is_categorical:
            if va != vb:
                total += weights.categorical[spec.name]
        else:
            total += weights.continuous[spec.name] * abs(float(va) - float(vb))
    return total


def changed_features(
    a: Instance, b: Instance, schema: FeatureSchema
) -> tuple[FeatureChange, ...]:
    """Features where ``b`` differs from ``a``, in schema order."""
    return tuple(
        FeatureChange(spec.name, va, vb)
        for spec, va, vb in zip(schema.features, a.values, b.values)
        if va != vb
    )


@dataclass(frozen=True)
class SchemaConfig:
    """A feature schema plus the dataset-level settings that travel with it."""

    schema: FeatureSchema
    label_column: str
    class_labels: tuple[str, str] | None = None


def load_schema(path) -> SchemaConfig:
    """Load a declarative YAML schema file.

    Expected layout::

        label: income
        class_labels: {negative: "<=50K", positive: ">50K"}   # optional
        features:
          - {name: Age, kind: continuous, min: 17, max: 90, mutable: false}
          - {name: Occupation, kind: categorical, levels: [Admin, Sales]}
    """
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"schema file not found: {path}")
    with open(path, encoding="utf-8") as fh:
        raw = yaml.safe_load(fh)
    if not isinstance(raw, dict):
        raise SchemaError(f"{path}: schema file must be a mapping")
    label = raw.get("label")
    if not isinstance(label, str) or not label:
        raise SchemaError(f"{path}: missing or invalid 'label' entry")
    entries = raw.get("features")
    if not isinstance(entries, list) or not entries:
        raise SchemaError(f"{path}: 'features' must be a nonempty list")
    specs = []
    for entry in entries:
        if not isinstance(entry, dict) or "name" not in entry or "kind" not in entry:
            raise SchemaError(f"{path}: each feature needs 'name' and 'kind'")
        kind = entry["kind"]
        common = {
            "name": entry["name"],
            "kind": kind,
            "mutable": bool(entry.get("mutable", True)),
            "weight": entry.get("weight"),
        }
        if kind == CATEGORICAL:
            levels = entry.get("levels")
            if not isinstance(levels, list):
                raise SchemaError(
                    f"{path}: feature {entry['name']!r} needs a 'levels' list"
                )
            specs.append(FeatureSpec(levels=tuple(str(l) for l in levels), **common))
        elif kind == CONTINUOUS:
            if "min" not in entry or "max" not in entry:
                raise SchemaError(
                    f"{path}: feature {entry['name']!r} needs 'min' and 'max'"
                )
            specs.append(
                FeatureSpec(lower=float(entry["min"]), upper=float(entry["max"]), **common)
            )
        else:
            raise SchemaError(f"{path}: feature {entry['name']!r} has unknown kind {kind!r}")
    class_labels = None
    if "class_labels" in raw:
        cl = raw["class_labels"]
        if (
            not isinstance(cl, dict)
            or set(cl) != {"negative", "positive"}
            or cl["negative"] == cl["positive"]
        ):
            raise SchemaError(f"{path}: 'class_labels' needs distinct negative/positive")
        class_labels = (str(cl["negative"]), str(cl["positive"]))
    return SchemaConfig(FeatureSchema(tuple(specs)), label, class_labels)


def dump_schema(config: SchemaConfig) -> str:
    """Serialize a SchemaConfig back to the YAML layout read by load_schema."""
    doc: dict = {"label": config.label_column}
    if config.class_labels is not None:
        doc["class_labels"] = {
            "negative": config.class_labels[0],
            "positive": config.class_labels[1],
        }
    doc["features"] = config.schema.canonical_form()
    return yaml.safe_dump(doc, sort_keys=False, allow_unicode=True)


def save_schema(config: SchemaConfig, path) -> None:
    Path(path).write_text(dump_schema(config), encoding="utf-8")


def load_dataset(
    path, schema: FeatureSchema, label_column: str
) -> tuple[list[Instance], list[str]]:
    """Load an RFC-4180 CSV with a header row against ``schema``.

    The header must contain exactly the schema's feature names plus
    ``label_column``, in any order.  Every data row must parse into a valid
    Instance; offending rows are collected into row-indexed diagnostics and
    reported together in a single DatasetError.
    """
    path = Path(path)
    if not path.exists():
        raise DatasetError(f"dataset file not found: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetError(f"{path}: missing header row") from None
        expected = {f.name for f in schema.features} | {label_column}
        if len(set(header)) != len(header):
            raise DatasetError(f"{path}: duplicate column names in header")
        unknown = [h for h in header if h not in expected]
        if unknown:
            raise DatasetError(f"{path}: unknown columns {unknown}")
        missing = sorted(expected - set(header))
        if missing:
            raise DatasetError(f"{path}: missing columns {missing}")
        positions = {name: header.index(name) for name in header}
        label_pos = positions[label_column]

        instances: list[Instance] = []
        labels: list[str] = []
        diagnostics: list[RowDiagnostic] = []
        for row_index, row in enumerate(reader, start=1):
            if len(row) != len(header):
                diagnostics.append(
                    RowDiagnostic(row_index, "", f"expected {len(header)} cells, got {len(row)}")
                )
                continue
            values = []
            ok = True
            for spec in schema.features:
                cell = row[positions[spec.name]]
                try:
                    if spec.is_categorical:
                        values.append(spec.check_value(cell))
                    else:
                        try:
                            number = float(cell)
                        except ValueError:
                            raise SchemaError(
                                f"cannot parse {cell!r} as a number"
                            ) from None
                        values.append(spec.check_value(number))
                except SchemaError as exc:
                    diagnostics.append(RowDiagnostic(row_index, spec.name, str(exc)))
                    ok = False
            if ok:
                instances.append(Instance(tuple(values)))
                labels.append(row[label_pos])
        if diagnostics:
            shown = "; ".join(str(d) for d in diagnostics[:5])
            more = "" if len(diagnostics) <= 5 else f" (+{len(diagnostics) - 5} more)"
            raise DatasetError(
                f"{path}: {len(diagnostics)} invalid rows: {shown}{more}", diagnostics
            )
        distinct = sorted(set(labels))
        if len(distinct) > 2:
            raise DatasetError(
                f"{path}: label column {label_column!r} has {len(distinct)} distinct "
                f"values {distinct[:4]}...; expected a binary label"
            )
    return instances, labels
