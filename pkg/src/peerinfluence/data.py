"""Typed tabular data: feature schemas, datasets, reduction, and splits.

All cells are stored as float64. Categorical features hold their ordinal
code (position in the declared category list), which keeps column means
well-defined for every feature kind; a reduced dataset replaces one
column by its mean, so the reduced column of a categorical feature may
legitimately hold a non-integer value.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DataParseError, EncodingError, SchemaError
from .validation import check_index

NUMERICAL = "numerical"
CATEGORICAL = "categorical"

_SCHEMA_KEYS = {"name", "kind", "categories", "controllable", "unit"}


@dataclass(frozen=True)
class FeatureSchema:
    """Declaration of a single tabular feature.

    ``categories`` is required for categorical features and gives the
    encoding order: label ``categories[c]`` is stored as the code ``c``.
    ``controllable`` marks features on which real-world intervention is
    permitted; it restricts alteration recommendations downstream.
    """

    name: str
    kind: str = NUMERICAL
    categories: tuple[str, ...] | None = None
    controllable: bool = False
    unit: str | None = None

    def __post_init__(self) -> None:
        if not self.name:
            raise SchemaError("feature name must be non-empty")
        if self.kind not in (NUMERICAL, CATEGORICAL):
            raise SchemaError(f"feature {self.name!r}: unknown kind {self.kind!r}")
        if self.kind == CATEGORICAL:
            if not self.categories:
                raise SchemaError(f"feature {self.name!r}: categorical without categories")
            object.__setattr__(self, "categories", tuple(str(c) for c in self.categories))
            if len(set(self.categories)) != len(self.categories):
                raise SchemaError(f"feature {self.name!r}: duplicate category labels")
        elif self.categories is not None:
            raise SchemaError(f"feature {self.name!r}: numerical feature declares categories")

    @property
    def n_categories(self) -> int:
        return len(self.categories) if self.categories else 0

    def encode(self, label: str) -> float:
        """Map a category label to its ordinal code."""
        assert self.categories is not None
        try:
            return float(self.categories.index(label))
        except ValueError:
            raise EncodingError(
                f"feature {self.name!r}: unknown category {label!r}; "
                f"declared categories are {list(self.categories)}"
            ) from None

    def decode(self, code: float) -> str:
        assert self.categories is not None
        idx = int(round(code))
        if abs(code - idx) > 1e-9 or not 0 <= idx < len(self.categories):
            raise EncodingError(f"feature {self.name!r}: code {code!r} is not a valid category code")
        return self.categories[idx]

    def to_dict(self) -> dict:
        doc: dict = {"name": self.name, "kind": self.kind, "controllable": self.controllable}
        if self.categories is not None:
            doc["categories"] = list(self.categories)
        if self.unit is not None:
            doc["unit"] = self.unit
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "FeatureSchema":
        unknown = set(doc) - _SCHEMA_KEYS
        if unknown:
            raise SchemaError(f"unknown schema keys {sorted(unknown)}")
        if "name" not in doc or "kind" not in doc:
            raise SchemaError("feature entry requires 'name' and 'kind'")
        return cls(
            name=str(doc["name"]),
            kind=str(doc["kind"]),
            categories=tuple(doc["categories"]) if doc.get("categories") is not None else None,
            controllable=bool(doc.get("controllable", False)),
            unit=doc.get("unit"),
        )


def _frozen_array(values, dtype) -> np.ndarray:
    arr = np.ascontiguousarray(np.asarray(values, dtype=dtype))
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class Dataset:
    """Immutable encoded table: an (n, m) matrix of cells plus binary labels."""

    schema: tuple[FeatureSchema, ...]
    rows: np.ndarray
    labels: np.ndarray

    def __post_init__(self) -> None:
        schema = tuple(self.schema)
        object.__setattr__(self, "schema", schema)
        rows = np.asarray(self.rows, dtype=np.float64)
        if rows.ndim != 2:
            raise SchemaError(f"rows must be 2-dimensional, got shape {rows.shape}")
        n, m = rows.shape
        if m != len(schema):
            raise SchemaError(f"rows have {m} columns, schema declares {len(schema)} features")
        if n < 1 or m < 2:
            raise SchemaError(f"dataset requires n >= 1 and m >= 2, got n={n}, m={m}")
        names = [f.name for f in schema]
        if len(set(names)) != len(names):
            raise SchemaError("feature names must be unique")
        labels = np.asarray(self.labels)
        if labels.shape != (n,):
            raise SchemaError(f"labels must have shape ({n},), got {labels.shape}")
        if not np.all(np.isin(labels, (0, 1))):
            raise SchemaError("labels must be binary 0/1")
        object.__setattr__(self, "rows", _frozen_array(rows, np.float64))
        object.__setattr__(self, "labels", _frozen_array(labels, np.int64))

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def m(self) -> int:
        return self.rows.shape[1]

    @property
    def feature_names(self) -> tuple[str, ...]:
        return tuple(f.name for f in self.schema)

    def feature_index(self, name: str) -> int:
        for j, f in enumerate(self.schema):
            if f.name == name:
                return j
        raise SchemaError(f"unknown feature {name!r}")

    def controllable_indices(self) -> tuple[int, ...]:
        return tuple(j for j, f in enumerate(self.schema) if f.controllable)

    def column(self, j: int) -> np.ndarray:
        check_index(j, self.m)
        return self.rows[:, j]

    def take(self, indices) -> "Dataset":
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(self.schema, self.rows[idx], self.labels[idx])

    def instance(self, i: int) -> "Instance":
        if not 0 <= i < self.n:
            raise IndexError(f"row {i} out of range for {self.n} rows")
        return Instance(values=self.rows[i], label=int(self.labels[i]))


@dataclass(frozen=True, eq=False)
class Instance:
    """A single feature vector, optionally with its known label."""

    values: np.ndarray
    label: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _frozen_array(self.values, np.float64))
        if self.values.ndim != 1:
            raise SchemaError(f"instance values must be 1-dimensional, got {self.values.shape}")

    @property
    def m(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True, eq=False)
class ReducedDataset:
    """A dataset with one feature column replaced by that column's mean."""

    base: Dataset
    reduced_feature: int
    replacement_value: float
    _rows: np.ndarray = field(repr=False, default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        check_index(self.reduced_feature, self.base.m)
        rows = np.array(self.base.rows)
        rows[:, self.reduced_feature] = self.replacement_value
        object.__setattr__(self, "_rows", _frozen_array(rows, np.float64))

    @property
    def schema(self) -> tuple[FeatureSchema, ...]:
        return self.base.schema

    @property
    def rows(self) -> np.ndarray:
        return self._rows

    @property
    def labels(self) -> np.ndarray:
        return self.base.labels

    @property
    def feature_names(self) -> tuple[str, ...]:
        return self.base.feature_names

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def m(self) -> int:
        return self.base.m


def column_mean(d: Dataset, j: int) -> float:
    """Mean of column ``j``; exact when the column is constant."""
    col = d.column(j)
    lo = col.min()
    # A constant column must be its own mean bit-exactly, so reduction is
    # an exact fixed point; a naive mean of n equal floats can round.
    if lo == col.max():
        return float(lo)
    return float(col.mean())


def reduce_dataset(d: Dataset, j: int) -> ReducedDataset:
    """Replace column ``j`` by its mean over all rows of ``d``."""
    check_index(j, d.m)
    return ReducedDataset(base=d, reduced_feature=j, replacement_value=column_mean(d, j))


def nullify_instance(x: Instance, j: int, replacement_value: float) -> Instance:
    """Return a copy of ``x`` with ``values[j]`` set to ``replacement_value``."""
    check_index(j, x.m)
    values = np.array(x.values)
    values[j] = replacement_value
    return Instance(values=values, label=x.label)


def split(d: Dataset, train_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Disjoint row-level shuffle split; deterministic for a fixed seed."""
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    n_train = int(np.floor(d.n * train_fraction))
    if n_train < 1 or d.n - n_train < 1:
        raise ValueError(
            f"split of {d.n} rows at fraction {train_fraction} leaves an empty part"
        )
    perm = np.random.default_rng(seed).permutation(d.n)
    train_idx = np.sort(perm[:n_train])
    test_idx = np.sort(perm[n_train:])
    return d.take(train_idx), d.take(test_idx)


# ---------------------------------------------------------------------------
# Schema file and CSV ingestion


def save_schema_file(path, schema, label_column: str) -> None:
    doc = {"features": [f.to_dict() for f in schema], "label": label_column}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_schema_file(path) -> tuple[tuple[FeatureSchema, ...], str]:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"schema file {path}: invalid JSON ({exc})") from exc
    if not isinstance(doc, dict) or "features" not in doc or "label" not in doc:
        raise SchemaError(f"schema file {path}: requires 'features' and 'label' keys")
    schema = tuple(FeatureSchema.from_dict(entry) for entry in doc["features"])
    return schema, str(doc["label"])


def _parse_cell(feature: FeatureSchema, text: str, row: int) -> float:
    if feature.kind == CATEGORICAL:
        assert feature.categories is not None
        if text in feature.categories:
            return float(feature.categories.index(text))
        raise EncodingError(
            f"row {row}, column {feature.name!r}: unknown category {text!r}"
        )
    try:
        return float(text)
    except ValueError:
        raise DataParseError(
            f"row {row}, column {feature.name!r}: cannot parse {text!r} as a number"
        ) from None


def load_csv(path, schema, label_column: str) -> Dataset:
    """Read an encoded :class:`Dataset` from a headered CSV file.

    Columns are located by header name; categorical cells are encoded by
    the declared category order. Parse failures report the 1-based data
    row and the column name.
    """
    schema = tuple(schema)
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        positions = {name: i for i, name in enumerate(header)}
        missing = [f.name for f in schema if f.name not in positions]
        if label_column not in positions:
            missing.append(label_column)
        if missing:
            raise SchemaError(f"{path}: missing columns {missing}")

        rows: list[list[float]] = []
        labels: list[int] = []
        for r, record in enumerate(reader, start=1):
            if len(record) != len(header):
                raise DataParseError(
                    f"row {r}: has {len(record)} cells, header declares {len(header)}"
                )
            rows.append([_parse_cell(f, record[positions[f.name]], r) for f in schema])
            raw = record[positions[label_column]]
            if raw not in ("0", "1"):
                raise DataParseError(
                    f"row {r}, column {label_column!r}: label must be 0 or 1, got {raw!r}"
                )
            labels.append(int(raw))
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return Dataset(schema=schema, rows=np.array(rows), labels=np.array(labels))


def write_csv(d: Dataset, path, label_column: str) -> None:
    """Write a dataset with categorical cells decoded back to their labels.

    Numeric cells use ``repr`` so that ``load_csv`` round-trips them
    bit-exactly.
    """
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f.name for f in d.schema] + [label_column])
        for i in range(d.n):
            record = []
            for j, f in enumerate(d.schema):
                v = d.rows[i, j]
                record.append(f.decode(v) if f.kind == CATEGORICAL else repr(float(v)))
            record.append(str(int(d.labels[i])))
            writer.writerow(record)
