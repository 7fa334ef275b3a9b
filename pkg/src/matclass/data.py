"""Schemas, datasets, CSV ingestion and seeded stratified splitting.

A :class:`Schema` declares the feature attributes (categorical with an ordered
value list, or continuous) and the class attribute. A :class:`Dataset` is an
immutable sequence of :class:`Instance` rows validated against one schema.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import random
from dataclasses import dataclass, field
from typing import IO, Iterable

CATEGORICAL = "categorical"
CONTINUOUS = "continuous"

#: Tokens treated as missing values. Missing data is rejected at ingest.
MISSING_TOKENS = frozenset({"", "?"})


class SchemaError(ValueError):
    """Raised for malformed or inconsistent schema documents."""


class DataError(ValueError):
    """Raised when dataset rows violate their schema."""


@dataclass(frozen=True)
class AttributeSpec:
    name: str
    kind: str
    values: tuple[str, ...] = ()
    unit: str | None = None

    def __post_init__(self):
        if not isinstance(self.name, str) or not self.name:
            raise SchemaError("attribute name must be a non-empty string")
        if self.kind == CATEGORICAL:
            object.__setattr__(self, "values", tuple(self.values))
            if not self.values:
                raise SchemaError(f"attribute {self.name!r}: empty value list")
            if len(set(self.values)) != len(self.values):
                raise SchemaError(f"attribute {self.name!r}: duplicate values")
        elif self.kind == CONTINUOUS:
            if self.values:
                raise SchemaError(f"attribute {self.name!r}: continuous attributes take no values")
        else:
            raise SchemaError(f"attribute {self.name!r}: unknown kind {self.kind!r}")

    @property
    def is_categorical(self) -> bool:
        return self.kind == CATEGORICAL

    @property
    def is_continuous(self) -> bool:
        return self.kind == CONTINUOUS

    def to_dict(self) -> dict:
        doc = {"name": self.name, "kind": self.kind}
        if self.is_categorical:
            doc["values"] = list(self.values)
        if self.unit is not None:
            doc["unit"] = self.unit
        return doc


@dataclass(frozen=True)
class Schema:
    """Feature attributes plus the class attribute and its labels.

    Attribute order matters: it fixes CSV column order and is used for
    deterministic tie-breaking by the classifiers.
    """

    attributes: tuple[AttributeSpec, ...]
    class_attribute: str
    class_labels: tuple[str, ...]
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "attributes", tuple(self.attributes))
        object.__setattr__(self, "class_labels", tuple(self.class_labels))
        if not self.attributes:
            raise SchemaError("schema declares no feature attributes")
        names = [a.name for a in self.attributes]
        seen = set()
        for name in names:
            if name in seen:
                raise SchemaError(f"duplicate attribute name {name!r}")
            seen.add(name)
        if not isinstance(self.class_attribute, str) or not self.class_attribute:
            raise SchemaError("class_attribute must be a non-empty string")
        if self.class_attribute in seen:
            raise SchemaError(
                f"class attribute {self.class_attribute!r} collides with a feature attribute")
        if not self.class_labels:
            raise SchemaError("class_labels is empty")
        if len(set(self.class_labels)) != len(self.class_labels):
            raise SchemaError("duplicate class labels")
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(names)})

    @property
    def names(self) -> list[str]:
        return [a.name for a in self.attributes]

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise SchemaError(f"unknown attribute {name!r}") from None

    def attribute(self, name: str) -> AttributeSpec:
        return self.attributes[self.index(name)]

    def validate_instance(self, instance: "Instance") -> None:
        if len(instance.values) != len(self.attributes):
            raise DataError(
                f"instance has {len(instance.values)} values, schema has "
                f"{len(self.attributes)} attributes")
        for spec, value in zip(self.attributes, instance.values):
            if spec.is_categorical:
                if value not in spec.values:
                    raise DataError(f"{spec.name}: unknown value {value!r}")
            else:
                if isinstance(value, bool) or not isinstance(value, (int, float)):
                    raise DataError(f"{spec.name}: expected a number, got {value!r}")
                if not math.isfinite(value):
                    raise DataError(f"{spec.name}: non-finite value {value!r}")
        if instance.label is not None and instance.label not in self.class_labels:
            raise DataError(f"{self.class_attribute}: unknown label {instance.label!r}")

    def to_dict(self) -> dict:
        return {
            "class_attribute": self.class_attribute,
            "class_labels": list(self.class_labels),
            "attributes": [a.to_dict() for a in self.attributes],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Schema":
        if not isinstance(doc, dict):
            raise SchemaError("schema document must be a JSON object")
        for key in ("class_attribute", "class_labels", "attributes"):
            if key not in doc:
                raise SchemaError(f"schema document missing field {key!r}")
        if not isinstance(doc["attributes"], list):
            raise SchemaError("'attributes' must be a list")
        if not isinstance(doc["class_labels"], list):
            raise SchemaError("'class_labels' must be a list")
        attributes = []
        for i, item in enumerate(doc["attributes"]):
            if not isinstance(item, dict) or "name" not in item or "kind" not in item:
                raise SchemaError(f"attributes[{i}]: expected an object with 'name' and 'kind'")
            kind = item["kind"]
            values = item.get("values", [])
            if kind == CATEGORICAL and "values" not in item:
                raise SchemaError(f"attribute {item['name']!r}: categorical without 'values'")
            if not isinstance(values, list) or not all(isinstance(v, str) for v in values):
                raise SchemaError(f"attribute {item['name']!r}: 'values' must be a list of strings")
            attributes.append(AttributeSpec(item["name"], kind, tuple(values), item.get("unit")))
        return cls(tuple(attributes), doc["class_attribute"], tuple(doc["class_labels"]))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(json.dumps(self.to_dict(), sort_keys=True).encode()).hexdigest()


@dataclass(frozen=True)
class Instance:
    values: tuple
    label: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))


@dataclass(frozen=True)
class Dataset:
    schema: Schema
    rows: tuple[Instance, ...]

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        for i, row in enumerate(self.rows, start=1):
            try:
                self.schema.validate_instance(row)
            except DataError as exc:
                raise DataError(f"row {i}, {exc}") from None

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    @property
    def labels(self) -> list:
        return [r.label for r in self.rows]

    def require_labels(self) -> None:
        for i, row in enumerate(self.rows, start=1):
            if row.label is None:
                raise DataError(f"row {i} has no class label")

    def class_counts(self) -> list[int]:
        """Counts per class label, in schema label order."""
        pos = {c: i for i, c in enumerate(self.schema.class_labels)}
        counts = [0] * len(pos)
        for row in self.rows:
            counts[pos[row.label]] += 1
        return counts

    def column(self, name: str) -> list:
        i = self.schema.index(name)
        return [r.values[i] for r in self.rows]

    def subset(self, indices: Iterable[int]) -> "Dataset":
        return Dataset(self.schema, tuple(self.rows[i] for i in indices))

    def digest(self) -> str:
        return hashlib.sha256(dump_csv(self).encode("utf-8")).hexdigest()


def load_schema(source: IO) -> Schema:
    """Parse and validate a JSON schema document from a text or byte stream."""
    raw = source.read()
    if isinstance(raw, bytes):
        raw = raw.decode("utf-8")
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"schema parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return Schema.from_dict(doc)


def _parse_cell(spec: AttributeSpec, token: str, rownum: int):
    if token.strip() in MISSING_TOKENS:
        raise DataError(f"row {rownum}, {spec.name}: missing value")
    if spec.is_categorical:
        if token not in spec.values:
            raise DataError(f"row {rownum}, {spec.name}: unknown value {token!r}")
        return token
    try:
        value = float(token)
    except ValueError:
        raise DataError(f"row {rownum}, {spec.name}: non-numeric value {token!r}") from None
    if not math.isfinite(value):
        raise DataError(f"row {rownum}, {spec.name}: non-finite value {token!r}")
    return value


def load_csv(source: IO, schema: Schema, labeled: bool = True) -> Dataset:
    """Read a headed CSV into a :class:`Dataset`.

    Columns may come in any order; values are normalized to schema order.
    Row numbers in error messages are 1-based and count data rows only.
    With ``labeled=False`` the class column is optional and rows without it
    carry no label.
    """
    raw = source.read()
    if isinstance(raw, bytes):
        raw = raw.decode("utf-8-sig")
    reader = csv.reader(io.StringIO(raw, newline=""))
    try:
        header = next(reader)
    except StopIteration:
        raise DataError("CSV is empty (no header row)") from None

    positions = {}
    for col, name in enumerate(header):
        if name in positions:
            raise DataError(f"duplicate column {name!r} in header")
        positions[name] = col
    known = set(schema.names) | {schema.class_attribute}
    unexpected = [n for n in header if n not in known]
    if unexpected:
        raise DataError(f"unknown column(s) in header: {', '.join(unexpected)}")
    missing = [n for n in schema.names if n not in positions]
    if missing:
        raise DataError(f"header missing attribute column(s): {', '.join(missing)}")
    has_label = schema.class_attribute in positions
    if labeled and not has_label:
        raise DataError(f"header missing class column {schema.class_attribute!r}")

    cols = [positions[n] for n in schema.names]
    label_col = positions.get(schema.class_attribute)
    rows = []
    for rownum, record in enumerate(reader, start=1):
        if not record:
            continue
        if len(record) != len(header):
            raise DataError(f"row {rownum}: expected {len(header)} fields, got {len(record)}")
        values = tuple(_parse_cell(spec, record[c], rownum) for spec, c in zip(schema.attributes, cols))
        label = None
        if has_label:
            label = record[label_col]
            if label.strip() in MISSING_TOKENS:
                raise DataError(f"row {rownum}, {schema.class_attribute}: missing label")
            if label not in schema.class_labels:
                raise DataError(f"row {rownum}, {schema.class_attribute}: unknown label {label!r}")
        rows.append(Instance(values, label))
    return Dataset(schema, tuple(rows))


def _format_value(value) -> str:
    if isinstance(value, str):
        return value
    return repr(float(value))


def dump_csv(dataset: Dataset) -> str:
    """Serialize to CSV text (schema column order, class column last)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    include_label = any(r.label is not None for r in dataset.rows)
    header = dataset.schema.names
    if include_label:
        header = header + [dataset.schema.class_attribute]
    writer.writerow(header)
    for row in dataset.rows:
        record = [_format_value(v) for v in row.values]
        if include_label:
            record.append(row.label if row.label is not None else "")
        writer.writerow(record)
    return buf.getvalue()


def stratified_split(dataset: Dataset, train_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Split rows per class so every class keeps its share in both partitions.

    For each class with ``k`` rows, ``floor(train_fraction * k)`` rows go to
    the training partition (at least one when ``k >= 2``); the rest go to
    test. Rows are shuffled with ``random.Random(seed)`` (Mersenne Twister),
    visiting classes in schema label order, and both partitions keep the
    original row order.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    if seed < 0:
        raise ValueError("seed must be a non-negative integer")
    if len(dataset) == 0:
        raise DataError("cannot split an empty dataset")
    dataset.require_labels()

    rng = random.Random(seed)
    train_idx = []
    for label in dataset.schema.class_labels:
        members = [i for i, r in enumerate(dataset.rows) if r.label == label]
        k = len(members)
        n_train = math.floor(train_fraction * k)
        if k >= 2 and n_train == 0:
            n_train = 1
        rng.shuffle(members)
        train_idx.extend(members[:n_train])
    chosen = set(train_idx)
    train = [i for i in range(len(dataset)) if i in chosen]
    test = [i for i in range(len(dataset)) if i not in chosen]
    return dataset.subset(train), dataset.subset(test)

