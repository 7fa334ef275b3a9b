import io
import json
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matclass.data import (AttributeSpec, DataError, Dataset, Instance, Schema, SchemaError,
                           dump_csv, load_csv, load_schema, stratified_split)
from matclass.synthgen import default_spec, generate

from conftest import FIXTURES, categorical_datasets, make_dataset, mixed_datasets


def schema_doc(**overrides):
    doc = {
        "class_attribute": "Class",
        "class_labels": ["Polymer", "Ceramic", "Metal"],
        "attributes": [
            {"name": "CS", "kind": "categorical", "values": ["Poor", "Good", "Excellent"]},
            {"name": "density", "kind": "continuous", "unit": "g/cm3"},
        ],
    }
    doc.update(overrides)
    return doc


def parse(doc):
    return load_schema(io.BytesIO(json.dumps(doc).encode()))


class TestLoadSchema:
    def test_material_ratings_schema(self):
        with open(FIXTURES / "materials15.schema.json", "rb") as fh:
            schema = load_schema(fh)
        assert len(schema.attributes) == 15
        assert schema.class_labels == ("Polymer", "Ceramic", "Metal")
        assert schema.attribute("TCE").values == ("Low", "High", "Very High")

    def test_no_features_rejected(self):
        with pytest.raises(SchemaError, match="no feature attributes"):
            parse(schema_doc(attributes=[]))

    def test_duplicate_attribute_named(self):
        attrs = [{"name": "CS", "kind": "categorical", "values": ["a"]},
                 {"name": "CS", "kind": "categorical", "values": ["b"]}]
        with pytest.raises(SchemaError, match="'CS'"):
            parse(schema_doc(attributes=attrs))

    @pytest.mark.parametrize("attrs, msg", [
        ([{"name": "CS", "kind": "categorical", "values": []}], "empty value list"),
        ([{"name": "CS", "kind": "categorical", "values": ["a", "a"]}], "duplicate values"),
        ([{"name": "", "kind": "continuous"}], "non-empty"),
        ([{"name": "CS", "kind": "ordinal", "values": ["a"]}], "unknown kind"),
        ([{"name": "CS", "kind": "categorical"}], "without 'values'"),
    ])
    def test_bad_attributes(self, attrs, msg):
        with pytest.raises(SchemaError, match=msg):
            parse(schema_doc(attributes=attrs))

    def test_class_attribute_collision(self):
        with pytest.raises(SchemaError, match="collides"):
            parse(schema_doc(class_attribute="CS"))

    def test_bad_labels(self):
        with pytest.raises(SchemaError):
            parse(schema_doc(class_labels=[]))
        with pytest.raises(SchemaError):
            parse(schema_doc(class_labels=["a", "a"]))

    def test_parse_error_has_position(self):
        with pytest.raises(SchemaError, match="line 2"):
            load_schema(io.StringIO('{\n  "class_attribute": }'))

    def test_round_trip(self):
        schema = parse(schema_doc())
        assert parse(schema.to_dict()) == schema


CSV4 = """density,Class,CS
1.2,Polymer,Poor
3.9,Ceramic,Excellent
7.8,Metal,Good
1.1,Polymer,Poor
"""


class TestLoadCSV:
    schema = parse(schema_doc())

    def test_well_formed(self):
        ds = load_csv(io.StringIO(CSV4), self.schema)
        assert len(ds) == 4
        # columns normalized to schema order, row order kept
        assert ds.rows[0] == Instance(("Poor", 1.2), "Polymer")
        assert ds.labels == ["Polymer", "Ceramic", "Metal", "Polymer"]

    def test_unknown_value_reports_row_and_column(self):
        bad = CSV4.replace("Good", "Superb")
        with pytest.raises(DataError, match=r"row 3, CS: unknown value 'Superb'"):
            load_csv(io.StringIO(bad), self.schema)

    def test_missing_class_column(self):
        text = "CS,density\nPoor,1.0\n"
        with pytest.raises(DataError, match="'Class'"):
            load_csv(io.StringIO(text), self.schema)

    def test_unlabeled_mode(self):
        ds = load_csv(io.StringIO("CS,density\nPoor,1.0\n"), self.schema, labeled=False)
        assert ds.rows[0].label is None

    @pytest.mark.parametrize("cell, msg", [
        ("abc", "non-numeric"), ("nan", "non-finite"), ("inf", "non-finite"),
        ("?", "missing value"), ("", "missing value"),
    ])
    def test_bad_continuous(self, cell, msg):
        text = f"CS,density,Class\nPoor,{cell},Metal\n"
        with pytest.raises(DataError, match=msg):
            load_csv(io.StringIO(text), self.schema)

    def test_missing_categorical_token(self):
        with pytest.raises(DataError, match="row 1, CS: missing value"):
            load_csv(io.StringIO("CS,density,Class\n?,1.0,Metal\n"), self.schema)

    def test_unknown_label(self):
        with pytest.raises(DataError, match="unknown label 'Glass'"):
            load_csv(io.StringIO("CS,density,Class\nPoor,1.0,Glass\n"), self.schema)

    def test_unknown_column(self):
        with pytest.raises(DataError, match="unknown column"):
            load_csv(io.StringIO("CS,density,Class,extra\nPoor,1,Metal,x\n"), self.schema)

    def test_ragged_row(self):
        with pytest.raises(DataError, match="expected 3 fields"):
            load_csv(io.StringIO("CS,density,Class\nPoor,1\n"), self.schema)

    def test_quoted_fields(self):
        schema = parse(schema_doc(attributes=[
            {"name": "CORR", "kind": "categorical", "values": ["Very poor", "Good, mostly"]}]))
        ds = load_csv(io.StringIO('CORR,Class\n"Good, mostly",Metal\n'), schema)
        assert ds.rows[0].values == ("Good, mostly",)
        assert load_csv(io.StringIO(dump_csv(ds)), schema) == ds


def test_dataset_rejects_bad_instances():
    schema = parse(schema_doc())
    with pytest.raises(DataError, match="row 1"):
        Dataset(schema, (Instance(("Poor", float("nan")), "Metal"),))
    with pytest.raises(DataError):
        Dataset(schema, (Instance(("Poor",), "Metal"),))


@settings(max_examples=60, deadline=None)
@given(mixed_datasets(max_rows=20))
def test_csv_round_trip(ds):
    assert load_csv(io.StringIO(dump_csv(ds)), ds.schema) == ds


def test_csv_round_trip_generated():
    ds = generate(default_spec(), 200, 3)
    assert load_csv(io.BytesIO(dump_csv(ds).encode()), ds.schema) == ds


class TestStratifiedSplit:
    def test_full_size_dataset(self):
        ds = generate(default_spec(), 2431, 1)
        train, test = stratified_split(ds, 0.75, 1)
        assert len(train) + len(test) == 2431
        assert set(train.labels) == set(test.labels) == set(ds.schema.class_labels)

    def test_single_class_floor(self):
        ds = make_dataset([("a", ["x"])], [("x", "A")] * 4)
        train, test = stratified_split(ds, 0.75, 0)
        assert (len(train), len(test)) == (3, 1)

    def test_small_class_keeps_one_training_row(self):
        ds = make_dataset([("a", ["x"])], [("x", "A")] * 2 + [("x", "B")] * 10)
        train, _ = stratified_split(ds, 0.1, 0)
        assert Counter(train.labels) == {"A": 1, "B": 1}

    def test_deterministic(self):
        ds = generate(default_spec(), 300, 5)
        a = stratified_split(ds, 0.75, 42)
        b = stratified_split(ds, 0.75, 42)
        assert dump_csv(a[0]) == dump_csv(b[0]) and dump_csv(a[1]) == dump_csv(b[1])
        c = stratified_split(ds, 0.75, 43)
        assert dump_csv(c[0]) != dump_csv(a[0])

    @pytest.mark.parametrize("fraction", [0.0, 1.0, -0.5, 1.5])
    def test_fraction_bounds(self, fraction):
        ds = make_dataset([("a", ["x"])], [("x", "A")] * 4)
        with pytest.raises(ValueError):
            stratified_split(ds, fraction, 0)

    def test_rejects_unlabeled(self):
        ds = make_dataset([("a", ["x"])], [("x", None)] * 4)
        with pytest.raises(DataError):
            stratified_split(ds, 0.5, 0)


@settings(max_examples=100, deadline=None)
@given(categorical_datasets(max_rows=30), st.floats(0.05, 0.95), st.integers(0, 2**32))
def test_split_preserves_rows(ds, fraction, seed):
    train, test = stratified_split(ds, fraction, seed)
    key = lambda r: (r.values, r.label)  # noqa: E731
    assert sorted(train.rows + test.rows, key=key) == sorted(ds.rows, key=key)
    for c in ds.schema.class_labels:
        k = ds.labels.count(c)
        assert abs(train.labels.count(c) - fraction * k) <= 1
