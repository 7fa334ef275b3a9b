from pathlib import Path

import pytest
from hypothesis import strategies as st

from matclass.data import AttributeSpec, Dataset, Instance, Schema, load_csv, load_schema

FIXTURES = Path(__file__).parent / "fixtures"

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    num, title = marker.args
    failed = rep.failed or (rep.when == "call" and rep.outcome != "passed")
    entry = _criteria.setdefault(num, {"title": title, "failed": False, "ran": False})
    entry["ran"] |= rep.when == "call"
    entry["failed"] |= failed


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria):
        e = _criteria[num]
        status = "FAIL" if e["failed"] else ("PASS" if e["ran"] else "SKIP")
        terminalreporter.write_line(f"criterion {num:>2}: {status}  {e['title']}")


def read_fixture(stem):
    with open(FIXTURES / f"{stem}.schema.json", "rb") as fh:
        schema = load_schema(fh)
    with open(FIXTURES / f"{stem}.csv", "rb") as fh:
        return load_csv(fh, schema)


@pytest.fixture
def weather():
    return read_fixture("weather")


@pytest.fixture
def weather_numeric():
    return read_fixture("weather_numeric")


@pytest.fixture
def nb8():
    return read_fixture("nb8")


def make_dataset(spec, rows, labels=("A", "B", "C")):
    """Build a dataset from ``[(name, values_or_None)]`` and raw row tuples."""
    attrs = [AttributeSpec(name, "categorical", tuple(vals)) if vals else AttributeSpec(name, "continuous")
             for name, vals in spec]
    schema = Schema(tuple(attrs), "cls", tuple(labels))
    return Dataset(schema, tuple(Instance(r[:-1], r[-1]) for r in rows))


def filter_fixture(noise=False):
    """8 rows, 4/4 classes. ``id`` is unique per row, ``b`` a binary attribute
    splitting [4,1] / [0,3]. With ``noise`` two zero-gain attributes are added,
    pulling the mean gain below ``b``'s."""
    labels = ["P"] * 4 + ["N"] * 4
    b = ["b1"] * 5 + ["b2"] * 3
    spec = [("id", [f"r{i}" for i in range(8)]), ("b", ["b1", "b2"])]
    cols = [[f"r{i}" for i in range(8)], b]
    if noise:
        spec += [("n1", ["u", "v"]), ("n2", ["u", "v"])]
        cols += [["u", "u", "v", "v"] * 2, ["u", "v"] * 4]
    rows = [tuple(c[i] for c in cols) + (labels[i],) for i in range(8)]
    return make_dataset(spec, rows, ("P", "N"))


@st.composite
def categorical_datasets(draw, max_rows=10, max_attrs=4, max_values=3, n_classes=3):
    """Small purely categorical labeled datasets."""
    n_attrs = draw(st.integers(1, max_attrs))
    spec = []
    for k in range(n_attrs):
        nv = draw(st.integers(1, max_values))
        spec.append((f"a{k}", [f"v{i}" for i in range(nv)]))
    labels = tuple(f"c{i}" for i in range(n_classes))
    n = draw(st.integers(1, max_rows))
    rows = []
    for _ in range(n):
        vals = tuple(draw(st.sampled_from(vs)) for _, vs in spec)
        rows.append(vals + (draw(st.sampled_from(labels)),))
    return make_dataset(spec, rows, labels)


@st.composite
def mixed_datasets(draw, max_rows=50, max_attrs=4, n_classes=3):
    """Labeled datasets mixing categorical and small-integer continuous columns."""
    n_attrs = draw(st.integers(1, max_attrs))
    spec = []
    for k in range(n_attrs):
        if draw(st.booleans()):
            nv = draw(st.integers(1, 4))
            spec.append((f"a{k}", [f"v{i}" for i in range(nv)]))
        else:
            spec.append((f"x{k}", None))
    labels = tuple(f"c{i}" for i in range(n_classes))
    n = draw(st.integers(1, max_rows))
    rows = []
    for _ in range(n):
        vals = []
        for _, vs in spec:
            if vs:
                vals.append(draw(st.sampled_from(vs)))
            else:
                vals.append(float(draw(st.integers(-5, 5))))
        rows.append(tuple(vals) + (draw(st.sampled_from(labels)),))
    return make_dataset(spec, rows, labels)
