import json
import subprocess
import sys

import pytest

from matclass.cli import main

from conftest import FIXTURES


def snapshot(d):
    return {p.name: p.read_bytes() for p in sorted(d.iterdir()) if p.is_file()}


@pytest.fixture(scope="module")
def synth(tmp_path_factory):
    d = tmp_path_factory.mktemp("synth")
    assert main(["generate", "--n", "400", "--seed", "3", "--out", str(d)]) == 0
    return d


def data_args(d):
    return ["--data", str(d / "dataset.csv"), "--schema", str(d / "schema.json")]


def determined(tmp_path):
    """Tiny dataset whose class is fixed by one attribute."""
    schema = {"class_attribute": "cls", "class_labels": ["A", "B"],
              "attributes": [{"name": "k", "kind": "categorical", "values": ["a", "b"]},
                             {"name": "z", "kind": "categorical", "values": ["u", "v"]}]}
    (tmp_path / "schema.json").write_text(json.dumps(schema))
    rows = ["k,z,cls"] + [f"a,{'uv'[i % 2]},A" for i in range(8)] + [f"b,{'uv'[i % 3 % 2]},B" for i in range(8)]
    (tmp_path / "dataset.csv").write_text("\n".join(rows) + "\n")
    return tmp_path


class TestGenerate:
    def test_summary_and_files(self, tmp_path, capsys):
        assert main(["generate", "--n", "2431", "--seed", "7", "--out", str(tmp_path)]) == 0
        assert capsys.readouterr().out.startswith("2431 rows, 3 classes")
        assert sorted(p.name for p in tmp_path.iterdir()) == ["dataset.csv", "schema.json"]

    def test_noise_zero_separable(self, tmp_path):
        assert main(["generate", "--n", "300", "--noise", "0", "--out", str(tmp_path)]) == 0
        assert main(["evaluate", "--classifier", "nb", *data_args(tmp_path), "--out", str(tmp_path)]) == 0
        doc = json.loads((tmp_path / "evaluation.json").read_text())
        assert doc["classifiers"]["nb"]["pooled"]["metrics"]["accuracy"] == 1.0

    def test_bad_noise(self, tmp_path, capsys):
        assert main(["generate", "--noise", "1.5", "--out", str(tmp_path)]) == 2
        assert "noise_rate" in capsys.readouterr().err


class TestTrainPredict:
    def test_nb_model(self, synth, tmp_path, capsys):
        assert main(["train", "--classifier", "nb", "--alpha", "1.0", *data_args(synth), "--out", str(tmp_path)]) == 0
        assert "priors" in capsys.readouterr().out
        doc = json.loads((tmp_path / "model.json").read_text())
        assert doc["kind"] == "naive_bayes"

    def test_c45_pure(self, tmp_path, capsys):
        d = determined(tmp_path)
        lines = (d / "dataset.csv").read_text().splitlines()
        (d / "dataset.csv").write_text("\n".join(lines[:9]) + "\n")
        assert main(["train", "--classifier", "c45", *data_args(d), "--out", str(d)]) == 0
        assert "depth 0, 1 leaves" in capsys.readouterr().out
        model = json.loads((d / "model.json").read_text())
        assert model["root"]["leaf_label"] == "A"
        # single-leaf model is perfect on its single-class data
        assert main(["evaluate", "--model", str(d / "model.json"), "--data", str(d / "dataset.csv"),
                     "--out", str(d)]) == 0
        doc = json.loads((d / "evaluation.json").read_text())
        assert doc["classifiers"]["c45"]["pooled"]["metrics"]["accuracy"] == 1.0

    def test_predict(self, synth, tmp_path):
        model = tmp_path / "m.json"
        assert main(["train", "--classifier", "c45", *data_args(synth), "--model", str(model)]) == 0
        assert main(["predict", "--model", str(model), "--data", str(synth / "dataset.csv"),
                     "--out", str(tmp_path)]) == 0
        lines = (tmp_path / "predictions.csv").read_text().splitlines()
        assert lines[0] == "row,predicted,actual" and len(lines) == 401
        # grown to purity, so the tree reproduces (nearly all) training labels
        hits = sum(a == b for _, a, b in (l.split(",") for l in lines[1:]))
        assert hits >= 0.95 * 400

    def test_predict_unlabeled(self, tmp_path):
        d = determined(tmp_path)
        assert main(["train", "--classifier", "nb", *data_args(d), "--out", str(d)]) == 0
        (d / "new.csv").write_text("z,k\nu,a\nv,b\n")
        assert main(["predict", "--model", str(d / "model.json"), "--data", str(d / "new.csv"),
                     "--out", str(d)]) == 0
        assert (d / "predictions.csv").read_text() == "row,predicted\n1,A\n2,B\n"


class TestEvaluateCompare:
    def test_evaluate_outputs(self, synth, tmp_path):
        assert main(["evaluate", "--classifier", "nb", *data_args(synth), "--out", str(tmp_path)]) == 0
        names = {p.name for p in tmp_path.iterdir()}
        assert {"evaluation.txt", "evaluation.csv", "evaluation.json", "confusion_counts_nb.csv",
                "metrics_comparison.csv", "roc_points.csv"} <= names
        doc = json.loads((tmp_path / "evaluation.json").read_text())
        assert doc["header"]["seed"] == "7"
        assert doc["header"]["command"].startswith("matclass evaluate --classifier nb")
        assert len(doc["header"]["dataset_sha256"]) == 64

    def test_format_subset(self, synth, tmp_path):
        assert main(["evaluate", "--classifier", "c45", "--format", "json", *data_args(synth),
                     "--out", str(tmp_path)]) == 0
        assert not (tmp_path / "evaluation.txt").exists()

    def test_compare_tie(self, tmp_path, capsys):
        d = determined(tmp_path)
        assert main(["compare", *data_args(d), "--out", str(d)]) == 0
        doc = json.loads((d / "comparison.json").read_text())
        for k in ("nb", "c45"):
            assert doc["classifiers"][k]["pooled"]["metrics"]["accuracy"] == 1.0
        assert set(doc["winners"].values()) == {"tie"}
        assert "accuracy winner: tie" in capsys.readouterr().out

    def test_compare_shares_partition(self, synth, tmp_path):
        assert main(["compare", *data_args(synth), "--out", str(tmp_path)]) == 0
        doc = json.loads((tmp_path / "comparison.json").read_text())
        assert doc["partition"]["train_rows"] + doc["partition"]["test_rows"] == 400
        nb, c45 = (doc["classifiers"][k]["pooled"] for k in ("nb", "c45"))
        assert nb["tp"] + nb["fn"] == c45["tp"] + c45["fn"] == doc["partition"]["test_rows"]


class TestErrors:
    def test_missing_file(self, tmp_path, capsys):
        code = main(["train", "--classifier", "nb", "--data", str(tmp_path / "nope.csv"),
                     "--schema", str(FIXTURES / "nb8.schema.json")])
        assert code == 2
        assert "nope.csv" in capsys.readouterr().err

    def test_bad_row(self, tmp_path, capsys):
        (tmp_path / "bad.csv").write_text("color,size,kind\nred,XL,A\n")
        code = main(["train", "--classifier", "nb", "--data", str(tmp_path / "bad.csv"),
                     "--schema", str(FIXTURES / "nb8.schema.json")])
        assert code == 2
        assert "row 1, size: unknown value 'XL'" in capsys.readouterr().err

    def test_schema_mismatch(self, synth, tmp_path):
        assert main(["train", "--classifier", "nb", *data_args(synth), "--out", str(tmp_path)]) == 0
        code = main(["evaluate", "--model", str(tmp_path / "model.json"), "--data", str(synth / "dataset.csv"),
                     "--schema", str(FIXTURES / "nb8.schema.json")])
        assert code == 2

    def test_missing_classifier(self, synth):
        assert main(["train", *data_args(synth)]) == 2


def test_verify_tables_exit(tmp_path, capsys):
    code = main(["verify-tables", "--out", str(tmp_path)])
    out = capsys.readouterr().out
    assert code == 1  # one published per-class cell is not derivable
    assert out.splitlines()[-1] == "36 passed, 1 failed, 5 warnings"
    assert (tmp_path / "verify_tables.txt").read_text() == out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "matclass", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "compare" in proc.stdout


COMMANDS = [
    ["generate", "--n", "300", "--seed", "5"],
    ["train", "--classifier", "nb", "--split", "0.75"],
    ["train", "--classifier", "c45", "--model", "{out}/tree.json"],
    ["predict", "--model", "{out}/tree.json", "--data", "{data}/dataset.csv"],
    ["evaluate", "--classifier", "c45"],
    ["compare"],
    ["verify-tables"],
]


@pytest.mark.parametrize("argv", COMMANDS, ids=lambda a: a[0] + "-" + "-".join(a[1:3]).strip("-"))
def test_rerun_is_byte_identical(argv, synth, tmp_path):
    out = tmp_path / "out"
    out.mkdir()
    argv = [a.format(out=out, data=synth) for a in argv]
    if argv[0] not in ("generate", "verify-tables", "predict"):
        argv += data_args(synth)
    argv += ["--out", str(out)]
    if argv[0] == "predict":
        assert main(["train", "--classifier", "c45", *data_args(synth), "--model", str(out / "tree.json")]) == 0
    first_code = main(argv)
    first = snapshot(out)
    assert main(argv) == first_code
    assert snapshot(out) == first and first
