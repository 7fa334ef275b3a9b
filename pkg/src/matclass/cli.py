"""Command-line entry point: ``matclass <command> [flags]``.

Commands: generate, train, predict, evaluate, compare, verify-tables.
Defaults: ``--seed 7``, ``--split 0.75`` for evaluate/compare, ``--alpha 1.0``,
``--sigma-floor 1e-6``, ``--min-leaf 1``, unlimited ``--max-depth``.
"""

from __future__ import annotations

import argparse
import json
import shlex
import sys
from pathlib import Path

from . import c45, naive_bayes, published, reports, synthgen
from .data import DataError, Dataset, Schema, SchemaError, dump_csv, load_csv, load_schema, stratified_split
from .evaluation import evaluate_classifier

DEFAULT_SEED = 7
DEFAULT_SPLIT = 0.75
FORMATS = ("text", "csv", "json")


class CLIError(Exception):
    pass


def _fraction(text: str) -> float:
    v = float(text)
    if not 0.0 < v < 1.0:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1), got {text}")
    return v


def _uint(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be a non-negative integer, got {text}")
    return v


def _formats(text: str) -> tuple:
    parts = tuple(p.strip() for p in text.split(",") if p.strip())
    bad = [p for p in parts if p not in FORMATS]
    if bad or not parts:
        raise argparse.ArgumentTypeError(f"formats must be a subset of {','.join(FORMATS)}")
    return tuple(f for f in FORMATS if f in parts)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="matclass", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, data=True):
        p.add_argument("--out", type=Path, default=Path("."), help="output directory (default: .)")
        p.add_argument("--seed", type=_uint, default=DEFAULT_SEED, help=f"random seed (default: {DEFAULT_SEED})")
        if data:
            p.add_argument("--schema", type=Path, help="schema JSON")
            p.add_argument("--data", type=Path, required=True, help="dataset CSV")

    def learner(p):
        p.add_argument("--classifier", choices=("nb", "c45"))
        p.add_argument("--alpha", type=float, default=1.0, help="NB smoothing pseudo-count (default: 1.0)")
        p.add_argument("--sigma-floor", type=float, default=1e-6, help="NB minimum sigma (default: 1e-6)")
        p.add_argument("--min-leaf", type=int, default=1, help="C4.5 minimum node size (default: 1)")
        p.add_argument("--max-depth", type=int, default=None, help="C4.5 depth limit (default: none)")

    p = sub.add_parser("generate", help="write a synthetic dataset and its schema")
    common(p, data=False)
    p.add_argument("--n", type=int, default=2431, help="number of rows (default: 2431)")
    p.add_argument("--noise", type=float, default=synthgen.DEFAULT_NOISE_RATE,
                   help=f"categorical noise rate (default: {synthgen.DEFAULT_NOISE_RATE})")

    p = sub.add_parser("train", help="train a classifier and write the model JSON")
    common(p)
    learner(p)
    p.add_argument("--split", type=_fraction, default=None, help="train on this fraction only")
    p.add_argument("--model", type=Path, help="model output path (default: OUT/model.json)")

    p = sub.add_parser("predict", help="label rows with a trained model")
    common(p)
    p.add_argument("--model", type=Path, required=True)

    p = sub.add_parser("evaluate", help="evaluate a model or train-then-evaluate")
    common(p)
    learner(p)
    p.add_argument("--model", type=Path)
    p.add_argument("--split", type=_fraction, default=None,
                   help=f"train/test fraction (default: {DEFAULT_SPLIT} when training)")
    p.add_argument("--format", type=_formats, default=FORMATS, help="subset of text,csv,json")

    p = sub.add_parser("compare", help="train and evaluate both classifiers on one split")
    common(p)
    learner(p)
    p.add_argument("--split", type=_fraction, default=DEFAULT_SPLIT)
    p.add_argument("--format", type=_formats, default=FORMATS, help="subset of text,csv,json")

    p = sub.add_parser("verify-tables", help="recompute published metrics from their counts")
    p.add_argument("--out", type=Path, default=None, help="also write verify_tables.txt here")
    return parser


# ---------------------------------------------------------------------------

def _read_schema(path: Path) -> Schema:
    try:
        with open(path, "rb") as fh:
            return load_schema(fh)
    except OSError as exc:
        raise CLIError(f"{path}: {exc.strerror}") from None
    except SchemaError as exc:
        raise CLIError(f"{path}: {exc}") from None


def _read_data(path: Path, schema: Schema, labeled: bool = True) -> Dataset:
    try:
        with open(path, "rb") as fh:
            return load_csv(fh, schema, labeled=labeled)
    except OSError as exc:
        raise CLIError(f"{path}: {exc.strerror}") from None
    except DataError as exc:
        raise CLIError(f"{path}: {exc}") from None


def _read_model(path: Path):
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise CLIError(f"{path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise CLIError(f"{path}: invalid JSON ({exc.msg}, line {exc.lineno})") from None
    kind = doc.get("kind")
    if kind == "naive_bayes":
        return "nb", naive_bayes.NaiveBayesModel.from_dict(doc)
    if kind == "c45":
        return "c45", c45.DecisionTree.from_dict(doc)
    raise CLIError(f"{path}: unknown model kind {kind!r}")


def _write(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8", newline="")
    except OSError as exc:
        raise CLIError(f"{path}: {exc.strerror}") from None


def _schema_for(args) -> Schema:
    if args.schema is None:
        raise CLIError("--schema is required")
    return _read_schema(args.schema)


def _fit(kind: str, train: Dataset, args):
    if kind == "nb":
        return naive_bayes.train(train, args.alpha, args.sigma_floor)
    params = c45.TreeParams(min_leaf_size=args.min_leaf, max_depth=args.max_depth)
    return c45.build(train, params)


def _predictor(kind: str, model):
    if kind == "nb":
        return lambda inst: naive_bayes.predict(model, inst)
    return lambda inst: c45.predict_tree(model, inst)


def _emit(out: Path, stem: str, formats, header, results, extra=None) -> None:
    if "text" in formats:
        _write(out / f"{stem}.txt", reports.render_text(header, results))
    if "csv" in formats:
        _write(out / f"{stem}.csv", reports.render_csv(header, results))
    if "json" in formats:
        _write(out / f"{stem}.json", reports.render_json(header, results, extra))
    for key, res in results.items():
        _write(out / f"confusion_counts_{key}.csv", reports.confusion_counts_csv(res))
    _write(out / "metrics_comparison.csv", reports.metrics_comparison_csv(results))
    _write(out / "roc_points.csv", reports.roc_points_csv(results))


# ---------------------------------------------------------------------------

def cmd_generate(args, cmdline) -> int:
    if args.n < 1:
        raise CLIError("--n must be >= 1")
    try:
        spec = synthgen.default_spec(args.noise)
    except SchemaError as exc:
        raise CLIError(str(exc)) from None
    ds = synthgen.generate(spec, args.n, args.seed)
    _write(args.out / "dataset.csv", dump_csv(ds))
    _write(args.out / "schema.json", ds.schema.to_json())
    counts = ", ".join(f"{c}={k}" for c, k in zip(ds.schema.class_labels, ds.class_counts()))
    print(f"{len(ds)} rows, {len(ds.schema.class_labels)} classes ({counts})")
    return 0


def cmd_train(args, cmdline) -> int:
    if args.classifier is None:
        raise CLIError("--classifier is required")
    ds = _read_data(args.data, _schema_for(args))
    train = ds
    if args.split is not None:
        train, _ = stratified_split(ds, args.split, args.seed)
    model = _fit(args.classifier, train, args)
    path = args.model or args.out / "model.json"
    _write(path, model.to_json())
    if args.classifier == "nb":
        priors = ", ".join(f"{c}={model.priors[c]:.4f}" for c in model.schema.class_labels)
        print(f"naive_bayes trained on {len(train)} rows; priors: {priors}")
    else:
        print(f"c45 trained on {len(train)} rows; depth {model.depth()}, "
              f"{model.leaf_count()} leaves, {model.node_count()} nodes")
    return 0


def cmd_predict(args, cmdline) -> int:
    kind, model = _read_model(args.model)
    schema = model.schema
    if args.schema is not None and _read_schema(args.schema) != schema:
        raise CLIError("schema mismatch between --schema and model")
    ds = _read_data(args.data, schema, labeled=False)
    predict = _predictor(kind, model)
    labeled = all(r.label is not None for r in ds.rows)
    lines = ["row,predicted,actual" if labeled else "row,predicted"]
    for i, row in enumerate(ds.rows, start=1):
        p = predict(row)
        lines.append(f"{i},{p},{row.label}" if labeled else f"{i},{p}")
    _write(args.out / "predictions.csv", "\n".join(lines) + "\n")
    print(f"{len(ds)} predictions written to {args.out / 'predictions.csv'}")
    return 0


def cmd_evaluate(args, cmdline) -> int:
    if args.model is not None:
        kind, model = _read_model(args.model)
        if args.schema is not None and _read_schema(args.schema) != model.schema:
            raise CLIError("schema mismatch between --schema and model")
        ds = _read_data(args.data, model.schema)
        test = ds if args.split is None else stratified_split(ds, args.split, args.seed)[1]
    else:
        if args.classifier is None:
            raise CLIError("evaluate needs --model or --classifier")
        kind = args.classifier
        ds = _read_data(args.data, _schema_for(args))
        train, test = stratified_split(ds, args.split or DEFAULT_SPLIT, args.seed)
        model = _fit(kind, train, args)
    result = evaluate_classifier(_predictor(kind, model), test)
    header = reports.Header(cmdline, args.seed, ds.digest(), ds.schema.digest())
    _emit(args.out, "evaluation", args.format, header, {kind: result})
    print(f"{kind}: pooled accuracy {reports.percent(result.pooled.accuracy)}% on {len(test)} test rows")
    return 0


def cmd_compare(args, cmdline) -> int:
    ds = _read_data(args.data, _schema_for(args))
    train, test = stratified_split(ds, args.split, args.seed)
    results = {}
    for kind in ("nb", "c45"):
        model = _fit(kind, train, args)
        results[kind] = evaluate_classifier(_predictor(kind, model), test)
    header = reports.Header(cmdline, args.seed, ds.digest(), ds.schema.digest())
    extra = {"partition": {"train_rows": len(train), "test_rows": len(test),
                           "train_sha256": train.digest(), "test_sha256": test.digest()}}
    _emit(args.out, "comparison", args.format, header, results, extra)
    for kind, res in results.items():
        print(f"{kind}: pooled accuracy {reports.percent(res.pooled.accuracy)}%")
    print(f"accuracy winner: {reports.winners(results)['accuracy']}")
    return 0


def cmd_verify_tables(args, cmdline) -> int:
    checks = published.verify_tables()
    lines = [c.line() for c in checks]
    failed = sum(c.status == published.FAIL for c in checks)
    warned = sum(c.status == published.WARN for c in checks)
    passed = len(checks) - failed - warned
    lines.append(f"{passed} passed, {failed} failed, {warned} warnings")
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if args.out is not None:
        _write(args.out / "verify_tables.txt", text)
    return 1 if failed else 0


COMMANDS = {
    "generate": cmd_generate,
    "train": cmd_train,
    "predict": cmd_predict,
    "evaluate": cmd_evaluate,
    "compare": cmd_compare,
    "verify-tables": cmd_verify_tables,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    cmdline = "matclass " + shlex.join(argv)
    try:
        return COMMANDS[args.command](args, cmdline)
    except (CLIError, DataError, SchemaError, ValueError) as exc:
        print(f"matclass {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
