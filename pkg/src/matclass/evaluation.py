"""One-vs-rest confusion matrices and the metrics derived from them.

Multiclass results are summarized two ways: pooled (sum the per-class
TP/TN/FP/FN counts, then compute metrics) and macro (average the per-class
metrics). Pooling is the primary summary.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from typing import Callable, Mapping, Sequence

from .data import DataError, Dataset, Instance

PRECISION_UNDEFINED = "precision_undefined"
RECALL_UNDEFINED = "recall_undefined"
FPR_UNDEFINED = "fpr_undefined"

METRIC_NAMES = ("accuracy", "precision", "recall", "f_measure", "tpr", "fpr")


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    tn: int
    fp: int
    fn: int

    def __post_init__(self):
        for name in ("tp", "tn", "fp", "fn"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {v!r}")

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    def as_dict(self) -> dict:
        return {"tp": self.tp, "tn": self.tn, "fp": self.fp, "fn": self.fn}


@dataclass(frozen=True)
class MetricsReport:
    accuracy: float
    precision: float
    recall: float
    f_measure: float
    tpr: float
    fpr: float
    degenerate_flags: frozenset = field(default_factory=frozenset)

    def as_dict(self) -> dict:
        out = {name: getattr(self, name) for name in METRIC_NAMES}
        out["degenerate"] = sorted(self.degenerate_flags)
        return out


def percent(value: float) -> Decimal:
    """Percentage rounded half-up to two decimals."""
    return (Decimal(repr(value)) * 100).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP)


def rate(value: float) -> Decimal:
    """Rate rounded half-up to four decimals."""
    return Decimal(repr(value)).quantize(Decimal("0.0001"), rounding=ROUND_HALF_UP)


def one_vs_rest(predicted: Sequence[str], actual: Sequence[str], positive_class: str) -> ConfusionMatrix:
    if len(predicted) != len(actual):
        raise ValueError(f"length mismatch: {len(predicted)} predictions, {len(actual)} labels")
    if not actual:
        raise ValueError("no predictions to score")
    tp = tn = fp = fn = 0
    for p, a in zip(predicted, actual):
        if a == positive_class:
            if p == positive_class:
                tp += 1
            else:
                fn += 1
        elif p == positive_class:
            fp += 1
        else:
            tn += 1
    return ConfusionMatrix(tp, tn, fp, fn)


def _ratio(num, den, flag, flags):
    if den == 0:
        flags.add(flag)
        return 0.0
    return num / den


def metrics(cm: ConfusionMatrix) -> MetricsReport:
    """Accuracy, precision, recall, F-measure and the (TPR, FPR) ROC point.

    A zero denominator yields 0 and records a degenerate flag instead of
    raising, so constant predictors can still be scored.
    """
    if cm.total == 0:
        raise ValueError("confusion matrix is empty")
    flags = set()
    accuracy = (cm.tn + cm.tp) / cm.total
    precision = _ratio(cm.tp, cm.fp + cm.tp, PRECISION_UNDEFINED, flags)
    recall = _ratio(cm.tp, cm.fn + cm.tp, RECALL_UNDEFINED, flags)
    if recall + precision > 0:
        f_measure = 2 * recall * precision / (recall + precision)
    else:
        f_measure = 0.0
    tpr = recall
    fpr = _ratio(cm.fp, cm.fp + cm.tn, FPR_UNDEFINED, flags)
    return MetricsReport(accuracy, precision, recall, f_measure, tpr, fpr, frozenset(flags))


def pool(matrices: Sequence[ConfusionMatrix]) -> ConfusionMatrix:
    if not matrices:
        raise ValueError("nothing to pool")
    return ConfusionMatrix(
        sum(m.tp for m in matrices),
        sum(m.tn for m in matrices),
        sum(m.fp for m in matrices),
        sum(m.fn for m in matrices),
    )


_FLAG_FOR = {
    "precision": PRECISION_UNDEFINED,
    "recall": RECALL_UNDEFINED,
    "tpr": RECALL_UNDEFINED,
    "fpr": FPR_UNDEFINED,
}


def macro_average(reports: Sequence[MetricsReport]) -> MetricsReport:
    """Unweighted mean of each metric over ``reports``.

    Reports whose value for a metric is degenerate are left out of that
    metric's mean. If every report is degenerate for a metric, the mean is 0
    and the flag is carried over. F-measure is skipped where either of its
    inputs was degenerate (the input flags already record that case).
    """
    if not reports:
        raise ValueError("nothing to average")
    values = {}
    flags = set()
    for name in METRIC_NAMES:
        if name == "f_measure":
            usable = [r for r in reports
                      if not r.degenerate_flags & {PRECISION_UNDEFINED, RECALL_UNDEFINED}]
        elif name in _FLAG_FOR:
            usable = [r for r in reports if _FLAG_FOR[name] not in r.degenerate_flags]
        else:
            usable = list(reports)
        if usable:
            values[name] = sum(getattr(r, name) for r in usable) / len(usable)
        else:
            values[name] = 0.0
            if name in _FLAG_FOR:
                flags.add(_FLAG_FOR[name])
    return MetricsReport(**values, degenerate_flags=frozenset(flags))


@dataclass(frozen=True)
class EvaluationResult:
    labels: tuple
    matrices: tuple            # one ConfusionMatrix per label, schema order
    reports: tuple             # metrics of each matrix
    pooled_matrix: ConfusionMatrix
    pooled: MetricsReport
    macro: MetricsReport
    predictions: tuple = ()

    def as_dict(self) -> dict:
        return {
            "classes": [
                {"class": c, **m.as_dict(), "total": m.total, "metrics": r.as_dict()}
                for c, m, r in zip(self.labels, self.matrices, self.reports)
            ],
            "pooled": {**self.pooled_matrix.as_dict(), "total": self.pooled_matrix.total,
                       "metrics": self.pooled.as_dict()},
            "macro": {"metrics": self.macro.as_dict()},
        }


def _summarize(labels, matrices, predictions=()) -> EvaluationResult:
    reports = tuple(metrics(m) for m in matrices)
    pooled_matrix = pool(matrices)
    return EvaluationResult(tuple(labels), tuple(matrices), reports, pooled_matrix,
                            metrics(pooled_matrix), macro_average(reports), tuple(predictions))


def _predict_all(predict_fn, test: Dataset) -> list:
    out = []
    for i, row in enumerate(test.rows, start=1):
        try:
            out.append(predict_fn(Instance(row.values)))
        except Exception as exc:
            raise DataError(f"prediction failed on row {i}: {exc}") from exc
    return out


def evaluate_classifier(predict_fn: Callable[[Instance], str], test: Dataset) -> EvaluationResult:
    """Score ``predict_fn`` on a shared test set, one matrix per class."""
    if len(test) == 0:
        raise DataError("test set is empty")
    test.require_labels()
    predicted = _predict_all(predict_fn, test)
    actual = test.labels
    labels = test.schema.class_labels
    matrices = [one_vs_rest(predicted, actual, c) for c in labels]
    return _summarize(labels, matrices, predicted)


def evaluate_per_class(predict_fn: Callable[[Instance], str],
                       partitions: Mapping[str, Dataset]) -> EvaluationResult:
    """Score ``predict_fn`` with a separate test partition for each class.

    ``partitions`` maps each class label to the rows used to build that
    class's one-vs-rest matrix; pooled totals are then the sum of the
    partition sizes rather than ``classes x rows``.
    """
    if not partitions:
        raise ValueError("no partitions given")
    labels = []
    matrices = []
    schema = next(iter(partitions.values())).schema
    for c in schema.class_labels:
        if c not in partitions:
            continue
        part = partitions[c]
        if len(part) == 0:
            raise DataError(f"test partition for {c!r} is empty")
        part.require_labels()
        predicted = _predict_all(predict_fn, part)
        labels.append(c)
        matrices.append(one_vs_rest(predicted, part.labels, c))
    unknown = set(partitions) - set(schema.class_labels)
    if unknown:
        raise DataError(f"partitions for unknown classes: {sorted(unknown)}")
    return _summarize(labels, matrices)
