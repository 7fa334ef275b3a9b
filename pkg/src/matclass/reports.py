"""Render evaluation results as aligned text, CSV and JSON.

Percentages are rounded half-up to two decimals and rates to four in text
and CSV output; JSON carries the unrounded fractions.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Mapping

from . import __version__
from .evaluation import METRIC_NAMES, EvaluationResult, percent, rate

CLASSIFIER_TITLES = {"nb": "Naive Bayes", "c45": "C4.5 decision tree"}
_PCT = ("accuracy", "precision", "recall", "f_measure")
_SHORT = {"accuracy": "ACC (%)", "precision": "PREC (%)", "recall": "REC (%)", "f_measure": "FM (%)"}
# True when a larger value is better.
_HIGHER_IS_BETTER = {"accuracy": True, "precision": True, "recall": True,
                     "f_measure": True, "tpr": True, "fpr": False}


@dataclass(frozen=True)
class Header:
    command: str
    seed: int | None
    dataset_hash: str
    schema_hash: str = ""

    def items(self) -> list[tuple[str, str]]:
        out = [("toolkit", f"matclass {__version__}"), ("command", self.command),
               ("seed", "none" if self.seed is None else str(self.seed)),
               ("dataset_sha256", self.dataset_hash)]
        if self.schema_hash:
            out.append(("schema_sha256", self.schema_hash))
        return out

    def as_dict(self) -> dict:
        return dict(self.items())


def _fmt(name: str, value: float) -> str:
    return str(percent(value)) if name in _PCT else str(rate(value))


def winners(results: Mapping[str, EvaluationResult]) -> dict:
    """Per-metric winner by pooled value, or ``"tie"``."""
    out = {}
    for name in METRIC_NAMES:
        vals = {k: getattr(r.pooled, name) for k, r in results.items()}
        best = max(vals.values()) if _HIGHER_IS_BETTER[name] else min(vals.values())
        top = [k for k, v in vals.items() if v == best]
        out[name] = top[0] if len(top) == 1 else "tie"
    return out


def _table(rows: list[list[str]]) -> list[str]:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    lines = []
    for r in rows:
        cells = [r[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(r[1:], widths[1:])]
        lines.append("  ".join(cells).rstrip())
    return lines


def render_text(header: Header, results: Mapping[str, EvaluationResult]) -> str:
    lines = [f"# {k}: {v}" for k, v in header.items()]
    for key, res in results.items():
        title = CLASSIFIER_TITLES.get(key, key)
        lines += ["", f"Per-class results: {title}"]
        rows = [["Class Test", "TP", "TN", "FP", "FN"] + [_SHORT[n] for n in _PCT]]
        for label, cm, rep in zip(res.labels, res.matrices, res.reports):
            rows.append([label, str(cm.tp), str(cm.tn), str(cm.fp), str(cm.fn)]
                        + [_fmt(n, getattr(rep, n)) for n in _PCT])
        lines += _table(rows)

    keys = list(results)
    lines += ["", "Average standard metrics (pooled)"]
    rows = [["Standard metric"] + [f"{CLASSIFIER_TITLES.get(k, k)} (%)" for k in keys]]
    for n in _PCT:
        rows.append([n] + [_fmt(n, getattr(results[k].pooled, n)) for k in keys])
    lines += _table(rows)

    lines += ["", "Average standard metrics (macro)"]
    rows = [["Standard metric"] + [f"{CLASSIFIER_TITLES.get(k, k)} (%)" for k in keys]]
    for n in _PCT:
        rows.append([n] + [_fmt(n, getattr(results[k].macro, n)) for k in keys])
    lines += _table(rows)

    lines += ["", "ROC operating point (pooled)"]
    rows = [[""] + [CLASSIFIER_TITLES.get(k, k) for k in keys]]
    for n in ("tpr", "fpr"):
        rows.append([n.upper()] + [_fmt(n, getattr(results[k].pooled, n)) for k in keys])
    lines += _table(rows)

    if len(results) > 1:
        lines += ["", "Winner per metric (pooled)"]
        lines += _table([["Metric", "Winner"]] + [[n, w] for n, w in winners(results).items()])
    return "\n".join(lines) + "\n"


def render_csv(header: Header, results: Mapping[str, EvaluationResult]) -> str:
    buf = io.StringIO()
    for k, v in header.items():
        buf.write(f"# {k}: {v}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["classifier", "scope", "class", "tp", "tn", "fp", "fn"] + list(METRIC_NAMES))
    for key, res in results.items():
        for label, cm, rep in zip(res.labels, res.matrices, res.reports):
            w.writerow([key, "class", label, cm.tp, cm.tn, cm.fp, cm.fn]
                       + [_fmt(n, getattr(rep, n)) for n in METRIC_NAMES])
        pm = res.pooled_matrix
        w.writerow([key, "pooled", "", pm.tp, pm.tn, pm.fp, pm.fn]
                   + [_fmt(n, getattr(res.pooled, n)) for n in METRIC_NAMES])
        w.writerow([key, "macro", "", "", "", "", ""]
                   + [_fmt(n, getattr(res.macro, n)) for n in METRIC_NAMES])
    return buf.getvalue()


def render_json(header: Header, results: Mapping[str, EvaluationResult], extra: dict | None = None) -> str:
    doc = {"header": header.as_dict(), "classifiers": {}}
    for key, res in results.items():
        body = res.as_dict()
        body["roc"] = {"tpr": res.pooled.tpr, "fpr": res.pooled.fpr}
        doc["classifiers"][key] = body
    if len(results) > 1:
        doc["winners"] = winners(results)
    if extra:
        doc.update(extra)
    return json.dumps(doc, indent=2) + "\n"


def confusion_counts_csv(res: EvaluationResult) -> str:
    """Bar-chart data: one row per class with its TP/TN/FP/FN."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["class", "TP", "TN", "FP", "FN"])
    for label, cm in zip(res.labels, res.matrices):
        w.writerow([label, cm.tp, cm.tn, cm.fp, cm.fn])
    return buf.getvalue()


def metrics_comparison_csv(results: Mapping[str, EvaluationResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["metric"] + list(results))
    for n in _PCT:
        w.writerow([n] + [_fmt(n, getattr(r.pooled, n)) for r in results.values()])
    return buf.getvalue()


def roc_points_csv(results: Mapping[str, EvaluationResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["classifier", "tpr", "fpr"])
    for key, r in results.items():
        w.writerow([key, _fmt("tpr", r.pooled.tpr), _fmt("fpr", r.pooled.fpr)])
    return buf.getvalue()
