"""Naive Bayesian classifier over mixed categorical / continuous attributes.

Categorical attributes use add-alpha smoothed frequency tables, continuous
attributes a per-class normal density. Scoring runs in the log domain so
products over many attributes do not underflow; ``alpha=0`` gives the plain
maximum-likelihood estimator.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .data import DataError, Dataset, Instance, Schema

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

#: Log scores closer than this count as tied (rounding noise between
#: mathematically equal products).
TIE_TOLERANCE = 1e-10


@dataclass(frozen=True)
class NaiveBayesModel:
    schema: Schema
    priors: dict            # label -> P(label)
    tables: dict            # label -> attribute -> value -> P(value | label)
    gaussians: dict         # label -> attribute -> (mu, sigma)
    alpha: float
    sigma_floor: float

    def to_dict(self) -> dict:
        return {
            "kind": "naive_bayes",
            "version": 1,
            "alpha": self.alpha,
            "sigma_floor": self.sigma_floor,
            "priors": dict(self.priors),
            "tables": {c: {a: dict(t) for a, t in per.items()} for c, per in self.tables.items()},
            "gaussians": {c: {a: list(p) for a, p in per.items()} for c, per in self.gaussians.items()},
            "schema": self.schema.to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, doc: dict) -> "NaiveBayesModel":
        if doc.get("kind") != "naive_bayes":
            raise ValueError(f"not a naive Bayes model (kind={doc.get('kind')!r})")
        if doc.get("version") != 1:
            raise ValueError(f"unsupported model version {doc.get('version')!r}")
        schema = Schema.from_dict(doc["schema"])
        gaussians = {c: {a: (float(p[0]), float(p[1])) for a, p in per.items()}
                     for c, per in doc["gaussians"].items()}
        return cls(schema, dict(doc["priors"]), doc["tables"], gaussians,
                   float(doc["alpha"]), float(doc["sigma_floor"]))


@dataclass(frozen=True)
class ClassScores:
    labels: tuple
    log_scores: tuple
    posteriors: tuple

    def as_dict(self) -> dict:
        return dict(zip(self.labels, self.posteriors))


def gaussian_density(x: float, mu: float, sigma: float) -> float:
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    z = (x - mu) / sigma
    return math.exp(-0.5 * z * z) / (sigma * math.sqrt(2.0 * math.pi))


def gaussian_log_density(x: float, mu: float, sigma: float) -> float:
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    z = (x - mu) / sigma
    return -0.5 * z * z - math.log(sigma) - _LOG_SQRT_2PI


def _safe_log(p: float) -> float:
    return math.log(p) if p > 0 else -math.inf


def train(dataset: Dataset, smoothing_alpha: float = 1.0, sigma_floor: float = 1e-6) -> NaiveBayesModel:
    """Estimate priors, conditional tables and per-class normal parameters.

    Args:
        dataset: labeled training rows.
        smoothing_alpha: pseudo-count added to every class and every
            categorical value. ``0`` reproduces raw empirical frequencies.
        sigma_floor: lower bound on each class standard deviation.

    Raises:
        DataError: on an empty dataset, unlabeled rows, or a class with no
            rows but a continuous attribute to estimate while ``alpha == 0``.
    """
    if smoothing_alpha < 0:
        raise ValueError("smoothing_alpha must be >= 0")
    if not sigma_floor > 0:
        raise ValueError("sigma_floor must be > 0")
    if len(dataset) == 0:
        raise DataError("cannot train on an empty dataset")
    dataset.require_labels()

    schema = dataset.schema
    labels = schema.class_labels
    alpha = float(smoothing_alpha)
    n = len(dataset)

    by_class = {c: [] for c in labels}
    for row in dataset.rows:
        by_class[row.label].append(row)

    priors = {c: (len(by_class[c]) + alpha) / (n + alpha * len(labels)) for c in labels}

    # Absent-class fallback for continuous attributes: whole-dataset moments.
    overall = {}
    for j, spec in enumerate(schema.attributes):
        if spec.is_continuous:
            overall[spec.name] = _moments([r.values[j] for r in dataset.rows], sigma_floor)

    tables, gaussians = {}, {}
    for c in labels:
        rows = by_class[c]
        nc = len(rows)
        tables[c], gaussians[c] = {}, {}
        for j, spec in enumerate(schema.attributes):
            if spec.is_categorical:
                counts = dict.fromkeys(spec.values, 0)
                for r in rows:
                    counts[r.values[j]] += 1
                denom = nc + alpha * len(spec.values)
                if denom == 0:
                    # class absent and alpha == 0: its prior is 0, table is moot
                    tables[c][spec.name] = {v: 1.0 / len(spec.values) for v in spec.values}
                else:
                    tables[c][spec.name] = {v: (counts[v] + alpha) / denom for v in spec.values}
            else:
                if nc == 0:
                    if alpha == 0:
                        raise DataError(
                            f"class {c!r} has no rows to estimate continuous attribute "
                            f"{spec.name!r} (alpha = 0)")
                    gaussians[c][spec.name] = overall[spec.name]
                else:
                    gaussians[c][spec.name] = _moments([r.values[j] for r in rows], sigma_floor)
    return NaiveBayesModel(schema, priors, tables, gaussians, alpha, float(sigma_floor))


def _moments(xs, sigma_floor):
    m = len(xs)
    mu = math.fsum(xs) / m
    var = math.fsum((x - mu) ** 2 for x in xs) / m
    return mu, max(math.sqrt(var), sigma_floor)


def _check(model: NaiveBayesModel, instance: Instance):
    try:
        model.schema.validate_instance(Instance(instance.values))
    except DataError as exc:
        raise DataError(f"instance does not match model schema: {exc}") from None


def score(model: NaiveBayesModel, instance: Instance) -> ClassScores:
    """Log-domain class scores and normalized posteriors for one instance."""
    _check(model, instance)
    attrs = model.schema.attributes
    logs = []
    for c in model.schema.class_labels:
        total = _safe_log(model.priors[c])
        for spec, x in zip(attrs, instance.values):
            if total == -math.inf:
                break
            if spec.is_categorical:
                total += _safe_log(model.tables[c][spec.name][x])
            else:
                mu, sigma = model.gaussians[c][spec.name]
                total += gaussian_log_density(x, mu, sigma)
        logs.append(total)

    finite = [s for s in logs if s != -math.inf]
    if finite:
        top = max(finite)
        weights = [math.exp(s - top) if s != -math.inf else 0.0 for s in logs]
        z = math.fsum(weights)
        posteriors = tuple(w / z for w in weights)
    else:
        posteriors = tuple(model.priors[c] for c in model.schema.class_labels)
    return ClassScores(model.schema.class_labels, tuple(logs), posteriors)


def predict(model: NaiveBayesModel, instance: Instance) -> str:
    """Most probable class; ties go to the label listed first in the schema."""
    s = score(model, instance)
    keys = s.log_scores
    if all(v == -math.inf for v in keys):
        keys = s.posteriors
    top = max(keys)
    for label, k in zip(s.labels, keys):
        if k == top or k >= top - TIE_TOLERANCE:
            return label


def load_model(source) -> NaiveBayesModel:
    raw = source.read()
    if isinstance(raw, bytes):
        raw = raw.decode("utf-8")
    return NaiveBayesModel.from_dict(json.loads(raw))
