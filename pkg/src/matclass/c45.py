"""C4.5 decision tree induction.

Splitting uses gain ratio, restricted to candidates whose information gain is
at least the mean gain of all usable candidates at the node. Categorical
attributes split multiway (one branch per schema value) and are consumed by
the split; continuous attributes split in two at an observed value ``t``
(``x <= t`` / ``x > t``) and remain available further down. Trees grow until
partitions are pure or no split helps; there is no pruning.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .data import DataError, Dataset, Instance, Schema, SchemaError

LE = "<="
GT = ">"

#: Absolute slack used when comparing gains / ratios computed in floating point.
TIE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class SplitCriterion:
    attribute: str
    threshold: float | None = None

    @property
    def is_multiway(self) -> bool:
        return self.threshold is None


@dataclass(frozen=True)
class TreeParams:
    min_leaf_size: int = 1
    max_depth: int | None = None
    split_info_epsilon: float = 1e-12

    def __post_init__(self):
        if self.min_leaf_size < 1:
            raise ValueError("min_leaf_size must be >= 1")
        if self.max_depth is not None and self.max_depth < 1:
            raise ValueError("max_depth must be >= 1 (or None for unlimited)")
        if not self.split_info_epsilon > 0:
            raise ValueError("split_info_epsilon must be > 0")

    def to_dict(self) -> dict:
        return {"min_leaf_size": self.min_leaf_size, "max_depth": self.max_depth,
                "split_info_epsilon": self.split_info_epsilon}


@dataclass(frozen=True)
class Leaf:
    label: str
    counts: dict


@dataclass(frozen=True)
class Node:
    criterion: SplitCriterion
    majority_label: str
    counts: dict
    children: dict = field(default_factory=dict)


TreeNode = Union[Leaf, Node]


# ---------------------------------------------------------------------------
# Information measures (bits)
# ---------------------------------------------------------------------------

def entropy(class_counts: Sequence[int]) -> float:
    total = sum(class_counts)
    if total <= 0:
        raise ValueError("entropy of an empty partition is undefined")
    return -math.fsum((c / total) * math.log2(c / total) for c in class_counts if c > 0)


def expected_info(partition_class_counts: Sequence[Sequence[int]]) -> float:
    """Weighted entropy of a partition; empty subsets contribute nothing."""
    sizes = [sum(p) for p in partition_class_counts]
    total = sum(sizes)
    if total <= 0:
        raise ValueError("every subset of the partition is empty")
    return math.fsum((s / total) * entropy(p) for p, s in zip(partition_class_counts, sizes) if s > 0)


def split_info_sizes(sizes: Sequence[int]) -> float:
    total = sum(sizes)
    if total <= 0:
        raise ValueError("every subset of the partition is empty")
    return -math.fsum((s / total) * math.log2(s / total) for s in sizes if s > 0)


def partition_counts(dataset: Dataset, criterion: SplitCriterion) -> list[list[int]]:
    """Per-branch class counts induced by ``criterion``, in branch order."""
    schema = dataset.schema
    j = schema.index(criterion.attribute)
    spec = schema.attributes[j]
    _check_criterion(spec, criterion)
    labels = {c: i for i, c in enumerate(schema.class_labels)}
    if criterion.is_multiway:
        branch = {v: i for i, v in enumerate(spec.values)}
        out = [[0] * len(labels) for _ in spec.values]
        for row in dataset.rows:
            out[branch[row.values[j]]][labels[row.label]] += 1
    else:
        out = [[0] * len(labels) for _ in range(2)]
        for row in dataset.rows:
            out[0 if row.values[j] <= criterion.threshold else 1][labels[row.label]] += 1
    return out


def _check_criterion(spec, criterion):
    if criterion.is_multiway and not spec.is_categorical:
        raise SchemaError(f"multiway split requires a categorical attribute, {spec.name!r} is continuous")
    if not criterion.is_multiway and not spec.is_continuous:
        raise SchemaError(f"threshold split requires a continuous attribute, {spec.name!r} is categorical")


def info_gain(dataset: Dataset, criterion: SplitCriterion) -> float:
    parts = partition_counts(dataset, criterion)
    return entropy(dataset.class_counts()) - expected_info(parts)


def split_info(dataset: Dataset, criterion: SplitCriterion) -> float:
    return split_info_sizes([sum(p) for p in partition_counts(dataset, criterion)])


def gain_ratio(dataset: Dataset, criterion: SplitCriterion, epsilon: float = 1e-12) -> float | None:
    """Gain over split info, or ``None`` when split info is below ``epsilon``."""
    si = split_info(dataset, criterion)
    if si < epsilon:
        return None
    return info_gain(dataset, criterion) / si


def candidate_thresholds(dataset: Dataset, attribute: str) -> list[float]:
    spec = dataset.schema.attribute(attribute)
    if not spec.is_continuous:
        raise SchemaError(f"{attribute!r} is not continuous")
    values = sorted(set(dataset.column(attribute)))
    return values[:-1]


# ---------------------------------------------------------------------------
# Vectorized candidate search used during induction
# ---------------------------------------------------------------------------

class _Frame:
    """Column-encoded copy of a dataset for fast counting."""

    def __init__(self, dataset: Dataset):
        schema = dataset.schema
        self.schema = schema
        self.m = len(schema.class_labels)
        pos = {c: i for i, c in enumerate(schema.class_labels)}
        self.y = np.array([pos[r.label] for r in dataset.rows], dtype=np.int64)
        self.cols = []
        for j, spec in enumerate(schema.attributes):
            if spec.is_categorical:
                codes = {v: i for i, v in enumerate(spec.values)}
                self.cols.append(np.array([codes[r.values[j]] for r in dataset.rows], dtype=np.int64))
            else:
                self.cols.append(np.array([r.values[j] for r in dataset.rows], dtype=np.float64))

    def counts(self, idx) -> np.ndarray:
        return np.bincount(self.y[idx], minlength=self.m)


def _entropy_rows(counts: np.ndarray, sizes: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        p = counts / sizes[:, None]
        terms = np.where(counts > 0, p * np.log2(p), 0.0)
    return -terms.sum(axis=1)


def _plogp(sizes: np.ndarray, total: int) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        w = sizes / total
        return np.where(sizes > 0, w * np.log2(w), 0.0)


def _candidates(frame: _Frame, idx: np.ndarray, available: Sequence[int], eps: float):
    """Usable candidates in (schema order, ascending threshold) order.

    Returns ``(attr_index, threshold, gains, ratios)`` arrays.
    """
    n = len(idx)
    y = frame.y[idx]
    parent = frame.counts(idx).astype(np.float64)
    h_parent = _entropy_rows(parent[None, :], np.array([float(n)]))[0]
    m = frame.m

    attrs, thresholds, gains, ratios = [], [], [], []
    for j in available:
        spec = frame.schema.attributes[j]
        x = frame.cols[j][idx]
        if spec.is_categorical:
            v = len(spec.values)
            table = np.bincount(x * m + y, minlength=v * m).reshape(v, m).astype(np.float64)
            sizes = table.sum(axis=1)
            si = -_plogp(sizes, n).sum()
            if si < eps:
                continue
            gain = h_parent - float(np.sum((sizes / n) * _entropy_rows(table, sizes)))
            attrs.append(np.array([j]))
            thresholds.append(np.array([np.nan]))
            gains.append(np.array([gain]))
            ratios.append(np.array([gain / si]))
        else:
            order = np.argsort(x, kind="stable")
            xs = x[order]
            pos = np.nonzero(xs[:-1] < xs[1:])[0]
            if len(pos) == 0:
                continue
            onehot = np.zeros((n, m))
            onehot[np.arange(n), y[order]] = 1.0
            cum = np.cumsum(onehot, axis=0)
            left = cum[pos]
            right = parent[None, :] - left
            nl = (pos + 1).astype(np.float64)
            nr = n - nl
            cond = (nl / n) * _entropy_rows(left, nl) + (nr / n) * _entropy_rows(right, nr)
            gain = h_parent - cond
            si = -(_plogp(nl, n) + _plogp(nr, n))
            ok = si >= eps
            attrs.append(np.full(int(ok.sum()), j))
            thresholds.append(xs[pos][ok])
            gains.append(gain[ok])
            ratios.append(gain[ok] / si[ok])
    if not attrs:
        return None
    return (np.concatenate(attrs), np.concatenate(thresholds),
            np.concatenate(gains), np.concatenate(ratios))


def _select(cands) -> int | None:
    """Index of the chosen candidate: gain >= mean gain, then max gain ratio.

    Ties (within ``TIE_TOLERANCE``) go to the earliest candidate.
    """
    _, _, gains, ratios = cands
    if gains.max() <= TIE_TOLERANCE:
        return None
    keep = gains >= gains.mean() - TIE_TOLERANCE
    best = ratios[keep].max()
    hits = np.nonzero(keep & (ratios >= best - TIE_TOLERANCE))[0]
    return int(hits[0])


def _to_criterion(frame: _Frame, cands, k: int) -> SplitCriterion:
    j = int(cands[0][k])
    spec = frame.schema.attributes[j]
    if spec.is_categorical:
        return SplitCriterion(spec.name)
    return SplitCriterion(spec.name, float(cands[1][k]))


def best_split(dataset: Dataset, available_attributes: Sequence[str] | None = None,
               params: TreeParams = TreeParams()) -> SplitCriterion | None:
    """Best splitting criterion for ``dataset`` or ``None`` if nothing helps."""
    if len(dataset) == 0:
        raise DataError("cannot split an empty dataset")
    dataset.require_labels()
    schema = dataset.schema
    if available_attributes is None:
        available_attributes = schema.names
    available = sorted(schema.index(a) for a in available_attributes)
    frame = _Frame(dataset)
    cands = _candidates(frame, np.arange(len(dataset)), available, params.split_info_epsilon)
    if cands is None:
        return None
    k = _select(cands)
    return None if k is None else _to_criterion(frame, cands, k)


# ---------------------------------------------------------------------------
# Tree construction and prediction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DecisionTree:
    schema: Schema
    params: TreeParams
    root: TreeNode

    def depth(self) -> int:
        best = 0
        stack = [(self.root, 0)]
        while stack:
            node, d = stack.pop()
            best = max(best, d)
            if isinstance(node, Node):
                stack.extend((c, d + 1) for c in node.children.values())
        return best

    def leaf_count(self) -> int:
        return sum(1 for n in self._walk() if isinstance(n, Leaf))

    def node_count(self) -> int:
        return sum(1 for _ in self._walk())

    def _walk(self):
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            if isinstance(node, Node):
                stack.extend(node.children.values())

    def to_dict(self) -> dict:
        return {"kind": "c45", "version": 1, "params": self.params.to_dict(),
                "schema": self.schema.to_dict(), "root": _node_to_dict(self.root)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, doc: dict) -> "DecisionTree":
        if doc.get("kind") != "c45":
            raise ValueError(f"not a C4.5 tree (kind={doc.get('kind')!r})")
        if doc.get("version") != 1:
            raise ValueError(f"unsupported tree version {doc.get('version')!r}")
        p = doc["params"]
        params = TreeParams(p["min_leaf_size"], p["max_depth"], p["split_info_epsilon"])
        return cls(Schema.from_dict(doc["schema"]), params, _node_from_dict(doc["root"]))

    def render(self) -> str:
        """Indented plain-text view, one node per line."""
        lines = []

        def fmt_counts(counts):
            return ", ".join(f"{k}={v}" for k, v in counts.items())

        def walk(node, indent, prefix):
            pad = "  " * indent
            if isinstance(node, Leaf):
                lines.append(f"{pad}{prefix}-> {node.label} [{fmt_counts(node.counts)}]")
                return
            crit = node.criterion
            test = crit.attribute if crit.is_multiway else f"{crit.attribute} <= {crit.threshold!r}"
            lines.append(f"{pad}{prefix}split on {test} (majority {node.majority_label})")
            for key, child in node.children.items():
                if crit.is_multiway:
                    branch = f"{crit.attribute} = {key}: "
                else:
                    branch = f"{crit.attribute} {key} {crit.threshold!r}: "
                walk(child, indent + 1, branch)

        walk(self.root, 0, "")
        return "\n".join(lines) + "\n"


def _node_to_dict(node: TreeNode) -> dict:
    if isinstance(node, Leaf):
        return {"leaf_label": node.label, "counts": dict(node.counts)}
    return {
        "attribute": node.criterion.attribute,
        "threshold": node.criterion.threshold,
        "majority": node.majority_label,
        "counts": dict(node.counts),
        "children": {k: _node_to_dict(c) for k, c in node.children.items()},
    }


def _node_from_dict(doc: dict) -> TreeNode:
    if "leaf_label" in doc:
        return Leaf(doc["leaf_label"], dict(doc["counts"]))
    threshold = doc["threshold"]
    crit = SplitCriterion(doc["attribute"], None if threshold is None else float(threshold))
    children = {k: _node_from_dict(c) for k, c in doc["children"].items()}
    return Node(crit, doc["majority"], dict(doc["counts"]), children)


def _majority(counts: np.ndarray, labels) -> str:
    # np.argmax returns the first maximum, i.e. schema label order on ties
    return labels[int(np.argmax(counts))]


def build(dataset: Dataset, params: TreeParams = TreeParams()) -> DecisionTree:
    """Grow a tree top-down over ``dataset``.

    A node becomes a leaf when its rows share one class, no attributes
    remain, it holds fewer than ``min_leaf_size`` rows, it sits at
    ``max_depth``, or no candidate split has positive gain. Empty branches
    become leaves labeled with the parent's majority class.
    """
    if len(dataset) == 0:
        raise DataError("cannot build a tree from an empty dataset")
    dataset.require_labels()
    schema = dataset.schema
    labels = schema.class_labels
    frame = _Frame(dataset)

    def as_dict(counts):
        return {c: int(v) for c, v in zip(labels, counts)}

    # Iterative growth: each stack entry fills one slot of a parent's children.
    root_slot = {}
    stack = [(np.arange(len(dataset)), tuple(range(len(schema.attributes))), 0, root_slot, "root")]
    while stack:
        idx, available, depth, slot, key = stack.pop()
        counts = frame.counts(idx)
        majority = _majority(counts, labels)
        stop = (
            np.count_nonzero(counts) <= 1
            or not available
            or len(idx) < params.min_leaf_size
            or (params.max_depth is not None and depth >= params.max_depth)
        )
        k = None
        if not stop:
            cands = _candidates(frame, idx, available, params.split_info_epsilon)
            k = None if cands is None else _select(cands)
        if k is None:
            slot[key] = Leaf(majority, as_dict(counts))
            continue

        crit = _to_criterion(frame, cands, k)
        j = schema.index(crit.attribute)
        spec = schema.attributes[j]
        x = frame.cols[j][idx]
        node = Node(crit, majority, as_dict(counts))
        slot[key] = node
        if crit.is_multiway:
            branches = [(v, idx[x == code]) for code, v in enumerate(spec.values)]
            child_available = tuple(a for a in available if a != j)
        else:
            branches = [(LE, idx[x <= crit.threshold]), (GT, idx[x > crit.threshold])]
            child_available = available
        pending = []
        for branch_key, sub in branches:
            node.children[branch_key] = None  # reserve insertion order
            if len(sub) == 0:
                node.children[branch_key] = Leaf(majority, as_dict(np.zeros(len(labels), dtype=int)))
            else:
                pending.append((sub, child_available, depth + 1, node.children, branch_key))
        stack.extend(reversed(pending))
    return DecisionTree(schema, params, root_slot["root"])


def predict_tree(tree: DecisionTree, instance: Instance) -> str:
    schema = tree.schema
    try:
        schema.validate_instance(Instance(instance.values))
    except DataError as exc:
        raise DataError(f"instance does not match tree schema: {exc}") from None
    node = tree.root
    while isinstance(node, Node):
        crit = node.criterion
        x = instance.values[schema.index(crit.attribute)]
        if crit.is_multiway:
            node = node.children[x]
        else:
            node = node.children[LE if x <= crit.threshold else GT]
    return node.label


def load_tree(source) -> DecisionTree:
    raw = source.read()
    if isinstance(raw, bytes):
        raw = raw.decode("utf-8")
    return DecisionTree.from_dict(json.loads(raw))
