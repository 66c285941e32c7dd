"""CART decision trees over normalized features, with exact float inference.

Trees are grown greedily on Gini impurity until leaves are pure (default
config), which is the exact full-precision baseline the optimizer later
approximates. Routing convention: LEFT iff value <= threshold.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np

from .dataset import Dataset
from .errors import InputError


@dataclass(frozen=True)
class Node:
    """One tree node. kind is "split" or "leaf".

    Split nodes use feature/threshold/left/right; leaves use label.
    """

    kind: str
    feature: int = -1
    threshold: float = 0.0
    left: int = -1
    right: int = -1
    label: int = -1


@dataclass(frozen=True)
class DecisionTree:
    nodes: tuple[Node, ...]
    root: int
    class_count: int

    @property
    def comparator_count(self) -> int:
        return sum(1 for n in self.nodes if n.kind == "split")

    @property
    def split_ids(self) -> list[int]:
        """Internal-node ids in ascending order; the chromosome gene order."""
        return [i for i, n in enumerate(self.nodes) if n.kind == "split"]

    def depth(self) -> int:
        def go(i):
            n = self.nodes[i]
            if n.kind == "leaf":
                return 0
            return 1 + max(go(n.left), go(n.right))

        return go(self.root)


@dataclass(frozen=True)
class TreeConfig:
    max_depth: int | None = None
    min_samples_split: int = 2
    seed: int = 0


def _gini(counts: np.ndarray, total: int) -> float:
    if total == 0:
        return 0.0
    p = counts / total
    return 1.0 - float(np.sum(p * p))


def _best_split(X: np.ndarray, y: np.ndarray, n_classes: int):
    """Best (feature, threshold) by Gini gain via a sorted sweep.

    Candidates are midpoints between consecutive distinct sorted values.
    Ties are broken toward lower feature index, then lower threshold, by
    scanning features ascending / thresholds ascending with strict '>'.
    """
    n = len(y)
    parent_counts = np.bincount(y, minlength=n_classes)
    parent_gini = _gini(parent_counts, n)

    # zero-gain splits are admissible: an impure node keeps growing as long
    # as any candidate separates samples (XOR-style data needs this to
    # reach pure leaves)
    best_gain = -1.0
    best = None
    for f in range(X.shape[1]):
        order = np.argsort(X[:, f], kind="stable")
        xs = X[order, f]
        ys = y[order]
        left_counts = np.zeros(n_classes, dtype=np.int64)
        for i in range(n - 1):
            left_counts[ys[i]] += 1
            if xs[i] == xs[i + 1]:
                continue
            n_left = i + 1
            n_right = n - n_left
            g_left = _gini(left_counts, n_left)
            g_right = _gini(parent_counts - left_counts, n_right)
            gain = parent_gini - (n_left * g_left + n_right * g_right) / n
            if gain > best_gain:
                best_gain = gain
                best = (f, (xs[i] + xs[i + 1]) / 2.0)
    return best


def train_cart(train: Dataset, config: TreeConfig = TreeConfig()) -> DecisionTree:
    """Grow a CART tree; with defaults it expands until leaves are pure.

    An impure node becomes a leaf only when no candidate split separates
    its samples, i.e. duplicate feature rows carry conflicting labels;
    such leaves take the majority class (ties to the lowest class id).
    """
    if train.n_rows == 0:
        raise InputError("cannot train on an empty dataset")
    X = train.features
    y = train.labels.astype(np.int64)
    n_classes = train.n_classes
    nodes: list[Node] = []

    def majority(labels):
        counts = np.bincount(labels, minlength=n_classes)
        return int(np.argmax(counts))

    def grow(idx: np.ndarray, depth: int) -> int:
        labels = y[idx]
        pure = labels.min() == labels.max()
        stop = (
            pure
            or len(idx) < config.min_samples_split
            or (config.max_depth is not None and depth >= config.max_depth)
        )
        choice = None if stop else _best_split(X[idx], labels, n_classes)
        if choice is None:
            nodes.append(Node(kind="leaf", label=majority(labels)))
            return len(nodes) - 1
        f, t = choice
        mask = X[idx, f] <= t
        left = grow(idx[mask], depth + 1)
        right = grow(idx[~mask], depth + 1)
        nodes.append(Node(kind="split", feature=f, threshold=t, left=left, right=right))
        return len(nodes) - 1

    root = grow(np.arange(train.n_rows), 0)
    tree = DecisionTree(nodes=tuple(nodes), root=root, class_count=n_classes)
    return _renumber_preorder(tree)


def _renumber_preorder(tree: DecisionTree) -> DecisionTree:
    """Renumber nodes in root-first preorder for stable, readable ids."""
    mapping: dict[int, int] = {}
    order: list[int] = []

    def visit(i):
        mapping[i] = len(order)
        order.append(i)
        n = tree.nodes[i]
        if n.kind == "split":
            visit(n.left)
            visit(n.right)

    visit(tree.root)
    new_nodes = []
    for old in order:
        n = tree.nodes[old]
        if n.kind == "split":
            n = replace(n, left=mapping[n.left], right=mapping[n.right])
        new_nodes.append(n)
    return DecisionTree(nodes=tuple(new_nodes), root=0, class_count=tree.class_count)


def predict(tree: DecisionTree, sample) -> int:
    sample = np.asarray(sample, dtype=np.float64)
    i = tree.root
    while True:
        n = tree.nodes[i]
        if n.kind == "leaf":
            return n.label
        if n.feature >= sample.shape[0]:
            raise InputError(
                f"sample has {sample.shape[0]} features, node reads index {n.feature}"
            )
        i = n.left if sample[n.feature] <= n.threshold else n.right


def accuracy(tree: DecisionTree, data: Dataset) -> float:
    if data.n_rows == 0:
        raise InputError("cannot score an empty dataset")
    hits = sum(predict(tree, row) == lab for row, lab in zip(data.features, data.labels))
    return hits / data.n_rows


def validate(tree: DecisionTree) -> None:
    """Check structural invariants: arity, reachability, acyclicity, bounds."""
    n = len(tree.nodes)
    if not 0 <= tree.root < n:
        raise InputError(f"root id {tree.root} out of range")
    seen: set[int] = set()

    def visit(i, path):
        if i in path:
            raise InputError(f"cycle through node {i}")
        if not 0 <= i < n:
            raise InputError(f"dangling child id {i}")
        if i in seen:
            raise InputError(f"node {i} reachable via multiple paths")
        seen.add(i)
        node = tree.nodes[i]
        if node.kind == "split":
            if not 0.0 <= node.threshold <= 1.0:
                raise InputError(f"node {i} threshold {node.threshold} outside [0, 1]")
            if node.left == node.right:
                raise InputError(f"node {i} children are not distinct")
            visit(node.left, path | {i})
            visit(node.right, path | {i})
        elif node.kind == "leaf":
            if not 0 <= node.label < tree.class_count:
                raise InputError(f"leaf {i} label {node.label} out of range")
        else:
            raise InputError(f"node {i} has unknown kind {node.kind!r}")

    visit(tree.root, frozenset())
    if len(seen) != n:
        raise InputError(f"{n - len(seen)} nodes unreachable from root")


def to_dict(tree: DecisionTree) -> dict:
    nodes = []
    for i, n in enumerate(tree.nodes):
        if n.kind == "split":
            nodes.append(
                {
                    "id": i,
                    "kind": "split",
                    "feature": n.feature,
                    "threshold": n.threshold,
                    "left": n.left,
                    "right": n.right,
                }
            )
        else:
            nodes.append({"id": i, "kind": "leaf", "class": n.label})
    return {"class_count": tree.class_count, "root": tree.root, "nodes": nodes}


def from_dict(doc: dict) -> DecisionTree:
    try:
        raw = {int(n["id"]): n for n in doc["nodes"]}
        count = len(doc["nodes"])
        if set(raw) != set(range(count)):
            raise InputError("node ids must be exactly 0..count-1")
        nodes = []
        for i in range(count):
            n = raw[i]
            if n["kind"] == "split":
                nodes.append(
                    Node(
                        kind="split",
                        feature=int(n["feature"]),
                        threshold=float(n["threshold"]),
                        left=int(n["left"]),
                        right=int(n["right"]),
                    )
                )
            elif n["kind"] == "leaf":
                nodes.append(Node(kind="leaf", label=int(n["class"])))
            else:
                raise InputError(f"unknown node kind {n['kind']!r}")
        tree = DecisionTree(
            nodes=tuple(nodes), root=int(doc["root"]), class_count=int(doc["class_count"])
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed tree document: {exc}") from exc
    validate(tree)
    return tree


def export_json(tree: DecisionTree, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(to_dict(tree), fh, indent=2)
        fh.write("\n")


def import_json(path) -> DecisionTree:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise InputError(f"tree file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON in {path}: {exc}") from exc
    return from_dict(doc)
