from pathlib import Path

import numpy as np
import pytest

from approxtree.dataset import Dataset
from approxtree.dtree import DecisionTree, Node
from approxtree.quantizer import Chromosome, QuantizedTree, apply_chromosome

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


def make_random_tree(rng, max_splits=6, n_features=3, n_classes=3) -> DecisionTree:
    """Random proper binary tree with 1..max_splits internal nodes."""
    n_splits = int(rng.integers(1, max_splits + 1))
    nodes = []

    def grow(remaining):
        # remaining[0]: splits still to place somewhere in the tree
        if remaining[0] > 0 and (len(nodes) == 0 or rng.random() < 0.6):
            remaining[0] -= 1
            idx = len(nodes)
            nodes.append(None)  # placeholder, children ids unknown yet
            feature = int(rng.integers(n_features))
            threshold = float(rng.random())
            left = grow(remaining)
            right = grow(remaining)
            nodes[idx] = Node(
                kind="split", feature=feature, threshold=threshold, left=left, right=right
            )
            return idx
        idx = len(nodes)
        nodes.append(Node(kind="leaf", label=int(rng.integers(n_classes))))
        return idx

    grow([n_splits])
    return DecisionTree(nodes=tuple(nodes), root=0, class_count=n_classes)


def make_random_qtree(rng, max_splits=6, p_max=4, n_features=3, p_min=1) -> QuantizedTree:
    tree = make_random_tree(rng, max_splits=max_splits, n_features=n_features)
    n = tree.comparator_count
    prec = tuple(int(rng.integers(p_min, p_max + 1)) for _ in range(n))
    thr = []
    precisions = [0] * len(tree.nodes)
    thresholds = [0] * len(tree.nodes)
    for gene, i in enumerate(tree.split_ids):
        precisions[i] = prec[gene]
        thresholds[i] = int(rng.integers(0, 1 << prec[gene]))
    return QuantizedTree(
        tree=tree, precisions=tuple(precisions), int_thresholds=tuple(thresholds)
    )


def make_blobs(rng, rows=200, n_features=4, n_classes=3, spread=0.09) -> Dataset:
    centers = rng.random((n_classes, n_features)) * 0.6 + 0.2
    per = rows // n_classes
    X, y = [], []
    for k in range(n_classes):
        X.append(np.clip(rng.normal(centers[k], spread, (per, n_features)), 0, 1))
        y += [k] * per
    features = np.vstack(X)
    labels = np.array(y, dtype=np.int64)
    order = rng.permutation(len(labels))
    return Dataset(
        features=features[order],
        labels=labels[order],
        class_names=tuple(str(k) for k in range(n_classes)),
    )


@pytest.fixture
def rng():
    return np.random.Generator(np.random.Philox(key=1234))


@pytest.fixture
def xor_dataset():
    X = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
    y = np.array([0, 1, 1, 0], dtype=np.int64)
    return Dataset(features=X, labels=y, class_names=("0", "1"))


@pytest.fixture
def single_split_tree():
    nodes = (
        Node(kind="split", feature=0, threshold=0.5, left=1, right=2),
        Node(kind="leaf", label=0),
        Node(kind="leaf", label=1),
    )
    return DecisionTree(nodes=nodes, root=0, class_count=2)


def all_quantized_inputs(qtree: QuantizedTree, n_features: int):
    """Every distinct quantized input combination, as float samples.

    Per feature, the distinguishable codes are those at the max precision
    any comparator applies to it; features nobody reads contribute one
    sample value.
    """
    from itertools import product

    bus = {}
    for i in qtree.tree.split_ids:
        f = qtree.tree.nodes[i].feature
        bus[f] = max(bus.get(f, 0), qtree.precisions[i])
    axes = []
    for f in range(n_features):
        if f in bus:
            step = 1.0 / (1 << bus[f])
            axes.append([c * step + step / 2 for c in range(1 << bus[f])])
        else:
            axes.append([0.5])
    for combo in product(*axes):
        yield np.array(combo)
