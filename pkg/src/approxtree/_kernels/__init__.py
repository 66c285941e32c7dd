"""Batch quantized-inference kernel with compiled and pure-numpy backends.

Fitness evaluation spends almost all of its time classifying the test
split, so that loop is compiled (Cython). The numpy fallback is selected
automatically when the extension is unavailable, or forced with
APPROXTREE_PURE=1. Both backends are integer-exact and interchangeable.

Node encoding shared by both backends: parallel arrays indexed by node id;
left < 0 marks a leaf, whose class sits in `label`. A comparator at p bits
reads the REF_BITS feature code shifted right by REF_BITS - p.
"""

import os

import numpy as np

from ..quantizer import REF_BITS, QuantizedTree

if os.environ.get("APPROXTREE_PURE"):
    from ._pyfallback import predict_batch

    HAVE_COMPILED = False
else:
    try:
        from ._evalcore import predict_batch

        HAVE_COMPILED = True
    except ImportError:
        from ._pyfallback import predict_batch

        HAVE_COMPILED = False

BACKEND = "compiled" if HAVE_COMPILED else "fallback"


def encode_features(X: np.ndarray) -> np.ndarray:
    """Quantize a [0,1] feature matrix to REF_BITS-bit integer codes."""
    full = 1 << REF_BITS
    codes = np.floor(np.asarray(X, dtype=np.float64) * full)
    return np.minimum(codes, full - 1).astype(np.uint32)


def tree_arrays(qtree: QuantizedTree):
    """Flatten a QuantizedTree into the kernel's parallel-array form."""
    tree = qtree.tree
    n = len(tree.nodes)
    feature = np.zeros(n, dtype=np.int32)
    shift = np.zeros(n, dtype=np.int32)
    thr = np.zeros(n, dtype=np.uint32)
    left = np.full(n, -1, dtype=np.int32)
    right = np.full(n, -1, dtype=np.int32)
    label = np.zeros(n, dtype=np.int32)
    for i, node in enumerate(tree.nodes):
        if node.kind == "split":
            feature[i] = node.feature
            shift[i] = REF_BITS - qtree.precisions[i]
            thr[i] = qtree.int_thresholds[i]
            left[i] = node.left
            right[i] = node.right
        else:
            label[i] = node.label
    return feature, shift, thr, left, right, label, tree.root


def predict_dataset(qtree: QuantizedTree, X: np.ndarray) -> np.ndarray:
    """Classify every row of X with the quantized tree."""
    codes = encode_features(X)
    arrays = tree_arrays(qtree)
    return predict_batch(codes, *arrays)
