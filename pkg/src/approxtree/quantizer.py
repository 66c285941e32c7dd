"""Per-comparator precision scaling and integer threshold substitution.

Each internal node i of a tree gets a gene pair (p_i, d_i): feature and
threshold are compared at p_i bits, and the integer threshold is shifted
by d_i codes (clamped into range) to reach a cheaper hardwired constant.
Inference on the quantized tree is integer-only, matching the emitted
hardware bit for bit.

Rounding rules are fixed so hardware and software agree exactly:
features truncate (floor), thresholds round half up.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .dtree import DecisionTree, to_dict
from .errors import InputError

# Reference precision for pre-quantized feature codes: a code at p bits is
# the REF_BITS code shifted right by REF_BITS - p (exact for the floor rule,
# since scaling by powers of two is exact in binary floating point).
REF_BITS = 16

DEFAULT_P_MIN = 2
DEFAULT_P_MAX = 8
DEFAULT_MARGIN = 5


@dataclass(frozen=True)
class GeneBounds:
    p_min: int = DEFAULT_P_MIN
    p_max: int = DEFAULT_P_MAX
    margin: int = DEFAULT_MARGIN

    def __post_init__(self):
        if not 1 <= self.p_min <= self.p_max <= REF_BITS:
            raise InputError(f"invalid precision bounds [{self.p_min}, {self.p_max}]")
        if self.margin < 0:
            raise InputError(f"margin must be >= 0, got {self.margin}")


@dataclass(frozen=True)
class Chromosome:
    """2N genes for an N-comparator tree, ordered by internal-node id.

    precisions[i] is the bit width of comparator i, deltas[i] the signed
    integer offset applied to its quantized threshold.
    """

    precisions: tuple[int, ...]
    deltas: tuple[int, ...]

    def __post_init__(self):
        if len(self.precisions) != len(self.deltas):
            raise InputError("precision and delta gene counts differ")

    def __len__(self) -> int:
        return len(self.precisions)

    def check_bounds(self, bounds: GeneBounds) -> None:
        for p in self.precisions:
            if not bounds.p_min <= p <= bounds.p_max:
                raise InputError(f"precision gene {p} outside [{bounds.p_min}, {bounds.p_max}]")
        for d in self.deltas:
            if abs(d) > bounds.margin:
                raise InputError(f"offset gene {d} outside +/-{bounds.margin}")


def baseline_chromosome(n: int, bounds: GeneBounds = GeneBounds()) -> Chromosome:
    """The exact design: full precision everywhere, no substitution."""
    return Chromosome(precisions=(bounds.p_max,) * n, deltas=(0,) * n)


@dataclass(frozen=True)
class QuantizedTree:
    """A DecisionTree with per-node precision and hardwired integer threshold.

    precisions/int_thresholds are indexed by node id; leaf slots hold 0.
    The effective fixed-point threshold of node i is int_thresholds[i] / 2^p_i.
    """

    tree: DecisionTree
    precisions: tuple[int, ...]
    int_thresholds: tuple[int, ...]

    def fp_threshold(self, node_id: int) -> float:
        return self.int_thresholds[node_id] / (1 << self.precisions[node_id])


def quantize_threshold(t: float, p: int) -> int:
    """Round-half-up t*2^p, clamped to the representable range [0, 2^p - 1]."""
    if not 0.0 <= t <= 1.0:
        raise InputError(f"threshold {t} outside [0, 1]")
    if p < 1:
        raise InputError(f"precision must be >= 1, got {p}")
    code = int(np.floor(t * (1 << p) + 0.5))
    return min(max(code, 0), (1 << p) - 1)


def quantize_feature(v: float, p: int) -> int:
    """Truncate v*2^p to an integer code, saturating at full scale."""
    return min(int(np.floor(v * (1 << p))), (1 << p) - 1)


def apply_chromosome(
    tree: DecisionTree, chrom: Chromosome, bounds: GeneBounds = GeneBounds()
) -> QuantizedTree:
    """Materialize the approximate tree a chromosome describes.

    Per comparator: quantize the float threshold at the gene's precision,
    add the gene's offset, clamp into range. Topology, feature indices and
    leaf labels are untouched.
    """
    split_ids = tree.split_ids
    if len(chrom) != len(split_ids):
        raise InputError(
            f"chromosome has {len(chrom)} genes, tree has {len(split_ids)} comparators"
        )
    chrom.check_bounds(bounds)

    precisions = [0] * len(tree.nodes)
    thresholds = [0] * len(tree.nodes)
    for gene, node_id in enumerate(split_ids):
        p = chrom.precisions[gene]
        d = chrom.deltas[gene]
        base = quantize_threshold(tree.nodes[node_id].threshold, p)
        precisions[node_id] = p
        thresholds[node_id] = min(max(base + d, 0), (1 << p) - 1)
    return QuantizedTree(
        tree=tree, precisions=tuple(precisions), int_thresholds=tuple(thresholds)
    )


def predict_quantized(qtree: QuantizedTree, sample) -> int:
    """Integer-comparison traversal: LEFT iff quantized feature <= threshold."""
    sample = np.asarray(sample, dtype=np.float64)
    tree = qtree.tree
    i = tree.root
    while True:
        n = tree.nodes[i]
        if n.kind == "leaf":
            return n.label
        if n.feature >= sample.shape[0]:
            raise InputError(
                f"sample has {sample.shape[0]} features, node reads index {n.feature}"
            )
        v = quantize_feature(sample[n.feature], qtree.precisions[i])
        i = n.left if v <= qtree.int_thresholds[i] else n.right


def quantized_accuracy(qtree: QuantizedTree, data) -> float:
    if data.n_rows == 0:
        raise InputError("cannot score an empty dataset")
    from . import _kernels

    labels = _kernels.predict_dataset(qtree, data.features)
    return float(np.mean(labels == data.labels))


def to_extended_dict(qtree: QuantizedTree) -> dict:
    """Tree JSON with per-split "precision"/"int_threshold"; "threshold" holds
    the effective fixed-point value."""
    doc = to_dict(qtree.tree)
    for node in doc["nodes"]:
        if node["kind"] == "split":
            i = node["id"]
            node["precision"] = qtree.precisions[i]
            node["int_threshold"] = qtree.int_thresholds[i]
            node["threshold"] = qtree.fp_threshold(i)
    return doc


def export_extended_json(qtree: QuantizedTree, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(to_extended_dict(qtree), fh, indent=2)
        fh.write("\n")
