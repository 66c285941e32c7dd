"""Fitness evaluation: chromosome -> (classification error, circuit area).

The context pre-encodes the test split to integer feature codes and
pre-tabulates comparator areas per (precision, threshold), so evaluating a
chromosome is one compiled inference pass plus an array gather.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .area import AreaLut, comparator_area
from .dataset import Dataset
from .dtree import DecisionTree
from .errors import InputError
from .quantizer import REF_BITS, Chromosome, GeneBounds, baseline_chromosome, quantize_threshold


@dataclass(frozen=True)
class Objectives:
    """Both minimized. error = 1 - test accuracy; area in model units."""

    error: float
    area: float


class EvalContext:
    """Immutable evaluation state for one (tree, test split, area model)."""

    def __init__(
        self,
        tree: DecisionTree,
        test: Dataset,
        model,
        bounds: GeneBounds = GeneBounds(),
        cache: bool = True,
    ):
        if tree.comparator_count < 1:
            raise InputError("tree has no comparators; nothing to optimize")
        if test.n_rows == 0:
            raise InputError("empty test split")
        self.tree = tree
        self.test = test
        self.model = model
        self.bounds = bounds
        self.n_genes = tree.comparator_count

        self.split_ids = np.asarray(tree.split_ids, dtype=np.int32)
        self.codes = _kernels.encode_features(test.features)
        self.test_labels = test.labels.astype(np.int32)

        # static topology arrays; per-chromosome only shift/thr change
        n = len(tree.nodes)
        self._feature = np.zeros(n, dtype=np.int32)
        self._left = np.full(n, -1, dtype=np.int32)
        self._right = np.full(n, -1, dtype=np.int32)
        self._label = np.zeros(n, dtype=np.int32)
        for i, node in enumerate(tree.nodes):
            if node.kind == "split":
                self._feature[i] = node.feature
                self._left[i] = node.left
                self._right[i] = node.right
            else:
                self._label[i] = node.label

        # per-gene base integer threshold at every admissible precision
        p_range = range(bounds.p_min, bounds.p_max + 1)
        self._base_thr = {
            p: np.array(
                [quantize_threshold(tree.nodes[i].threshold, p) for i in tree.split_ids],
                dtype=np.int64,
            )
            for p in p_range
        }
        # comparator area per (precision, threshold)
        self._area_table = {
            p: np.array(
                [comparator_area(model, p, t) for t in range(1 << p)], dtype=np.float64
            )
            for p in p_range
        }
        if isinstance(model, AreaLut):
            missing = [p for p in p_range if p not in model.precisions]
            if missing:
                raise InputError(f"area LUT does not cover precisions {missing}")

        self._cache: dict[Chromosome, Objectives] | None = {} if cache else None

    def materialize(self, chrom: Chromosome) -> tuple[np.ndarray, np.ndarray]:
        """Per-gene (precision, clamped integer threshold) arrays."""
        if len(chrom) != self.n_genes:
            raise InputError(
                f"chromosome has {len(chrom)} genes, tree has {self.n_genes} comparators"
            )
        chrom.check_bounds(self.bounds)
        prec = np.asarray(chrom.precisions, dtype=np.int64)
        delta = np.asarray(chrom.deltas, dtype=np.int64)
        thr = np.empty(self.n_genes, dtype=np.int64)
        for p in np.unique(prec):
            mask = prec == p
            raw = self._base_thr[int(p)][mask] + delta[mask]
            thr[mask] = np.clip(raw, 0, (1 << int(p)) - 1)
        return prec, thr

    def evaluate(self, chrom: Chromosome) -> Objectives:
        if self._cache is not None:
            hit = self._cache.get(chrom)
            if hit is not None:
                return hit

        prec, thr = self.materialize(chrom)

        shift = np.zeros(len(self.tree.nodes), dtype=np.int32)
        thr_nodes = np.zeros(len(self.tree.nodes), dtype=np.uint32)
        shift[self.split_ids] = (REF_BITS - prec).astype(np.int32)
        thr_nodes[self.split_ids] = thr.astype(np.uint32)

        predicted = _kernels.predict_batch(
            self.codes,
            self._feature,
            shift,
            thr_nodes,
            self._left,
            self._right,
            self._label,
            self.tree.root,
        )
        error = 1.0 - float(np.mean(predicted == self.test_labels))
        area = float(sum(self._area_table[int(p)][int(t)] for p, t in zip(prec, thr)))
        obj = Objectives(error=error, area=area)
        if self._cache is not None:
            self._cache[chrom] = obj
        return obj

    def baseline(self) -> tuple[Chromosome, Objectives]:
        chrom = baseline_chromosome(self.n_genes, self.bounds)
        return chrom, self.evaluate(chrom)


def evaluate(chrom: Chromosome, ctx: EvalContext) -> Objectives:
    return ctx.evaluate(chrom)
