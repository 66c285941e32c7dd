"""Tabular dataset loading, min-max normalization and seeded splitting.

Features are normalized per column to [0, 1] because the quantizer assumes
a unit domain. Test data must be normalized with statistics captured from
the training split (values are clamped into range).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .rng import STREAM_SPLIT, make_rng


@dataclass(frozen=True)
class Dataset:
    """Feature matrix plus dense integer class labels.

    norm_stats is a (2, d) array of per-feature (min, max) rows, present
    once the dataset has been normalized.
    """

    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple[str, ...] | None = None
    class_names: tuple[str, ...] | None = None
    norm_stats: np.ndarray | None = None

    def __post_init__(self):
        if self.features.ndim != 2:
            raise InputError("features must be a 2-D matrix")
        if len(self.features) != len(self.labels):
            raise InputError("features and labels disagree on row count")
        if len(self.features) < 1:
            raise InputError("dataset is empty")

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def n_classes(self) -> int:
        # class_names preserves C across splits that miss a class
        if self.class_names is not None:
            return len(self.class_names)
        return int(self.labels.max()) + 1


@dataclass(frozen=True)
class SplitPair:
    train: Dataset
    test: Dataset
    seed: int
    test_fraction: float
    train_indices: np.ndarray = field(repr=False, default=None)
    test_indices: np.ndarray = field(repr=False, default=None)


def _try_float(cell: str) -> float | None:
    try:
        return float(cell)
    except ValueError:
        return None


def load_csv(path, label_column) -> Dataset:
    """Load a CSV classification table.

    label_column is a 0-based column index or, when the file has a header
    row, a column name. A header is assumed present iff any non-label cell
    of the first row fails to parse as a number. Class labels are mapped to
    0..C-1 in order of first appearance.
    """
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = [row for row in csv.reader(fh) if row]
    except FileNotFoundError:
        raise InputError(f"dataset file not found: {path}") from None
    if not rows:
        raise InputError(f"dataset file is empty: {path}")

    width = len(rows[0])
    for i, row in enumerate(rows):
        if len(row) != width:
            raise InputError(f"ragged row {i}: expected {width} cells, got {len(row)}")

    by_name = isinstance(label_column, str)
    if by_name:
        header = [c.strip() for c in rows[0]]
        if label_column not in header:
            raise InputError(f"label column {label_column!r} not in header {header}")
        label_idx = header.index(label_column)
        body = rows[1:]
        feature_names = tuple(n for i, n in enumerate(header) if i != label_idx)
    else:
        label_idx = int(label_column)
        if not 0 <= label_idx < width:
            raise InputError(f"label column index {label_idx} out of range for {width} columns")
        first_features = [c for i, c in enumerate(rows[0]) if i != label_idx]
        has_header = any(_try_float(c.strip()) is None for c in first_features)
        body = rows[1:] if has_header else rows
        feature_names = (
            tuple(c.strip() for i, c in enumerate(rows[0]) if i != label_idx)
            if has_header
            else None
        )

    if not body:
        raise InputError(f"dataset has no data rows: {path}")

    features = np.empty((len(body), width - 1), dtype=np.float64)
    class_ids: dict[str, int] = {}
    labels = np.empty(len(body), dtype=np.int64)
    for r, row in enumerate(body):
        c_out = 0
        for c, cell in enumerate(row):
            cell = cell.strip()
            if c == label_idx:
                if cell not in class_ids:
                    class_ids[cell] = len(class_ids)
                labels[r] = class_ids[cell]
                continue
            value = _try_float(cell)
            if value is None or not np.isfinite(value):
                raise InputError(f"non-numeric cell at row {r}, column {c}: {cell!r}")
            features[r, c_out] = value
            c_out += 1

    if len(class_ids) < 2:
        raise InputError(f"fewer than 2 classes in label column ({len(class_ids)} found)")

    return Dataset(
        features=features,
        labels=labels,
        feature_names=feature_names,
        class_names=tuple(class_ids),
    )


def normalize(data: Dataset, stats: np.ndarray | None = None) -> Dataset:
    """Min-max scale every feature into [0, 1].

    With stats=None the per-column min/max of `data` itself is used and
    stored on the result. Foreign stats (train statistics applied to test
    data) may push values out of range; those are clamped. A degenerate
    column (min == max) maps to constant 0.
    """
    if stats is None:
        lo = data.features.min(axis=0)
        hi = data.features.max(axis=0)
        stats = np.stack([lo, hi])
    else:
        stats = np.asarray(stats, dtype=np.float64)
        lo, hi = stats[0], stats[1]

    span = hi - lo
    safe = np.where(span > 0, span, 1.0)
    scaled = (data.features - lo) / safe
    scaled = np.where(span > 0, scaled, 0.0)
    scaled = np.clip(scaled, 0.0, 1.0)

    return Dataset(
        features=scaled,
        labels=data.labels,
        feature_names=data.feature_names,
        class_names=data.class_names,
        norm_stats=stats,
    )


def split(data: Dataset, test_fraction: float, seed: int) -> SplitPair:
    """Deterministic seeded train/test split.

    |test| = round-half-up(test_fraction * rows), clamped so both sides
    stay non-empty. Same seed gives the same partition on any platform.
    """
    if not 0.0 < test_fraction < 1.0:
        raise InputError(f"test_fraction must be in (0, 1), got {test_fraction}")
    n = data.n_rows
    if n < 2:
        raise InputError("need at least 2 rows to split")

    n_test = int(np.floor(test_fraction * n + 0.5))
    n_test = min(max(n_test, 1), n - 1)

    perm = make_rng(seed, STREAM_SPLIT).permutation(n)
    test_idx = np.sort(perm[:n_test])
    train_idx = np.sort(perm[n_test:])

    def take(idx):
        return Dataset(
            features=data.features[idx],
            labels=data.labels[idx],
            feature_names=data.feature_names,
            class_names=data.class_names,
            norm_stats=data.norm_stats,
        )

    return SplitPair(
        train=take(train_idx),
        test=take(test_idx),
        seed=seed,
        test_fraction=test_fraction,
        train_indices=train_idx,
        test_indices=test_idx,
    )
