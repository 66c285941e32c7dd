"""Benchmark the compiled inference kernel against the numpy fallback.

Builds a ~178-comparator tree on synthetic data, then times one fitness
evaluation's worth of inference (300-row test split) per backend.

Run: python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from approxtree import _kernels, dataset, dtree, quantizer
from approxtree._kernels import _pyfallback

try:
    from approxtree._kernels import _evalcore
except ImportError:
    _evalcore = None


def build_case(n_comparators=178, n_test=300, n_features=16, seed=9):
    rng = np.random.Generator(np.random.Philox(key=seed))
    # labels noisy enough that the pure-leaf tree keeps growing
    n_train = 2500
    X = rng.random((n_train, n_features))
    y = ((X[:, 0] + X[:, 1] * 0.5 + rng.normal(0, 0.3, n_train)) > 0.75).astype(int)
    ds = dataset.Dataset(features=X, labels=y.astype(np.int64), class_names=("0", "1"))
    depth = 1
    tree = None
    while True:
        tree = dtree.train_cart(ds, dtree.TreeConfig(max_depth=depth))
        if tree.comparator_count >= n_comparators or depth > 40:
            break
        depth += 1
    chrom = quantizer.baseline_chromosome(tree.comparator_count)
    qt = quantizer.apply_chromosome(tree, chrom)
    test = rng.random((n_test, n_features))
    return qt, test


def bench(fn, *args, repeats=200):
    fn(*args)  # warm up
    start = time.perf_counter()
    for _ in range(repeats):
        fn(*args)
    return (time.perf_counter() - start) / repeats


def main():
    qt, test = build_case()
    print(f"tree: {qt.tree.comparator_count} comparators, depth {qt.tree.depth()}, "
          f"test rows: {len(test)}")
    codes = _kernels.encode_features(test)
    arrays = _kernels.tree_arrays(qt)

    t_fallback = bench(_pyfallback.predict_batch, codes, *arrays)
    print(f"numpy fallback : {t_fallback * 1e3:8.3f} ms / evaluation")
    if _evalcore is None:
        print("compiled kernel: not built")
        return
    t_compiled = bench(_evalcore.predict_batch, codes, *arrays)
    print(f"compiled kernel: {t_compiled * 1e3:8.3f} ms / evaluation")
    print(f"speedup        : {t_fallback / t_compiled:8.1f}x")

    same = np.array_equal(
        _pyfallback.predict_batch(codes, *arrays), _evalcore.predict_batch(codes, *arrays)
    )
    print(f"outputs equal  : {same}")


if __name__ == "__main__":
    main()
