import numpy as np
import pytest

from approxtree.area import GateWeights, analytical_area
from approxtree.dataset import Dataset
from approxtree.dtree import train_cart
from approxtree.errors import InputError
from approxtree.evaluator import EvalContext
from approxtree.quantizer import Chromosome, apply_chromosome, baseline_chromosome, quantized_accuracy
from approxtree.area import tree_area
from conftest import make_blobs


@pytest.fixture
def setup(rng):
    ds = make_blobs(rng, rows=150, n_features=3, n_classes=2)
    half = ds.n_rows // 2
    train = Dataset(
        features=ds.features[:half], labels=ds.labels[:half], class_names=ds.class_names
    )
    test = Dataset(
        features=ds.features[half:], labels=ds.labels[half:], class_names=ds.class_names
    )
    tree = train_cart(train)
    assert tree.comparator_count >= 1
    return tree, test


class TestEvaluate:
    def test_matches_module_composition(self, setup, rng):
        tree, test = setup
        ctx = EvalContext(tree, test, GateWeights())
        n = tree.comparator_count
        for _ in range(10):
            chrom = Chromosome(
                precisions=tuple(int(x) for x in rng.integers(2, 9, n)),
                deltas=tuple(int(x) for x in rng.integers(-5, 6, n)),
            )
            obj = ctx.evaluate(chrom)
            qt = apply_chromosome(tree, chrom)
            assert obj.error == pytest.approx(1.0 - quantized_accuracy(qt, test))
            assert obj.area == pytest.approx(tree_area(qt, GateWeights()))

    def test_baseline_area_is_full_precision_sum(self, setup):
        tree, test = setup
        ctx = EvalContext(tree, test, GateWeights())
        _, obj = ctx.baseline()
        qt = apply_chromosome(tree, baseline_chromosome(tree.comparator_count))
        expected = sum(
            analytical_area(8, qt.int_thresholds[i], GateWeights())
            for i in tree.split_ids
        )
        assert obj.area == expected

    def test_error_accuracy_complement_exact(self, setup):
        tree, test = setup
        ctx = EvalContext(tree, test, GateWeights())
        chrom = baseline_chromosome(tree.comparator_count)
        obj = ctx.evaluate(chrom)
        qt = apply_chromosome(tree, chrom)
        assert obj.error + quantized_accuracy(qt, test) == 1.0

    def test_deterministic_and_cached(self, setup):
        tree, test = setup
        ctx = EvalContext(tree, test, GateWeights())
        chrom = baseline_chromosome(tree.comparator_count)
        a = ctx.evaluate(chrom)
        b = ctx.evaluate(Chromosome(chrom.precisions, chrom.deltas))
        assert a is b  # cache hit on an equal chromosome

    def test_cache_disabled_still_equal(self, setup):
        tree, test = setup
        ctx = EvalContext(tree, test, GateWeights(), cache=False)
        chrom = baseline_chromosome(tree.comparator_count)
        assert ctx.evaluate(chrom) == ctx.evaluate(chrom)

    def test_wrong_length_rejected(self, setup):
        tree, test = setup
        ctx = EvalContext(tree, test, GateWeights())
        with pytest.raises(InputError):
            ctx.evaluate(Chromosome((8,), (0,)))

    def test_degenerate_tree_rejected(self, rng):
        ds = Dataset(
            features=rng.random((10, 2)),
            labels=np.zeros(10, dtype=np.int64),
            class_names=("a", "b"),
        )
        tree = train_cart(ds)
        with pytest.raises(InputError, match="no comparators"):
            EvalContext(tree, ds, GateWeights())

    def test_saturating_deltas_cut_area(self, single_split_tree, rng):
        test = Dataset(
            features=rng.random((20, 1)),
            labels=rng.integers(0, 2, 20).astype(np.int64),
            class_names=("0", "1"),
        )
        ctx = EvalContext(single_split_tree, test, GateWeights())
        base = ctx.evaluate(baseline_chromosome(1))
        saturated = ctx.evaluate(Chromosome((2,), (5,)))  # threshold pinned at max
        assert saturated.area == 0.0
        assert saturated.area < base.area
