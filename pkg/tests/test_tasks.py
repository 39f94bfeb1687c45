import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from polyselect.core import Encoding, task_seed, task_to_json
from polyselect.tasks import (
    BooleanTaskSpec,
    MonotheticRule,
    PolytheticRule,
    SphereTaskSpec,
    TupleTaskSpec,
    gen_boolean_task,
    gen_sphere_task,
    gen_tuple_task,
    parity,
    parity_label,
)


class TestParity:
    def test_product_over_active(self):
        assert parity([1.0, -1.0, 1.0], (0, 1, 2)) == -1

    def test_single_index(self):
        assert parity([1.0, -1.0], (0,)) == 1

    def test_empty_index_set_rejected(self):
        with pytest.raises(ValueError):
            parity([1.0], ())

    @given(st.lists(st.sampled_from([-1.0, 1.0]), min_size=2, max_size=8), st.integers(0, 7))
    def test_single_flip_flips_parity(self, values, pos):
        pos = pos % len(values)
        idx = tuple(range(len(values)))
        flipped = list(values)
        flipped[pos] = -flipped[pos]
        assert parity(values, idx) == -parity(flipped, idx)

    def test_label_mapping(self):
        assert parity_label(-1) == 1
        assert parity_label(1) == 0


class TestBooleanTasks:
    def test_support_size(self):
        task = gen_boolean_task(BooleanTaskSpec(n=6, alpha=2, p=0.5, r=5, seed=0))
        assert task.support.rows == 5 * 2**2

    def test_variant_counts_exact(self):
        task = gen_boolean_task(BooleanTaskSpec(n=8, alpha=3, p=0.5, r=4, seed=1))
        active = list(task.meta.active_indices)
        patterns = task.support.features[:, active]
        uniq, counts = np.unique(patterns, axis=0, return_counts=True)
        assert uniq.shape[0] == 2**3
        assert np.all(counts == 4)

    def test_class_balance_exact(self):
        task = gen_boolean_task(BooleanTaskSpec(n=7, alpha=3, p=0.2, r=3, seed=2))
        assert (task.support.labels == 0).sum() == (task.support.labels == 1).sum()

    def test_labels_recovered_from_parity(self):
        for seed in range(20):
            task = gen_boolean_task(BooleanTaskSpec(n=9, alpha=4, p=0.7, r=2, seed=seed))
            idx = task.meta.active_indices
            for ls in (task.support, task.query):
                expected = [parity_label(parity(row, idx)) for row in ls.features]
                np.testing.assert_array_equal(ls.labels, expected)

    def test_deterministic_given_seed(self):
        spec = BooleanTaskSpec(n=10, alpha=3, p=0.5, r=2, seed=77)
        assert task_to_json(gen_boolean_task(spec)) == task_to_json(gen_boolean_task(spec))

    def test_seed_isolation(self):
        a = gen_boolean_task(BooleanTaskSpec(n=10, alpha=3, p=0.5, r=2, seed=1))
        b = gen_boolean_task(BooleanTaskSpec(n=10, alpha=3, p=0.5, r=2, seed=2))
        assert task_to_json(a) != task_to_json(b)

    def test_zero_one_encoding(self):
        task = gen_boolean_task(
            BooleanTaskSpec(n=5, alpha=2, p=0.5, r=1, seed=3, encoding=Encoding.ZERO_ONE)
        )
        assert np.isin(task.support.features, (0.0, 1.0)).all()

    def test_irrelevant_feature_marginal(self):
        """Noise features are Bernoulli(p): empirical mean within 3 SE."""
        p = 0.3
        count = 10_000
        values = np.empty(count)
        for t in range(count):
            task = gen_boolean_task(
                BooleanTaskSpec(n=3, alpha=1, p=p, r=1, query_count=1, seed=task_seed(5, t))
            )
            noise = [i for i in range(3) if i not in task.meta.active_indices]
            values[t] = task.support.features[0, noise[0]]
        expected_mean = 2 * p - 1  # plus/minus encoding of Bernoulli(p)
        se = 2 * np.sqrt(p * (1 - p) / count)
        assert abs(values.mean() - expected_mean) <= 3 * se


class TestSphereTasks:
    def test_unit_norms(self):
        task = gen_sphere_task(SphereTaskSpec(sample_count=500, seed=0))
        norms = np.linalg.norm(task.support.features, axis=1)
        np.testing.assert_allclose(norms, 1.0, atol=1e-12)

    def test_label_rule(self):
        task = gen_sphere_task(SphereTaskSpec(sample_count=200, seed=1))
        pts = task.support.features
        expected = (np.sign(pts[:, 0]) * np.sign(pts[:, 1]) < 0).astype(int)
        np.testing.assert_array_equal(task.support.labels, expected)

    def test_class_balance(self):
        task = gen_sphere_task(SphereTaskSpec(sample_count=10_000, seed=2))
        frac = task.support.labels.mean()
        assert 0.48 <= frac <= 0.52

    def test_no_degenerate_coordinates(self):
        task = gen_sphere_task(SphereTaskSpec(sample_count=1000, seed=3))
        assert np.abs(task.support.features[:, :2]).min() >= 1e-6

    def test_deterministic(self):
        spec = SphereTaskSpec(sample_count=64, seed=9)
        a, b = gen_sphere_task(spec), gen_sphere_task(spec)
        np.testing.assert_array_equal(a.support.features, b.support.features)

    def test_minimum_size_enforced(self):
        with pytest.raises(ValueError):
            SphereTaskSpec(sample_count=3, seed=0)


def _tuple_spec(rule, **kwargs):
    defaults = dict(
        positions=4,
        symbols_per_slot=10,
        colors_per_slot=3,
        rule=rule,
        support_per_group=8,
        query_per_group=4,
        seed=0,
    )
    defaults.update(kwargs)
    return TupleTaskSpec(**defaults)


def _single_feature_best_accuracy(features, labels):
    best = 0.0
    for j in range(features.shape[1]):
        for direction in (features[:, j] > 0.5, features[:, j] <= 0.5):
            best = max(best, np.mean(direction.astype(int) == labels))
    return best


class TestTupleTasks:
    def test_feature_width(self):
        task = gen_tuple_task(_tuple_spec(MonotheticRule(slot=1, attribute="color")))
        assert task.support.cols == 4 * (10 + 3)

    def test_one_hot_blocks(self):
        task = gen_tuple_task(_tuple_spec(MonotheticRule(slot=0, attribute="symbol")))
        feats = task.support.features.reshape(task.support.rows, 4, 13)
        np.testing.assert_array_equal(feats[:, :, :10].sum(axis=2), 1.0)
        np.testing.assert_array_equal(feats[:, :, 10:].sum(axis=2), 1.0)

    def test_monothetic_has_perfect_single_feature(self):
        task = gen_tuple_task(_tuple_spec(MonotheticRule(slot=2, attribute="symbol"), seed=4))
        acc = _single_feature_best_accuracy(task.support.features, task.support.labels)
        assert acc == 1.0

    def test_polythetic_has_no_single_feature_predictor(self):
        rule = PolytheticRule(slot_a=0, attribute_a="symbol", slot_b=1, attribute_b="color")
        task = gen_tuple_task(_tuple_spec(rule, support_per_group=100, seed=5))
        feats, labels = task.support.features, task.support.labels
        assert feats.shape[0] == 400
        # binomial noise ceiling for a fair coin over 400 draws
        sigma = np.sqrt(0.25 / 400)
        assert _single_feature_best_accuracy(feats, labels) <= 0.5 + 3 * sigma

    def test_rule_slot_out_of_range(self):
        with pytest.raises(ValueError):
            _tuple_spec(MonotheticRule(slot=4, attribute="symbol"))

    def test_duplicate_rule_pair_rejected(self):
        rule = PolytheticRule(slot_a=1, attribute_a="color", slot_b=1, attribute_b="color")
        with pytest.raises(ValueError):
            _tuple_spec(rule)

    def test_group_sizes(self):
        rule = PolytheticRule(slot_a=0, attribute_a="symbol", slot_b=3, attribute_b="color")
        task = gen_tuple_task(_tuple_spec(rule))
        assert task.support.rows == 4 * 8
        assert task.query.rows == 4 * 4
        assert (task.support.labels == 1).sum() == 16
