"""Threshold formula, single- and multi-object factorization, checked against brute force."""

import math

import numpy as np
import pytest

from factorhd.codebook import NULL, ItemPath, generate_hierarchy
from factorhd.encoder import encode_object, encode_scene
from factorhd.errors import DimensionMismatchError, InvalidShapeError
from factorhd.factorizer import (
    Counters,
    DecodedObject,
    ThresholdConfig,
    auto_threshold,
    candidate_items,
    factorize_multi,
    factorize_single,
    reconstruct_and_exclude,
    unbind_labels,
)
from factorhd.vsa import Domain, Hypervector

from .oracles import BruteForceOracle, ref_object


def random_object(rng, h, null_prob=0.0):
    return tuple(
        NULL if rng.random() < null_prob else tuple(int(rng.integers(m)) for m in h.branching)
        for _ in range(h.num_classes)
    )


class TestAutoThreshold:
    @pytest.mark.parametrize(
        "n, f, d, m, expected",
        [(3, 4, 2000, 10, 0.047), (5, 4, 2000, 10, 0.051), (3, 6, 2000, 10, 0.017)],
    )
    def test_worked_values(self, n, f, d, m, expected):
        assert auto_threshold(n, f, d, m) == pytest.approx(expected, abs=1e-12)

    def test_monotone(self):
        base = auto_threshold(3, 4, 2000, 10)
        assert auto_threshold(4, 4, 2000, 10) > base
        assert auto_threshold(3, 5, 2000, 10) < base
        assert auto_threshold(3, 4, 3000, 10) < base
        assert auto_threshold(3, 4, 2000, 100) < base

    def test_floor(self):
        assert auto_threshold(1, 12, 100000, 10**6) == 0.005

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            auto_threshold(0, 3, 100, 10)

    def test_config_resolution(self, small_h):
        expect = auto_threshold(2, 3, 1024, 10)
        assert ThresholdConfig.auto().resolve(small_h) == pytest.approx(expect)
        assert ThresholdConfig.auto().resolve(small_h, hint=5) == pytest.approx(auto_threshold(5, 3, 1024, 10))
        assert ThresholdConfig.auto(4).resolve(small_h, hint=5) == pytest.approx(auto_threshold(4, 3, 1024, 10))
        assert ThresholdConfig.fixed(0.03).resolve(small_h) == 0.03
        with pytest.raises(ValueError):
            ThresholdConfig.fixed(1.5)


class TestUnbindLabels:
    def test_single_class_is_identity(self):
        h = generate_hierarchy(64, 1, [3], seed=0)
        t = encode_object(h, [(1,)])
        assert unbind_labels(t, h, 0) == t

    def test_twice_restores(self, small_h):
        t = encode_scene(small_h, [[(1,), (2,), (3,)], [(4,), (5,), (6,)]]).hv
        once = unbind_labels(t, small_h, 1)
        assert unbind_labels(once, small_h, 1) == t

    def test_out_of_range(self, small_h):
        with pytest.raises(IndexError):
            unbind_labels(encode_object(small_h, [(0,)] * 3), small_h, 3)


class TestCandidateItems:
    def test_rep1_only_true_item_survives(self):
        """Fitted threshold with N=1 keeps exactly the encoded item at D=1500, M=256."""
        rng = np.random.default_rng(4)
        exact = 0
        trials = 1024
        for t in range(trials):
            if t % 512 == 0:
                h = generate_hierarchy(1500, 3, [256], seed=t)
                th = auto_threshold(1, 3, 1500, 256)
            obj = random_object(rng, h)
            u = unbind_labels(encode_object(h, obj), h, 0)
            found = candidate_items(u, h, 0, th=th)
            exact += [p for p, _ in found] == [ItemPath(0, obj[0])]
        assert exact / trials >= 0.99

    def test_two_objects_share_a_class(self):
        h = generate_hierarchy(4000, 3, [10], seed=8)
        t = encode_scene(h, [[(1,), (1,), (0,)], [(2,), (1,), (1,)]]).hv
        found = candidate_items(unbind_labels(t, h, 0), h, 0, th=0.06)
        assert {p.levels for p, _ in found} == {(1,), (2,)}

    def test_random_target_yields_nothing(self, small_h, rng):
        empty = 0
        for _ in range(50):
            u = Hypervector(rng.choice([-1, 1], 1024), Domain.BIPOLAR)
            empty += candidate_items(u, small_h, 0, th=0.12) == []
        assert empty >= 49

    def test_sorted_and_counted(self, small_h):
        t = encode_object(small_h, [(3,), (4,), (5,)])
        counters = Counters()
        found = candidate_items(unbind_labels(t, small_h, 2), small_h, 2, th=-1.0, counters=counters)
        scores = [s for _, s in found]
        assert scores == sorted(scores, reverse=True)
        assert found[0][0] == ItemPath(2, (5,))
        assert counters.similarity_measurements == 11  # ten items plus NULL


class TestFactorizeSingle:
    def test_rep1_accuracy(self):
        rng = np.random.default_rng(0)
        ok = 0
        for t in range(1024):
            if t % 512 == 0:
                h = generate_hierarchy(750, 3, [100], seed=100 + t)
            obj = random_object(rng, h)
            got = factorize_single(encode_object(h, obj), h)
            ok += all(got[c] == ItemPath(c, obj[c]) for c in range(3))
        assert ok / 1024 >= 0.99

    def test_rep2_full_paths(self):
        h = generate_hierarchy(1000, 1, [256, 10], seed=1)
        rng = np.random.default_rng(1)
        for _ in range(200):
            obj = random_object(rng, h)
            assert factorize_single(encode_object(h, obj), h)[0] == ItemPath(0, obj[0])

    def test_null_class_decoded(self, deep_h, rng):
        for _ in range(20):
            obj = random_object(rng, deep_h, null_prob=0.5)
            got = factorize_single(encode_object(deep_h, obj), deep_h)
            assert [NULL if g is NULL else g.levels for g in got.values()] == list(obj)

    def test_partial_cost_bound(self, deep_h):
        counters = Counters()
        got = factorize_single(encode_object(deep_h, [(1, 2), (3, 0)]), deep_h, {0}, counters)
        assert list(got) == [0]
        assert counters.similarity_measurements <= 1 + sum(deep_h.branching)

    def test_dimension_mismatch(self, small_h):
        with pytest.raises(DimensionMismatchError):
            factorize_single(np.ones(10, dtype=np.int8), small_h)

    def test_label_only_hierarchy(self):
        h = generate_hierarchy(32, 2, [], seed=0)
        with pytest.raises(InvalidShapeError):
            factorize_single(np.ones(32), h)


class TestFactorizeMulti:
    def test_two_distinct_objects(self):
        h = generate_hierarchy(4000, 3, [10], seed=2)
        rng = np.random.default_rng(2)
        for _ in range(20):
            objs = [random_object(rng, h), random_object(rng, h)]
            res = factorize_multi(encode_scene(h, objs), h)
            assert res.assignment_multiset() == sorted(objs)
            assert res.residual_norm == 0.0

    def test_four_combinations_scenario(self):
        """Survivors {a12, a13} x {a22} x {a31, a32}: four combinations in total."""
        h = generate_hierarchy(4000, 3, [4], seed=3)
        objs = [((1,), (1,), (0,)), ((2,), (1,), (1,))]
        res = factorize_multi(encode_scene(h, objs), h)
        assert res.assignment_multiset() == sorted(objs)
        assert res.counters.combinations_tested == 4

    def test_problem_of_two(self):
        h = generate_hierarchy(4000, 3, [10], seed=4)
        obj = ((3,), (7,), (1,))
        res = factorize_multi(encode_scene(h, [obj, obj]), h)
        assert res.assignment_multiset() == [obj, obj]
        assert res.residual_norm == 0.0
        assert res.counters.loop_iterations <= 3  # two excluding passes plus the empty one

    def test_multilevel_with_null(self):
        h = generate_hierarchy(4000, 2, [6, 4], seed=6)
        objs = [((1, 2), NULL), ((4, 0), (2, 3))]
        res = factorize_multi(encode_scene(h, objs), h)
        assert res.assignment_multiset() == sorted(objs, key=lambda o: tuple((-1,) if a is NULL else a for a in o))

    def test_truncation(self):
        h = generate_hierarchy(4000, 3, [10], seed=2)
        objs = [((0,), (1,), (2,)), ((3,), (4,), (5,))]
        res = factorize_multi(encode_scene(h, objs), h, max_objects=1)
        assert len(res.objects) == 1 and res.truncated
        assert not factorize_multi(encode_scene(h, objs), h).truncated

    def test_deterministic(self, small_h):
        objs = [((1,), (2,), (3,)), ((4,), (5,), (6,))]
        a = factorize_multi(encode_scene(small_h, objs), small_h, 0.08)
        b = factorize_multi(encode_scene(small_h, objs), small_h, 0.08)
        assert a.objects == b.objects and a.counters == b.counters and a.residual == b.residual

    @pytest.mark.parametrize("acceptance", ["batch", "sequential"])
    def test_agrees_with_brute_force(self, acceptance):
        """Easy regime (D=2048): decoded set equals the exhaustive oracle's answer."""
        h = generate_hierarchy(2048, 3, [4], seed=9)
        oracle = BruteForceOracle(h, max_objects=2)
        rng = np.random.default_rng(9)
        for t in range(60):
            objs = [random_object(rng, h) for _ in range(1 + t % 2)]
            target = encode_scene(h, objs).hv.components
            res = factorize_multi(target, h, acceptance=acceptance)
            assert res.assignment_multiset() == oracle.decode(target).objects

    def test_combination_budget(self, small_h):
        res = factorize_multi(encode_scene(small_h, [[(1,), (2,), (3,)]]), small_h, 0.006, max_combinations=8)
        assert res.counters.combinations_tested <= 8 * res.counters.loop_iterations * 2

    def test_bad_arguments(self, small_h):
        t = encode_object(small_h, [(1,), (2,), (3,)])
        with pytest.raises(ValueError):
            factorize_multi(t, small_h, max_objects=0)
        with pytest.raises(ValueError):
            factorize_multi(t, small_h, acceptance="greedy")


class TestReconstructAndExclude:
    def test_exact_cancellation(self, small_h):
        obj = ((1,), (2,), (3,))
        r = reconstruct_and_exclude(encode_object(small_h, obj), small_h, DecodedObject(obj, 1.0))
        assert not np.any(r.components)

    def test_leaves_other_object(self, small_h):
        o1, o2 = ((1,), (2,), (3,)), ((4,), (5,), (6,))
        r = reconstruct_and_exclude(encode_scene(small_h, [o1, o2]), small_h, o1)
        assert np.array_equal(r.components, ref_object(small_h, o2))

    def test_false_exclusion_stays_below_threshold(self):
        h = generate_hierarchy(2000, 3, [10], seed=12)
        rng = np.random.default_rng(12)
        th = auto_threshold(2, 3, 2000, 10)
        ghosts = 0
        for _ in range(100):
            present, absent = random_object(rng, h), random_object(rng, h)
            if present == absent:
                continue
            r = reconstruct_and_exclude(encode_object(h, present), h, absent)
            res = factorize_multi(r, h, th, max_objects=1)
            ghosts += any(o.assignments not in (present,) for o in res.objects)
        assert ghosts <= 5


def test_counter_linear_in_m():
    """similarity_measurements for Rep-1 equals F * (M + 1) exactly."""
    for m in (16, 64, 256):
        h = generate_hierarchy(512, 3, [m], seed=m)
        counters = Counters()
        factorize_single(encode_object(h, [(0,), (1,), (2,)]), h, counters=counters)
        assert counters.similarity_measurements == 3 * (m + 1)
        assert math.isclose(counters.similarity_measurements / (3 * m), 1 + 1 / m)
