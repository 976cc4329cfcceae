import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from core import (
    CoresetWeights,
    DataError,
    DegenerateInput,
    InvalidArgument,
    MomentSummary,
    WeightedSet,
    derive_seed,
    eval_cost,
    merge_coresets,
    moments,
    weighted_mean,
    weighted_variance,
)


def test_weighted_set_rejects_mismatched_weights():
    with pytest.raises(InvalidArgument):
        WeightedSet(np.zeros((3, 2)), np.ones(2))


def test_weighted_set_rejects_non_finite_points():
    with pytest.raises(InvalidArgument):
        WeightedSet([[0.0], [np.nan]], [1.0, 1.0])


def test_weighted_set_arrays_are_read_only():
    wset = WeightedSet(np.arange(6.0).reshape(3, 2), np.ones(3))

    with pytest.raises(ValueError):
        wset.points[0, 0] = 5.0
    with pytest.raises(ValueError):
        wset.weights[0] = 5.0


def test_weighted_set_does_not_alias_caller_arrays():
    points = np.arange(4.0).reshape(2, 2)
    wset = WeightedSet(points, np.ones(2))
    points[0, 0] = 99.0

    assert wset.points[0, 0] == 0.0


def test_uniform_flag_tracks_equal_weights():
    assert WeightedSet([[0.0], [1.0]], [2.0, 2.0]).uniform
    assert not WeightedSet([[0.0], [1.0]], [1.0, 2.0]).uniform
    assert WeightedSet.unweighted([[0.0], [1.0], [2.0]]).total_weight == pytest.approx(1.0)


def test_memory_mapped_set_defers_the_finiteness_check():
    points = np.arange(8.0).reshape(4, 2)
    points[2, 1] = np.inf

    wset = WeightedSet.memory_mapped(points)

    assert wset.lazy and wset.uniform
    assert wset.total_weight == 4.0
    wset.require_finite([0, 1, 3])
    with pytest.raises(DataError, match="finite"):
        wset.require_finite([2])
    with pytest.raises(DataError, match="finite"):
        moments(wset)
    with pytest.raises(ValueError):
        wset.points[0, 0] = 1.0


def test_lazy_set_needs_a_broadcast_weight():
    with pytest.raises(InvalidArgument, match="broadcast"):
        WeightedSet(np.zeros((3, 1)), np.ones(3), lazy=True)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1), st.integers(min_value=1, max_value=6))
def test_summary_cost_matches_direct_cost(seed, d):
    rng = np.random.default_rng(seed)
    wset = WeightedSet(rng.normal(size=(50, d)), rng.uniform(0.1, 3.0, size=50))
    summary = moments(wset)
    x = rng.normal(scale=4.0, size=d)

    direct = eval_cost(wset, x)

    assert summary.cost(x) == pytest.approx(direct, rel=1e-9, abs=1e-9)


def test_summary_cost_is_clipped_at_zero():
    summary = MomentSummary(1.0, np.array([1.0]), 1.0 - 1e-15)

    assert summary.cost([1.0]) == 0.0


def test_summaries_merge_to_the_union():
    rng = np.random.default_rng(3)
    left = WeightedSet(rng.normal(size=(20, 3)), rng.uniform(0.5, 2.0, size=20))
    right = WeightedSet(rng.normal(size=(30, 3)), rng.uniform(0.5, 2.0, size=30))
    union = WeightedSet(np.vstack([left.points, right.points]), np.concatenate([left.weights, right.weights]))

    merged = moments(left) + moments(right)
    expected = moments(union)

    assert merged.s0 == pytest.approx(expected.s0, rel=1e-12)
    np.testing.assert_allclose(merged.s1, expected.s1, rtol=1e-12, atol=1e-12)
    assert merged.s2 == pytest.approx(expected.s2, rel=1e-12)


def test_compensated_moments_agree_with_plain_sums():
    rng = np.random.default_rng(11)
    wset = WeightedSet(rng.normal(1e3, 1.0, size=(1000, 2)), rng.uniform(0.5, 2.0, size=1000))

    plain = moments(wset, compensated=False)
    exact = moments(wset, compensated=True)

    assert plain.s2 == pytest.approx(exact.s2, rel=1e-12)
    np.testing.assert_allclose(plain.s1, exact.s1, rtol=1e-12)


def test_compensated_sum_follows_environment(monkeypatch):
    monkeypatch.setenv("MEANCORE_COMPENSATED_SUM", "on")
    values = np.array([[1e16], [1.0], [-1e16]])
    wset = WeightedSet(values, np.ones(3))

    assert moments(wset).s1[0] == 1.0


def test_weighted_mean_and_variance():
    wset = WeightedSet([[0.0], [2.0]], [1.0, 3.0])

    assert weighted_mean(wset)[0] == pytest.approx(1.5)
    assert weighted_variance(wset) == pytest.approx((1.5**2 + 3 * 0.5**2) / 4)


def test_mean_of_zero_mass_summary_is_degenerate():
    with pytest.raises(DegenerateInput):
        MomentSummary(0.0, np.zeros(2), 0.0).mean()


def test_coreset_weights_sort_indices():
    u = CoresetWeights(5, np.array([3, 1]), np.array([0.3, 0.1]))

    assert u.indices.tolist() == [1, 3]
    assert u.values.tolist() == [0.1, 0.3]
    assert u.nnz == 2
    assert u.as_dict() == {1: 0.1, 3: 0.3}


def test_coreset_weights_reject_duplicates_and_out_of_range():
    with pytest.raises(DataError):
        CoresetWeights(5, np.array([1, 1]), np.array([0.5, 0.5]))
    with pytest.raises(DataError):
        CoresetWeights(5, np.array([5]), np.array([1.0]))
    with pytest.raises(DataError):
        CoresetWeights(5, np.array([-1]), np.array([1.0]))


def test_dense_expansion_keeps_nonzeros_only():
    u = CoresetWeights.from_dense([0.0, 2.0, 0.0, -1.0])

    assert u.n == 4
    assert u.indices.tolist() == [1, 3]
    np.testing.assert_array_equal(u.to_dense(), [0.0, 2.0, 0.0, -1.0])
    assert u.total == pytest.approx(1.0)


def test_identity_coreset_reproduces_moments():
    rng = np.random.default_rng(5)
    wset = WeightedSet(rng.normal(size=(10, 2)), rng.uniform(0.5, 2.0, size=10))

    summary = CoresetWeights.identity(wset).moments_of(wset)

    assert summary.s2 == pytest.approx(moments(wset).s2)


def test_support_set_checks_source_size():
    u = CoresetWeights(3, np.array([0]), np.array([1.0]))

    with pytest.raises(DataError):
        u.support_set(WeightedSet(np.zeros((4, 1)), np.ones(4)))


def test_merge_coresets_adds_overlapping_entries():
    a = CoresetWeights(4, np.array([0, 2]), np.array([1.0, 2.0]))
    b = CoresetWeights(4, np.array([2, 3]), np.array([1.0, -4.0]))

    merged = merge_coresets([a, b], 4)

    assert merged.as_dict() == {0: 1.0, 2: 3.0, 3: -4.0}


def test_derive_seed_is_reproducible_and_distinct():
    seeds = {derive_seed(7, cell, trial) for cell in range(3) for trial in range(50)}

    assert derive_seed(7, 1, 2) == derive_seed(7, 1, 2)
    assert len(seeds) == 150
    assert derive_seed(7, 0) != derive_seed(8, 0)
    assert all(0 <= s < 2**64 for s in seeds)


def test_as_point_rejects_wrong_dimension():
    summary = MomentSummary(1.0, np.zeros(3), 1.0)

    with pytest.raises(InvalidArgument):
        summary.cost([0.0, 1.0])
    assert math.isclose(summary.cost([0.0, 0.0, 0.0]), 1.0)
