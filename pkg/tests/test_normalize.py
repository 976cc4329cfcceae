import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_set
from core import CoresetWeights, DegenerateInput, InvalidArgument, WeightedSet, eval_cost, moments
from normalize import (
    denormalize_weights,
    is_normalized,
    normalization_error,
    normalize,
    renormalize_weights,
    require_normalized,
    single_point_coreset,
)


@settings(max_examples=60, deadline=None)
@given(
    st.integers(min_value=0, max_value=2**32 - 1),
    st.integers(min_value=2, max_value=300),
    st.integers(min_value=1, max_value=8),
)
def test_normalize_output_satisfies_all_three_conditions(seed, n, d):
    normalized, _ = normalize(random_set(seed, n, d))
    summary = moments(normalized)

    assert abs(summary.s0 - 1.0) <= 1e-10
    assert np.linalg.norm(summary.s1) <= 1e-10
    assert abs(summary.s2 - 1.0) <= 1e-10
    assert is_normalized(normalized)


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_weights_round_trip_through_the_transform(seed):
    wset = random_set(seed, 40, 3)
    _, transform = normalize(wset)
    u = CoresetWeights.identity(wset)

    back = denormalize_weights(renormalize_weights(u, transform), transform)

    np.testing.assert_allclose(back.values, u.values, rtol=1e-12)
    assert back.indices.tolist() == u.indices.tolist()


def test_normalized_queries_correspond_to_source_queries():
    rng = np.random.default_rng(0)
    for instance in range(50):
        wset = random_set(instance, 60, 4)
        normalized, transform = normalize(wset)
        subset = CoresetWeights.from_dense(rng.uniform(0.0, 1.0, size=60) * (rng.uniform(size=60) < 0.3))
        if subset.nnz == 0:
            continue
        sub_norm = subset.support_set(normalized)
        sub_raw = denormalize_weights(subset, transform).support_set(wset)
        for _ in range(10):
            x = rng.normal(scale=10.0, size=4)
            raw_cost = eval_cost(sub_raw, x)
            mapped = transform.cost_scale * eval_cost(sub_norm, transform.to_normalized(x))

            assert mapped == pytest.approx(raw_cost, rel=1e-9)


def test_transform_maps_queries_both_ways():
    _, transform = normalize(random_set(4, 30, 2))
    x = np.array([1.5, -2.0])

    np.testing.assert_allclose(transform.to_source(transform.to_normalized(x)), x, rtol=1e-12)
    assert set(transform.to_dict()) == {"mu", "sigma", "total_mass"}


def test_identical_points_are_degenerate():
    wset = WeightedSet(np.tile([2.0, -1.0], (5, 1)), np.ones(5))

    with pytest.raises(DegenerateInput) as excinfo:
        normalize(wset)

    np.testing.assert_allclose(excinfo.value.mu, [2.0, -1.0])
    assert excinfo.value.total_mass == pytest.approx(5.0)


def test_non_positive_weights_are_rejected():
    wset = WeightedSet([[0.0], [1.0], [2.0]], [1.0, 0.0, 1.0])

    with pytest.raises(InvalidArgument, match="positive weights"):
        normalize(wset)


def test_require_normalized_names_the_consumer():
    with pytest.raises(InvalidArgument, match="Frank-Wolfe"):
        require_normalized(random_set(1, 10, 2), "Frank-Wolfe")


def test_normalization_error_of_a_normalized_two_point_set_is_zero():
    wset = WeightedSet([[1.0], [-1.0]], [0.5, 0.5])

    assert normalization_error(wset) == 0.0


def test_single_point_coreset_is_exact():
    wset = WeightedSet(np.tile([3.0], (4, 1)), [1.0, 2.0, 3.0, 4.0])

    u = single_point_coreset(wset)

    assert u.as_dict() == {0: 10.0}
    assert eval_cost(u.support_set(wset), [7.0]) == pytest.approx(eval_cost(wset, [7.0]))
