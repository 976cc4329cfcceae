import math

import numpy as np
import pytest

from builders import (
    ACCURATE_TOL,
    ALGORITHMS,
    BuildParams,
    build,
    expected_success_floor,
    guarantee_kind,
    guarantee_target,
    size_bound,
    size_formula,
)
from conftest import random_set
from core import InvalidArgument, WeightedSet
from sampling import ceil_count
from verify import summary_strong_error, verify_coreset


def test_cara_on_ten_points_keeps_at_most_four():
    wset = WeightedSet(np.linspace(-3.0, 5.0, 10).reshape(-1, 1) ** 3, np.ones(10))

    result = build(wset, "cara", BuildParams())

    assert result.nnz <= 4
    assert verify_coreset(wset, result.weights, ["worst"]).worst_case <= ACCURATE_TOL


def test_stats_build_returns_the_summary():
    wset = random_set(0, 100, 2)

    result = build(wset, "stats", BuildParams())

    assert result.weights is None
    assert set(result.summary.to_dict()) == {"s0", "s1", "s2"}
    assert summary_strong_error(wset, result.summary) <= ACCURATE_TOL


def test_mom_draws_and_size():
    rng = np.random.default_rng(0)
    wset = WeightedSet(rng.normal(size=(1_000_000, 1)), np.ones(1_000_000))

    result = build(wset, "mom", BuildParams(eps=0.5, delta=math.exp(-1), seed=3))

    assert result.nnz == 8
    assert result.draws == 32
    assert result.summary_line()["draws"] == 32


def test_fw_strong_error_is_within_eps():
    wset = random_set(1, 2000, 3)

    result = build(wset, "fw", BuildParams(eps=0.4))

    assert verify_coreset(wset, result.weights, ["worst"]).worst_case <= 0.4
    assert result.nnz <= ceil_count(128 / 0.4**2)


@pytest.mark.parametrize("algo", ["sens", "bern", "fw"])
def test_normalized_builders_map_weights_back(algo):
    wset = random_set(2, 20_000, 2, weighted=algo != "sens")

    result = build(wset, algo, BuildParams(eps=0.3, seed=5))

    # weights live on the source scale: total mass is preserved up to the strong error
    assert result.weights.total == pytest.approx(wset.total_weight, rel=0.3)
    assert verify_coreset(wset, result.weights, ["worst"]).worst_case <= 2 * 0.3


def test_sensitivity_build_names_the_violated_assumption():
    wset = random_set(3, 1000, 2, weighted=True)

    with pytest.raises(InvalidArgument, match="uniform weights"):
        build(wset, "sens", BuildParams())


@pytest.mark.parametrize("algo", ["sens", "bern", "fw"])
def test_coincident_points_get_the_exact_single_point_coreset(algo):
    wset = WeightedSet(np.tile([1.0, -2.0], (30, 1)), np.ones(30))

    result = build(wset, algo, BuildParams())

    assert result.weights.as_dict() == {0: 30.0}


def test_unknown_algorithm_is_rejected():
    with pytest.raises(InvalidArgument):
        build(random_set(0, 10, 1), "kmeans", BuildParams())


def test_build_params_reject_unknown_mode():
    with pytest.raises(InvalidArgument):
        BuildParams(mode="medium")


def test_size_bounds():
    params = BuildParams(eps=0.2, delta=0.1)

    assert size_bound("stats", 5, params) == 7
    assert size_bound("cara", 5, params) == 8
    assert size_bound("signed", 5, params) == 7
    assert size_bound("sens", 5, params) == 366
    assert size_bound("fw", 5, params) == 3200
    assert size_bound("uniform", 5, params) == 50
    assert size_bound("mom", 5, params) == 20
    assert all(size_formula(algo, "strong") for algo in ALGORITHMS)


def test_guarantees():
    params = BuildParams(eps=0.2, delta=0.1)

    assert guarantee_kind("cara", "strong") == "accurate"
    assert guarantee_kind("mom", "strong") == "weak"
    assert guarantee_kind("fw", "weak") == "weak"
    assert guarantee_target("mom", params) == pytest.approx(6.6)
    assert guarantee_target("bern", params) == pytest.approx(0.4)
    assert guarantee_target("fw", params) == pytest.approx(0.2)


def test_success_floor_uses_three_standard_deviations():
    params = BuildParams(eps=0.2, delta=0.1)

    assert expected_success_floor("sens", params, 100) == pytest.approx(81.0)
    assert expected_success_floor("fw", params, 100) == 100.0
    assert expected_success_floor("mom", BuildParams(delta=0.2), 1000) == pytest.approx(400 - 3 * math.sqrt(240))


def test_stats_summary_counts_its_numbers():
    result = build(random_set(6, 80, 4), "stats", BuildParams())

    assert result.weights is None
    assert result.nnz == result.summary_line()["nnz"] == size_bound("stats", 4, BuildParams())


def test_summary_line_reports_fallback():
    wset = random_set(4, 50, 2, weighted=False)

    result = build(wset, "sens", BuildParams())

    assert result.summary_line()["fallback"] is True
    assert {"algo", "nnz", "build_ms"} <= set(result.summary_line())
