"""
Weak coresets in time sublinear in n, for uniformly weighted inputs.

Both builders only read the rows they sample, so the input may be any
index-addressable array (including a read-only memory map).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from core import CoresetWeights, InvalidArgument, WeightedSet, rng_from_seed
from sampling import ceil_count

logger = logging.getLogger(__name__)

MAX_MOM_DELTA = 0.9

_LOGS = {
    "e": math.log,
    "2": math.log2,
    "10": math.log10,
}


def log_fn(base: str = "e"):
    try:
        return _LOGS[str(base)]
    except KeyError as exc:
        raise InvalidArgument(f"log base must be one of {sorted(_LOGS)}, got {base!r}") from exc


@dataclass(frozen=True, eq=False)
class GroupMeans:
    """Means of k disjoint sample groups; ``indices`` has shape (k, group_size)."""

    means: np.ndarray
    group_size: int
    indices: np.ndarray

    @property
    def k(self) -> int:
        return int(self.means.shape[0])


@dataclass(frozen=True, eq=False)
class MedianOfMeansResult:
    groups: GroupMeans
    selected: int
    weights: CoresetWeights


def _check_eps_delta(eps: float, delta: float, max_delta: float = 1.0) -> None:
    if not 0 < eps < 1:
        raise InvalidArgument(f"eps must lie in (0, 1), got {eps}")
    if not 0 < delta < 1 or delta > max_delta:
        raise InvalidArgument(f"delta must lie in (0, {max_delta:g}], got {delta}")


def _require_uniform(wset: WeightedSet, purpose: str) -> None:
    if not wset.uniform:
        raise InvalidArgument(f"{purpose} requires uniform weights (unweighted input)")


def _uniform_full_set(wset: WeightedSet, size: int, purpose: str) -> CoresetWeights:
    logger.warning("%s: sample size %s >= n=%s; returning the full set", purpose, size, wset.n)
    return CoresetWeights(wset.n, np.arange(wset.n), np.full(wset.n, 1.0 / wset.n), fallback=True)


def _counts_to_distribution(n: int, draws: np.ndarray) -> CoresetWeights:
    idx, counts = np.unique(draws, return_counts=True)
    return CoresetWeights(n, idx, counts / draws.size)


def chebyshev_sample_size(eps: float, delta: float) -> int:
    """m = ⌈1/(εδ)⌉."""
    return ceil_count(1.0 / (eps * delta))


def mom_group_count(delta: float, log_base: str = "e") -> int:
    """k = ⌊3.5·log(1/δ)⌋ + 1."""
    return int(math.floor(round(3.5 * log_fn(log_base)(1.0 / delta), 9))) + 1


def mom_group_size(eps: float) -> int:
    """⌈4/ε⌉ points per group."""
    return ceil_count(4.0 / eps)


def uniform_weak_coreset(wset: WeightedSet, eps: float, delta: float, seed: int) -> CoresetWeights:
    """Uniform i.i.d. sample of ⌈1/(εδ)⌉ points, returned as an empirical distribution.

    With probability ≥ 1−δ, ‖mean(S) − μ‖² ≤ ε·σ² by Chebyshev's inequality.
    """
    _check_eps_delta(eps, delta)
    _require_uniform(wset, "uniform weak coreset")
    m = chebyshev_sample_size(eps, delta)
    if m >= wset.n:
        return _uniform_full_set(wset, m, "uniform weak coreset")
    rng = rng_from_seed(seed)
    draws = rng.integers(0, wset.n, size=m)
    wset.require_finite(draws)
    return _counts_to_distribution(wset.n, draws)


def group_means(
    wset: WeightedSet,
    eps: float,
    delta: float,
    seed: int | np.random.Generator,
    *,
    log_base: str = "e",
) -> GroupMeans:
    """Draw k·⌈4/ε⌉ uniform indices as one stream, split it into k groups and average each."""
    k = mom_group_count(delta, log_base)
    size = mom_group_size(eps)
    rng = rng_from_seed(seed)
    draws = rng.integers(0, wset.n, size=k * size).reshape(k, size)
    wset.require_finite(draws)
    means = wset.points[draws.reshape(-1)].reshape(k, size, wset.d).mean(axis=1)
    return GroupMeans(means=means, group_size=size, indices=draws)


def select_median_group(means: np.ndarray) -> int:
    """argmin_j Σᵢ‖s̄ᵢ − s̄ⱼ‖ over the group means (lowest index on ties)."""
    diffs = means[:, None, :] - means[None, :, :]
    scores = np.sqrt(np.einsum("ijk,ijk->ij", diffs, diffs)).sum(axis=0)
    return int(np.argmin(scores))


def median_of_means_sample(
    wset: WeightedSet,
    eps: float,
    delta: float,
    seed: int,
    *,
    log_base: str = "e",
) -> MedianOfMeansResult:
    """Run the median-of-means selection and keep every intermediate for inspection."""
    _check_eps_delta(eps, delta, MAX_MOM_DELTA)
    _require_uniform(wset, "median-of-means coreset")
    k = mom_group_count(delta, log_base)
    size = mom_group_size(eps)
    if k * size >= wset.n:
        wset.require_finite()
        full = _uniform_full_set(wset, k * size, "median-of-means coreset")
        groups = GroupMeans(
            means=wset.points.mean(axis=0, keepdims=True),
            group_size=wset.n,
            indices=np.arange(wset.n).reshape(1, -1),
        )
        return MedianOfMeansResult(groups, 0, full)
    groups = group_means(wset, eps, delta, seed, log_base=log_base)
    selected = select_median_group(groups.means)
    weights = _counts_to_distribution(wset.n, groups.indices[selected])
    logger.debug("median of means: k=%s group_size=%s selected=%s", k, size, selected)
    return MedianOfMeansResult(groups, selected, weights)


def median_of_means_coreset(
    wset: WeightedSet,
    eps: float,
    delta: float,
    seed: int,
    *,
    log_base: str = "e",
) -> CoresetWeights:
    """Weak coreset of ⌈4/ε⌉ points: the sample group whose mean is closest to the others.

    With probability ≥ 1−3δ, ‖mean(S) − μ‖² ≤ 33·ε·σ².
    """
    return median_of_means_sample(wset, eps, delta, seed, log_base=log_base).weights
