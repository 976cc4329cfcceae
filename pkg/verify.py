"""
Oracles that certify coreset quality.

In the normalized frame the cost difference between data and coreset is
A + C‖x‖² − 2b·x with A = Σ(wᵢ−uᵢ)‖pᵢ‖², C = Σ(wᵢ−uᵢ), b = Σ(wᵢ−uᵢ)pᵢ, and the
data cost is 1 + ‖x‖². This makes the worst-case relative error computable in
closed form.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from typing import Iterable, Optional

import numpy as np

from core import (
    CoresetWeights,
    DegenerateInput,
    InvalidArgument,
    MomentSummary,
    PreconditionUnmet,
    WeightedSet,
    eval_cost,
    rng_from_seed,
    weighted_mean,
)
from normalize import normalize, renormalize_weights, require_normalized

logger = logging.getLogger(__name__)

QUERY_SCALES = (0.1, 1.0, 10.0)
CHECKS = ("worst", "empirical", "weak", "moments")


@dataclass(frozen=True)
class MomentDiscrepancy:
    a: float
    b: float
    c: float

    @property
    def max(self) -> float:
        return max(self.a, self.b, self.c)

    @property
    def certified_eps(self) -> float:
        """A max discrepancy of ε₀ certifies a strong 2ε₀-coreset."""
        return 2.0 * self.max


@dataclass
class ErrorReport:
    worst_case: Optional[float] = None
    empirical: Optional[float] = None
    weak_snorm: Optional[float] = None
    weak_ratio: Optional[float] = None
    certified_eps: Optional[float] = None
    moments: Optional[MomentDiscrepancy] = None

    def to_dict(self) -> dict:
        return asdict(self)


def _difference_terms(normalized: WeightedSet, u: CoresetWeights) -> tuple[float, float, np.ndarray]:
    u.check_source(normalized)
    delta = normalized.weights - u.to_dense()
    a = float(np.dot(delta, normalized.squared_norms()))
    c = float(np.sum(delta))
    b = delta @ normalized.points
    return a, c, b


def moment_check(normalized: WeightedSet, u: CoresetWeights) -> MomentDiscrepancy:
    """(‖Σuᵢpᵢ‖, |1 − Σuᵢ|, |1 − Σuᵢ‖pᵢ‖²|) against a normalized set."""
    require_normalized(normalized, "moment check")
    u.check_source(normalized)
    pts = normalized.points[u.indices]
    sq = np.einsum("ij,ij->i", pts, pts)
    return MomentDiscrepancy(
        a=float(np.linalg.norm(u.values @ pts)) if u.nnz else 0.0,
        b=abs(1.0 - float(np.sum(u.values))),
        c=abs(1.0 - float(np.dot(u.values, sq))),
    )


def _directional_sup(a: float, c: float, beta: float) -> float:
    """sup over t ∈ ℝ of |a + c·t² − 2β·t|/(1 + t²), including the t → ±∞ limit |c|."""
    candidates = [abs(a), abs(c)]
    if beta != 0.0:
        # stationary points solve β·t² + (c − a)·t − β = 0; discriminant is always positive
        disc = math.sqrt((c - a) ** 2 + 4.0 * beta * beta)
        for t in ((-(c - a) + disc) / (2.0 * beta), (-(c - a) - disc) / (2.0 * beta)):
            candidates.append(abs(a + c * t * t - 2.0 * beta * t) / (1.0 + t * t))
    return max(candidates)


def worst_case_strong_error(normalized: WeightedSet, u: CoresetWeights) -> float:
    """Exact sup over x of |cost_w(x) − cost_u(x)|/cost_w(x) on a normalized set.

    Writing x = t·b̂ + y with y ⊥ b, the ratio is monotone in ‖y‖² towards |C|,
    so the supremum is attained along the b direction or in the limit.
    """
    require_normalized(normalized, "worst-case strong error")
    a, c, b = _difference_terms(normalized, u)
    return _directional_sup(a, c, float(np.linalg.norm(b)))


def summary_strong_error(wset: WeightedSet, summary: MomentSummary) -> float:
    """Worst-case relative error of answering every query from *summary* instead of *wset*."""
    try:
        _, t = normalize(wset)
    except DegenerateInput:
        total = wset.total_weight
        return abs(total - summary.s0) / total
    mu, sigma, mass = t.mu, t.sigma, t.total_mass
    s1 = np.asarray(summary.s1)
    s0_n = summary.s0 / mass
    s1_n = (s1 - summary.s0 * mu) / (sigma * mass)
    s2_n = (summary.s2 - 2.0 * float(np.dot(mu, s1)) + summary.s0 * float(np.dot(mu, mu))) / (sigma**2 * mass)
    return _directional_sup(1.0 - s2_n, 1.0 - s0_n, float(np.linalg.norm(s1_n)))


def _sample_queries(center: np.ndarray, scale: float, count: int, rng: np.random.Generator) -> np.ndarray:
    d = center.shape[0]
    per_scale = np.array_split(np.arange(count), len(QUERY_SCALES))
    blocks = []
    for factor, chunk in zip(QUERY_SCALES, per_scale):
        if chunk.size == 0:
            continue
        noise = rng.standard_normal((chunk.size, d)) / math.sqrt(d)
        blocks.append(center + factor * scale * noise)
    return np.vstack(blocks) if blocks else np.empty((0, d))


def empirical_strong_error(
    wset: WeightedSet,
    u: CoresetWeights,
    queries: int,
    seed: int,
) -> float:
    """Largest relative cost discrepancy over random queries around the weighted mean.

    Queries are Gaussian around μ at radii 0.1σ, σ and 10σ. Works on raw
    (non-normalized) sets and lower-bounds the true supremum.
    """
    if queries < 1:
        raise InvalidArgument("queries must be a positive integer")
    wset.require_positive_weights("empirical strong error")
    u.check_source(wset)
    mu = weighted_mean(wset)
    centered = wset.points - mu
    sq = np.einsum("ij,ij->i", centered, centered)
    scale = math.sqrt(float(np.dot(wset.weights, sq)) / wset.total_weight) or 1.0

    delta = wset.weights - u.to_dense()
    diff_a = float(np.dot(delta, sq))
    diff_c = float(np.sum(delta))
    diff_b = delta @ centered
    full_a = float(np.dot(wset.weights, sq))
    full_c = wset.total_weight

    rng = rng_from_seed(seed)
    xs = _sample_queries(np.zeros(wset.d), scale, queries, rng)
    x_sq = np.einsum("ij,ij->i", xs, xs)
    cost_w = full_a + full_c * x_sq
    cost_diff = np.abs(diff_a - 2.0 * (xs @ diff_b) + diff_c * x_sq)
    valid = cost_w > 0
    if not np.any(valid):
        return 0.0
    return float(np.max(cost_diff[valid] / cost_w[valid]))


def weak_error(normalized: WeightedSet, u: CoresetWeights) -> tuple[float, float]:
    """(‖s̄‖², cost_w(s̄)/min cost − 1) for the coreset mean s̄ = Σ(uᵢ/‖u‖₁)pᵢ."""
    require_normalized(normalized, "weak error")
    u.check_source(normalized)
    l1 = float(np.sum(np.abs(u.values)))
    if l1 == 0:
        raise InvalidArgument("weak error needs a coreset with nonzero total mass")
    s_bar = (u.values / l1) @ normalized.points[u.indices]
    snorm = float(np.dot(s_bar, s_bar))
    best = eval_cost(normalized, weighted_mean(normalized))
    ratio = eval_cost(normalized, s_bar) / best - 1.0
    return snorm, ratio


def strong_to_weak_check(normalized: WeightedSet, u: CoresetWeights, eps: float) -> bool:
    """A strong √ε-coreset with ε < 1/36 must be a weak 36ε-coreset.

    Raises:
        PreconditionUnmet: ε ≥ 1/36 or the strong error exceeds √ε.
    """
    if not 0 < eps < 1.0 / 36.0:
        raise PreconditionUnmet(f"strong-to-weak reduction needs eps < 1/36, got {eps}")
    strong = worst_case_strong_error(normalized, u)
    if strong > math.sqrt(eps):
        raise PreconditionUnmet(f"strong error {strong:.4g} exceeds sqrt(eps) = {math.sqrt(eps):.4g}")
    _, ratio = weak_error(normalized, u)
    return ratio <= 36.0 * eps


def verify_coreset(
    wset: WeightedSet,
    u: CoresetWeights,
    checks: Iterable[str] = CHECKS,
    *,
    queries: int = 1000,
    seed: int = 0,
) -> ErrorReport:
    """Fill an :class:`ErrorReport` for a coreset of a raw (possibly non-normalized) set.

    The normalized-frame oracles run on the normalized view with u mapped by 1/‖m‖₁;
    errors are invariant under that transform.
    """
    wanted = set(checks)
    unknown = wanted - set(CHECKS)
    if unknown:
        raise InvalidArgument(f"unknown checks: {sorted(unknown)}")
    u.check_source(wset)
    report = ErrorReport()
    if "empirical" in wanted:
        report.empirical = empirical_strong_error(wset, u, queries, seed)

    try:
        normalized, transform = normalize(wset)
    except DegenerateInput:
        # every query costs Σw‖q − x‖², so the relative error is constant
        total = wset.total_weight
        gap = abs(total - u.total) / total
        if "worst" in wanted:
            report.worst_case = gap
        if "weak" in wanted:
            report.weak_snorm, report.weak_ratio = 0.0, 0.0
        if "moments" in wanted:
            report.moments = MomentDiscrepancy(0.0, gap, gap)
            report.certified_eps = report.moments.certified_eps
        return report

    u_norm = renormalize_weights(u, transform)
    if "worst" in wanted:
        report.worst_case = worst_case_strong_error(normalized, u_norm)
    if "weak" in wanted and u_norm.nnz and np.sum(np.abs(u_norm.values)) > 0:
        report.weak_snorm, report.weak_ratio = weak_error(normalized, u_norm)
    if "moments" in wanted:
        report.moments = moment_check(normalized, u_norm)
        report.certified_eps = report.moments.certified_eps
    return report

