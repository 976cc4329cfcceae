"""
Algorithm registry used by the CLI, the benchmark and the streaming mode.

Every builder takes a raw weighted set. Normalized-frame constructions are run
on the normalized view and mapped back with u′ = ‖m‖₁·u; a set whose points all
coincide gets the exact one-point coreset instead.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass
from typing import Callable, Optional

from accurate import caratheodory_coreset, signed_subset_coreset, stats_coreset
from core import CoresetWeights, DegenerateInput, InvalidArgument, MomentSummary, WeightedSet
from frankwolfe import fw_coreset, inner_eps, iteration_budget
from normalize import denormalize_weights, normalize, single_point_coreset
from sampling import (
    MODES,
    SamplingConfig,
    bernstein_coreset,
    bernstein_sample_size,
    sensitivity_coreset,
    sensitivity_sample_size,
)
from sublinear import (
    chebyshev_sample_size,
    median_of_means_coreset,
    mom_group_count,
    mom_group_size,
    uniform_weak_coreset,
)

logger = logging.getLogger(__name__)

ALGORITHMS = ("stats", "cara", "signed", "sens", "bern", "fw", "uniform", "mom")
DETERMINISTIC = frozenset({"stats", "cara", "signed", "fw"})
ACCURATE = frozenset({"stats", "cara", "signed"})
WEAK_ONLY = frozenset({"uniform", "mom"})

# Accurate coresets are exact up to roundoff; the benchmark accepts this much.
ACCURATE_TOL = 1e-7


@dataclass(frozen=True)
class BuildParams:
    eps: float = 0.2
    delta: float = 0.1
    mode: str = "strong"
    seed: int = 0
    c: float = 1.0
    log_base: str = "e"

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise InvalidArgument(f"mode must be one of {MODES}, got {self.mode!r}")

    def sampling(self) -> SamplingConfig:
        return SamplingConfig(eps=self.eps, delta=self.delta, c=self.c, mode=self.mode)


@dataclass(frozen=True, eq=False)
class BuildResult:
    algo: str
    weights: Optional[CoresetWeights]
    summary: Optional[MomentSummary]
    build_ms: float
    draws: Optional[int] = None

    @property
    def nnz(self) -> int:
        """Stored entries; a moment summary counts as its d+2 numbers."""
        if self.weights is None:
            return self.summary.d + 2 if self.summary is not None else 0
        return self.weights.nnz

    def summary_line(self) -> dict:
        line = {"algo": self.algo, "nnz": self.nnz, "build_ms": round(self.build_ms, 3)}
        if self.draws is not None:
            line["draws"] = self.draws
        if self.weights is not None and self.weights.fallback:
            line["fallback"] = True
        return line


def _in_normalized_frame(
    wset: WeightedSet, build: Callable[[WeightedSet], CoresetWeights]
) -> CoresetWeights:
    try:
        normalized, transform = normalize(wset)
    except DegenerateInput:
        logger.info("input points all coincide; emitting the exact one-point coreset")
        return single_point_coreset(wset)
    return denormalize_weights(build(normalized), transform)


def _sens(wset: WeightedSet, p: BuildParams) -> CoresetWeights:
    if not wset.uniform:
        raise InvalidArgument("sensitivity sampling requires uniform weights (use bern for weighted input)")
    return _in_normalized_frame(wset, lambda s: sensitivity_coreset(s, p.sampling(), p.seed))


def _bern(wset: WeightedSet, p: BuildParams) -> CoresetWeights:
    return _in_normalized_frame(wset, lambda s: bernstein_coreset(s, p.sampling(), p.seed))


def _fw(wset: WeightedSet, p: BuildParams) -> CoresetWeights:
    return _in_normalized_frame(wset, lambda s: fw_coreset(s, p.eps, p.mode))


def _uniform(wset: WeightedSet, p: BuildParams) -> CoresetWeights:
    return uniform_weak_coreset(wset, p.eps, p.delta, p.seed)


def _mom(wset: WeightedSet, p: BuildParams) -> CoresetWeights:
    return median_of_means_coreset(wset, p.eps, p.delta, p.seed, log_base=p.log_base)


_WEIGHT_BUILDERS: dict[str, Callable[[WeightedSet, BuildParams], CoresetWeights]] = {
    "cara": lambda s, p: caratheodory_coreset(s),
    "signed": lambda s, p: signed_subset_coreset(s),
    "sens": _sens,
    "bern": _bern,
    "fw": _fw,
    "uniform": _uniform,
    "mom": _mom,
}


def build(wset: WeightedSet, algo: str, params: BuildParams) -> BuildResult:
    """Run *algo* on *wset* and time it."""
    if algo not in ALGORITHMS:
        raise InvalidArgument(f"unknown algorithm {algo!r}; choose from {', '.join(ALGORITHMS)}")
    if algo not in WEAK_ONLY:
        wset.require_finite()
    started = time.perf_counter()
    if algo == "stats":
        summary = stats_coreset(wset)
        return BuildResult(algo, None, summary, (time.perf_counter() - started) * 1000.0)
    weights = _WEIGHT_BUILDERS[algo](wset, params)
    elapsed = (time.perf_counter() - started) * 1000.0
    draws = None
    if algo == "mom" and not weights.fallback:
        draws = mom_group_count(params.delta, params.log_base) * mom_group_size(params.eps)
    elif algo == "uniform" and not weights.fallback:
        draws = chebyshev_sample_size(params.eps, params.delta)
    logger.info("built %s coreset: n=%s d=%s nnz=%s in %.2f ms", algo, wset.n, wset.d, weights.nnz, elapsed)
    return BuildResult(algo, weights, None, elapsed, draws)


def size_bound(algo: str, d: int, params: BuildParams) -> int:
    """Theoretical cardinality of each construction (the stats summary stores d+2 numbers)."""
    if algo == "stats":
        return d + 2
    if algo == "cara":
        return d + 3
    if algo == "signed":
        return d + 2
    if algo == "sens":
        return sensitivity_sample_size(d, params.sampling())
    if algo == "bern":
        return bernstein_sample_size(d, params.sampling())
    if algo == "fw":
        return iteration_budget(inner_eps(params.eps, params.mode))
    if algo == "uniform":
        return chebyshev_sample_size(params.eps, params.delta)
    if algo == "mom":
        return mom_group_size(params.eps)
    raise InvalidArgument(f"unknown algorithm {algo!r}")


def size_formula(algo: str, mode: str) -> str:
    """Human-readable size column of the summary table."""
    formulas = {
        "stats": "O(1) statistics",
        "cara": "d+3",
        "signed": "d+2",
        "sens": "(2c/eps^2)(d+ln 1/delta)" if mode == "strong" else "(72c/eps)(d+ln 1/delta)",
        "bern": "4 ln((d+1)/delta)/eps^2" if mode == "strong" else "576 ln((d+1)/delta)/eps",
        "fw": "128/eps^2" if mode == "strong" else "4608/eps",
        "uniform": "1/(eps*delta)",
        "mom": "4/eps",
    }
    return formulas[algo]


def guarantee_kind(algo: str, mode: str) -> str:
    if algo in ACCURATE:
        return "accurate"
    if algo in WEAK_ONLY:
        return "weak"
    return mode


def guarantee_target(algo: str, params: BuildParams) -> float:
    """The error each construction promises, on the scale the verifier reports.

    Weak targets are bounds on ‖s̄‖² in the normalized frame, i.e. on
    ‖mean(S) − μ‖²/σ² for the sublinear builders.
    """
    if algo in ACCURATE:
        return ACCURATE_TOL
    if algo == "uniform":
        return params.eps
    if algo == "mom":
        return 33.0 * params.eps
    if algo == "bern" and params.mode == "strong":
        return 2.0 * params.eps
    return params.eps


def is_randomized(algo: str) -> bool:
    return algo not in DETERMINISTIC


def expected_success_floor(algo: str, params: BuildParams, trials: int) -> float:
    """(1 − p_fail)·trials minus three binomial standard deviations; p_fail = 3δ for mom."""
    if not is_randomized(algo):
        return float(trials)
    fail = min(1.0, 3.0 * params.delta if algo == "mom" else params.delta)
    mean = (1.0 - fail) * trials
    return mean - 3.0 * math.sqrt(trials * fail * (1.0 - fail))
