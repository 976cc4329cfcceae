"""
Randomized strong and weak coresets for normalized weighted sets.

Sensitivity sampling draws i.i.d. indices with probability proportional to the
sensitivity bound (1 + ‖p‖²)/(2n) of a uniform normalized set. Bernstein
sampling draws with probability ∝ w(1 + ‖p‖²) and uses a sample size derived
from the matrix Bernstein inequality. Both reweight a drawn index by
multiplicity·w/(prob·size), which is unbiased for w.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from core import CoresetWeights, InvalidArgument, WeightedSet, rng_from_seed
from normalize import NORMALIZED_TOL, require_normalized

logger = logging.getLogger(__name__)

Mode = Literal["strong", "weak"]
MODES = ("strong", "weak")


def ceil_count(x: float) -> int:
    """Ceiling of a sample-size formula, immune to binary noise such as 80.00000000000001."""
    return int(math.ceil(round(float(x), 9)))


@dataclass(frozen=True)
class SamplingConfig:
    eps: float
    delta: float
    c: float = 1.0
    mode: Mode = "strong"

    def __post_init__(self) -> None:
        if not 0 < self.eps < 1:
            raise InvalidArgument(f"eps must lie in (0, 1), got {self.eps}")
        if not 0 < self.delta < 1:
            raise InvalidArgument(f"delta must lie in (0, 1), got {self.delta}")
        if not self.c > 0:
            raise InvalidArgument(f"the sampling constant c must be positive, got {self.c}")
        if self.mode not in MODES:
            raise InvalidArgument(f"mode must be one of {MODES}, got {self.mode!r}")

    def sensitivity_eps(self) -> float:
        """ε² for strong coresets, ε/36 for weak ones."""
        return self.eps**2 if self.mode == "strong" else self.eps / 36.0

    def bernstein_eps(self) -> float:
        """ε² for strong coresets, ε/144 for weak ones."""
        return self.eps**2 if self.mode == "strong" else self.eps / 144.0


def sensitivity_sample_size(d: int, cfg: SamplingConfig) -> int:
    """⌈(2c/ε′)(d + ln(1/δ))⌉; total sensitivity of the 1-mean problem is 2."""
    return ceil_count((2.0 * cfg.c / cfg.sensitivity_eps()) * (d + math.log(1.0 / cfg.delta)))


def bernstein_sample_size(d: int, cfg: SamplingConfig) -> int:
    """⌈4·ln((d+1)/δ)/ε′⌉."""
    return ceil_count(4.0 * math.log((d + 1) / cfg.delta) / cfg.bernstein_eps())


def sensitivity_distribution(wset: WeightedSet, tol: float = NORMALIZED_TOL) -> np.ndarray:
    """sᵢ = (1 + ‖pᵢ‖²)/(2n) for a uniformly weighted normalized set."""
    if not wset.uniform:
        raise InvalidArgument("sensitivity sampling requires uniform weights w = 1/n")
    require_normalized(wset, "sensitivity sampling", tol)
    return (1.0 + wset.squared_norms()) / (2.0 * wset.n)


def bernstein_distribution(wset: WeightedSet, tol: float = NORMALIZED_TOL) -> np.ndarray:
    """sᵢ = wᵢ‖(pᵢ,1)‖² / Σⱼ wⱼ‖(pⱼ,1)‖²; the denominator is 2 on normalized sets."""
    wset.require_positive_weights("Bernstein sampling")
    require_normalized(wset, "Bernstein sampling", tol)
    mass = wset.weights * (1.0 + wset.squared_norms())
    return mass / np.sum(mass)


def importance_sample(
    wset: WeightedSet,
    probs: np.ndarray,
    size: int,
    seed: int | np.random.Generator,
) -> CoresetWeights:
    """Draw *size* i.i.d. indices from *probs* and weight index i by kᵢ·wᵢ/(sᵢ·size)."""
    if size < 1:
        raise InvalidArgument("sample size must be at least 1")
    rng = rng_from_seed(seed)
    p = np.asarray(probs, dtype=np.float64)
    draws = rng.choice(wset.n, size=size, replace=True, p=p / p.sum())
    counts = np.bincount(draws, minlength=wset.n)
    idx = np.flatnonzero(counts)
    values = counts[idx] * wset.weights[idx] / (p[idx] * size)
    return CoresetWeights(wset.n, idx, values)


def _full_set(wset: WeightedSet, size: int, algo: str) -> CoresetWeights:
    logger.warning(
        "%s: sample size %s >= n=%s; returning the full weight vector", algo, size, wset.n
    )
    return CoresetWeights(wset.n, np.arange(wset.n), np.array(wset.weights), fallback=True)


def sensitivity_coreset(wset: WeightedSet, cfg: SamplingConfig, seed: int) -> CoresetWeights:
    """Sensitivity-sampling coreset of a uniformly weighted normalized set."""
    probs = sensitivity_distribution(wset)
    size = sensitivity_sample_size(wset.d, cfg)
    if size >= wset.n:
        return _full_set(wset, size, "sensitivity sampling")
    u = importance_sample(wset, probs, size, seed)
    logger.debug("sensitivity sampling: mode=%s |S|=%s nnz=%s", cfg.mode, size, u.nnz)
    return u


def bernstein_coreset(wset: WeightedSet, cfg: SamplingConfig, seed: int) -> CoresetWeights:
    """Bernstein-sampling coreset of a normalized set.

    uᵢ = 2cᵢ/(k‖(pᵢ,1)‖²), so Σuᵢ‖pᵢ‖² + Σuᵢ = 2 holds for every draw.
    """
    probs = bernstein_distribution(wset)
    size = bernstein_sample_size(wset.d, cfg)
    if size >= wset.n:
        return _full_set(wset, size, "Bernstein sampling")
    rng = rng_from_seed(seed)
    draws = rng.choice(wset.n, size=size, replace=True, p=probs)
    counts = np.bincount(draws, minlength=wset.n)
    idx = np.flatnonzero(counts)
    values = 2.0 * counts[idx] / (size * (1.0 + wset.squared_norms()[idx]))
    logger.debug("Bernstein sampling: mode=%s k=%s nnz=%s", cfg.mode, size, idx.size)
    return CoresetWeights(wset.n, idx, values)
