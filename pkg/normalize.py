"""
Reduction to normalized weighted sets.

A normalized set has Σw = 1, Σw·p = 0 and Σw‖p‖² = 1. Any positive-weight input
(Q, m) maps to one via p = (q − μ)/σ and w = m/‖m‖₁; a coreset u for the
normalized view becomes a coreset ‖m‖₁·u for (Q, m) with the same error.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from core import (
    CoresetWeights,
    DegenerateInput,
    InvalidArgument,
    WeightedSet,
    as_point,
    moments,
)

logger = logging.getLogger(__name__)

NORMALIZED_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class NormalizationTransform:
    mu: np.ndarray
    sigma: float
    total_mass: float

    def __post_init__(self) -> None:
        if not self.sigma > 0:
            raise InvalidArgument("normalization requires sigma > 0")
        if not self.total_mass > 0:
            raise InvalidArgument("normalization requires a positive total mass")

    def to_normalized(self, x: Sequence[float] | np.ndarray) -> np.ndarray:
        """Map a query of the source frame to the normalized frame: y = (x − μ)/σ."""
        return (as_point(x, self.mu.shape[0]) - self.mu) / self.sigma

    def to_source(self, y: Sequence[float] | np.ndarray) -> np.ndarray:
        return self.mu + self.sigma * as_point(y, self.mu.shape[0])

    @property
    def cost_scale(self) -> float:
        """cost_(Q,m)(x) = σ²·‖m‖₁·cost_(P,w)((x − μ)/σ)."""
        return self.sigma**2 * self.total_mass

    def to_dict(self) -> dict:
        return {"mu": [float(v) for v in self.mu], "sigma": self.sigma, "total_mass": self.total_mass}


def normalize(wset: WeightedSet) -> tuple[WeightedSet, NormalizationTransform]:
    """Return the normalized view of *wset* and the transform that produced it.

    Raises:
        InvalidArgument: a weight is not strictly positive.
        DegenerateInput: all points coincide (σ = 0); ``mu`` carries the common point.
    """
    wset.require_positive_weights("normalization")
    summary = moments(wset)
    mass = summary.s0
    mu = summary.s1 / mass
    centered = wset.points - mu
    w = wset.weights / mass
    variance = float(np.dot(w, np.einsum("ij,ij->i", centered, centered)))
    if not variance > 0:
        raise DegenerateInput("all points are identical; sigma is zero", mu=mu, total_mass=mass)
    sigma = float(np.sqrt(variance))
    transform = NormalizationTransform(mu=mu, sigma=sigma, total_mass=float(mass))
    return WeightedSet(centered / sigma, w), transform


def denormalize_weights(u: CoresetWeights, t: NormalizationTransform) -> CoresetWeights:
    """u′ = ‖m‖₁·u, same support."""
    return u.scaled(t.total_mass)


def renormalize_weights(u: CoresetWeights, t: NormalizationTransform) -> CoresetWeights:
    """Inverse of :func:`denormalize_weights`: express source-frame weights in the normalized frame."""
    return u.scaled(1.0 / t.total_mass)


def normalization_error(wset: WeightedSet) -> float:
    """Largest deviation from the three normalized-set conditions."""
    summary = moments(wset)
    return max(abs(summary.s0 - 1.0), float(np.linalg.norm(summary.s1)), abs(summary.s2 - 1.0))


def is_normalized(wset: WeightedSet, tol: float = NORMALIZED_TOL) -> bool:
    return normalization_error(wset) <= tol


def require_normalized(wset: WeightedSet, purpose: str, tol: float = NORMALIZED_TOL) -> None:
    err = normalization_error(wset)
    if err > tol:
        raise InvalidArgument(
            f"{purpose} requires a normalized weighted set (deviation {err:.3g} > {tol:g}); normalize first"
        )


def single_point_coreset(wset: WeightedSet) -> CoresetWeights:
    """Exact coreset of a set whose points all coincide: the full mass on one index."""
    return CoresetWeights(wset.n, np.array([0]), np.array([wset.total_weight]))
