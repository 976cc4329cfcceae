"""
Deterministic coresets via Frank-Wolfe over the probability simplex.

For points in the unit ball, maximizing f(x) = −‖Σ(wᵢ − xᵢ)pᵢ‖² over the simplex
from the best vertex gives, after k steps, an iterate with at most k + 1 nonzeros
and f* − f ≤ 4·C_f/(k+3) with C_f ≤ diam² ≤ 2. f* = 0 since x = w is feasible. A normalized set is
first lifted into the unit ball with p′ = (p,1)/‖(p,1)‖², w′ = w‖(p,1)‖²/2 and the
result mapped back with u = 2u′/‖(p,1)‖².
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np

from core import CoresetWeights, InvalidArgument, WeightedSet
from normalize import require_normalized
from sampling import MODES, Mode, ceil_count

logger = logging.getLogger(__name__)

UNIT_BALL_TOL = 1e-9


@dataclass
class SimplexIterate:
    """Current simplex point x with m = Σxᵢpᵢ and residual r = Σ(wᵢ − xᵢ)pᵢ."""

    x: np.ndarray
    mean: np.ndarray
    residual: np.ndarray

    @property
    def gap(self) -> float:
        return float(np.dot(self.residual, self.residual))

    @property
    def support(self) -> int:
        return int(np.count_nonzero(self.x))


@dataclass
class FrankWolfeResult:
    weights: CoresetWeights
    residual_sq: float
    iterations: int
    history: List[float] = field(default_factory=list)
    stop_reason: str = "budget"


def iteration_budget(eps: float) -> int:
    """⌈8/ε⌉; the starting vertex counts as the first iteration."""
    return ceil_count(8.0 / eps)


def inner_eps(eps: float, mode: Mode) -> float:
    """ε passed to the unit-ball solver: (ε/4)² for strong coresets, ε/576 for weak ones."""
    if mode not in MODES:
        raise InvalidArgument(f"mode must be one of {MODES}, got {mode!r}")
    return (eps / 4.0) ** 2 if mode == "strong" else eps / 576.0


def _check_unit_ball(points: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(points, axis=1)
    if np.any(norms > 1.0 + UNIT_BALL_TOL):
        raise InvalidArgument(
            f"Frank-Wolfe coreset requires points in the unit ball (max norm {norms.max():.6g})"
        )
    outside = norms > 1.0
    if np.any(outside):
        logger.warning("rescaling %s point(s) lying just outside the unit ball", int(outside.sum()))
        points = points.copy()
        points[outside] /= norms[outside, None]
    return points


def run_frank_wolfe(
    points: Sequence | np.ndarray,
    w: Sequence[float] | np.ndarray,
    eps: float,
    *,
    max_iterations: int | None = None,
) -> FrankWolfeResult:
    """Frank-Wolfe with exact line search; returns the sparse iterate and its residual trace."""
    if not 0 < eps < 1:
        raise InvalidArgument(f"eps must lie in (0, 1), got {eps}")
    pts = _check_unit_ball(np.asarray(points, dtype=np.float64))
    wv = np.asarray(w, dtype=np.float64).reshape(-1)
    if wv.shape[0] != pts.shape[0]:
        raise InvalidArgument(f"{pts.shape[0]} points but {wv.shape[0]} weights")
    if np.any(wv < 0) or abs(wv.sum() - 1.0) > UNIT_BALL_TOL:
        raise InvalidArgument("Frank-Wolfe coreset requires a distribution w (w >= 0, sum 1)")

    n = pts.shape[0]
    budget = iteration_budget(eps) if max_iterations is None else int(max_iterations)
    target = wv @ pts

    # best single vertex: argmin_j ‖target − p_j‖
    dist = np.einsum("ij,ij->i", pts - target, pts - target)
    start = int(np.argmin(dist))
    x = np.zeros(n)
    x[start] = 1.0
    state = SimplexIterate(x=x, mean=pts[start].copy(), residual=target - pts[start])
    history = [state.gap]
    iterations = 1
    stop_reason = "budget"

    while iterations < budget:
        if state.gap == 0.0:
            stop_reason = "exact"
            break
        scores = pts @ state.residual
        best = int(np.argmax(scores))
        if scores[best] <= float(np.dot(state.mean, state.residual)):
            stop_reason = "optimal"
            break
        direction = pts[best] - state.mean
        dd = float(np.dot(direction, direction))
        if dd == 0.0:
            stop_reason = "degenerate"
            break
        alpha = min(1.0, max(0.0, float(np.dot(state.residual, direction)) / dd))
        state.x *= 1.0 - alpha
        state.x[best] += alpha
        state.mean += alpha * direction
        state.residual -= alpha * direction
        iterations += 1
        history.append(state.gap)

    support = np.flatnonzero(state.x)
    weights = CoresetWeights(n, support, state.x[support])
    logger.debug(
        "frank-wolfe: n=%s eps=%.4g iterations=%s nnz=%s residual^2=%.3e stop=%s",
        n, eps, iterations, weights.nnz, state.gap, stop_reason,
    )
    return FrankWolfeResult(weights, state.gap, iterations, history, stop_reason)


def fw_unit_ball(points: Sequence | np.ndarray, w: Sequence[float] | np.ndarray, eps: float) -> CoresetWeights:
    """Distribution ũ with ‖ũ‖₀ ≤ ⌈8/ε⌉ and ‖Σ(wᵢ − ũᵢ)pᵢ‖² ≤ ε for unit-ball points."""
    return run_frank_wolfe(points, w, eps).weights


def lift_to_unit_ball(wset: WeightedSet) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(p′, w′, ‖(p,1)‖²) for a normalized set."""
    norm_sq = 1.0 + wset.squared_norms()
    lifted = np.column_stack([wset.points, np.ones(wset.n)]) / norm_sq[:, None]
    return lifted, wset.weights * norm_sq / 2.0, norm_sq


def fw_coreset(wset: WeightedSet, eps: float, mode: Mode = "strong") -> CoresetWeights:
    """Deterministic strong or weak ε-coreset of a normalized set."""
    if not 0 < eps < 1:
        raise InvalidArgument(f"eps must lie in (0, 1), got {eps}")
    wset.require_positive_weights("Frank-Wolfe coreset")
    require_normalized(wset, "Frank-Wolfe coreset")
    lifted, lifted_w, norm_sq = lift_to_unit_ball(wset)
    # Σw′ = 1 only up to the normalization tolerance
    lifted_w = lifted_w / lifted_w.sum()
    inner = run_frank_wolfe(lifted, lifted_w, inner_eps(eps, mode))
    u_prime = inner.weights
    values = 2.0 * u_prime.values / norm_sq[u_prime.indices]
    return CoresetWeights(wset.n, u_prime.indices, values)
