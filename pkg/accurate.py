"""
Zero-error coresets.

* ``stats_coreset`` keeps (Σw, Σw·p, Σw‖p‖²); every cost is recovered from it.
* ``caratheodory_coreset`` keeps at most d+3 input points with nonnegative weights.
* ``signed_subset_coreset`` keeps at most d+2 input points with signed weights.

Both subset constructions match the three moments on the lifted points
h = (pᵀ, ‖p‖², 1) ∈ ℝ^{d+2}, taken after centering and rescaling the input. The
conditions in that frame are an invertible linear map of the raw ones, so the
indices and weights found there are exact for the raw points.
"""

from __future__ import annotations

import logging
from typing import Sequence

import numpy as np
from scipy.linalg import null_space, qr

from core import CoresetWeights, InvalidArgument, MomentSummary, WeightedSet, as_point, moments

logger = logging.getLogger(__name__)

# Relative threshold on |R_ii| when counting independent lifted columns.
_RANK_RTOL = 1e-10


def lift(points: np.ndarray) -> np.ndarray:
    """Rows h = (p, ‖p‖², 1)."""
    pts = np.asarray(points, dtype=np.float64)
    sq = np.einsum("ij,ij->i", pts, pts)
    return np.column_stack([pts, sq, np.ones(pts.shape[0])])


def conditioned_lift(points: np.ndarray) -> np.ndarray:
    """Lift of (p − c)/s with c the unweighted centroid and s the RMS distance to it."""
    pts = np.asarray(points, dtype=np.float64)
    shifted = pts - pts.mean(axis=0)
    spread = float(np.sqrt(np.mean(np.einsum("ij,ij->i", shifted, shifted))))
    if spread > 0:
        shifted /= spread
    return lift(shifted)


def stats_coreset(wset: WeightedSet) -> MomentSummary:
    return moments(wset)


def eval_from_summary(s: MomentSummary, x: Sequence[float] | np.ndarray) -> float:
    """s2 − 2x·s1 + s0‖x‖² in O(d)."""
    as_point(x, s.d)
    return s.cost(x)


def caratheodory_coreset(wset: WeightedSet) -> CoresetWeights:
    """Nonnegative accurate coreset with at most d+3 points.

    Works on a window of d+3 active points: their lifted vectors are linearly
    dependent in ℝ^{d+2}, so a null vector v exists; shifting the weights along
    −αv keeps all three moments and zeroes at least one weight. The window is
    refilled from the remaining active points until none are left.
    """
    if np.any(wset.weights < 0):
        raise InvalidArgument("Caratheodory reduction requires nonnegative weights")
    n, d = wset.n, wset.d
    window_size = d + 3
    u = np.array(wset.weights, dtype=np.float64)
    if n <= window_size:
        return CoresetWeights(n, np.arange(n), u)

    lifted = conditioned_lift(wset.points)
    pending = iter(np.flatnonzero(u > 0).tolist())
    window: list[int] = []
    rounds = 0

    def refill() -> None:
        while len(window) < window_size:
            nxt = next(pending, None)
            if nxt is None:
                return
            window.append(nxt)

    refill()
    while len(window) == window_size:
        idx = np.asarray(window)
        basis = null_space(lifted[idx].T)
        if basis.shape[1] == 0:
            # numerically independent window; cannot happen for d+3 vectors in d+2 dimensions
            break
        v = basis[:, 0]
        if not np.any(v > 0):
            v = -v
        positive = v > 0
        ratios = np.full(window_size, np.inf)
        ratios[positive] = u[idx[positive]] / v[positive]
        alpha = ratios.min()
        u[idx] -= alpha * v
        # lowest index among the weights that hit zero
        hit = idx[ratios == alpha]
        u[hit.min()] = 0.0
        u[idx[u[idx] < 0]] = 0.0
        window = [i for i in window if u[i] > 0]
        rounds += 1
        refill()

    logger.debug("caratheodory: n=%s d=%s rounds=%s kept=%s", n, d, rounds, len(window))
    keep = np.flatnonzero(u > 0)
    return CoresetWeights(n, keep, u[keep])


def signed_subset_coreset(wset: WeightedSet) -> CoresetWeights:
    """Accurate coreset with at most d+2 points and weights of any sign.

    Column-pivoted elimination on the (d+2)×n lifted matrix picks a maximal set
    of independent columns; the lifted moment vector is then solved for on
    those columns. Rank-deficient inputs keep only rank-many points.
    """
    n, d = wset.n, wset.d
    if n <= d + 2:
        return CoresetWeights(n, np.arange(n), np.array(wset.weights))

    a = conditioned_lift(wset.points).T
    target = a @ wset.weights
    _, r, piv = qr(a, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    if diag.size == 0 or diag[0] == 0:
        return CoresetWeights(n, np.array([], dtype=np.int64), np.array([]))
    rank = int(np.sum(diag > _RANK_RTOL * diag[0]))
    cols = np.sort(piv[:rank])
    coef, *_ = np.linalg.lstsq(a[:, cols], target, rcond=None)
    logger.debug("signed subset: n=%s d=%s rank=%s", n, d, rank)
    keep = coef != 0
    return CoresetWeights(n, cols[keep], coef[keep])
