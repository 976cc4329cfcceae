"""
Domain types for weighted 1-mean coresets: weighted sets, sparse coreset weights,
moment summaries, exact cost evaluation, and the error hierarchy shared by every
construction and oracle.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from config import compensated_sum_enabled

logger = logging.getLogger(__name__)


class CoresetError(ValueError):
    """Base class for every domain error raised by this package."""


class InvalidArgument(CoresetError):
    """Raised for malformed inputs: dimension mismatches, bad weights, out-of-range parameters."""


class DegenerateInput(CoresetError):
    """Raised when the input has zero total weight or zero spread.

    ``mu`` is the weighted mean when it is defined, so callers can emit the
    exact single-point coreset themselves.
    """

    def __init__(self, message: str, *, mu: Optional[np.ndarray] = None, total_mass: float = 0.0):
        super().__init__(message)
        self.mu = mu
        self.total_mass = total_mass


class DataError(CoresetError):
    """Raised for unparsable files and coreset indices that do not fit the input."""


class PreconditionUnmet(CoresetError):
    """Raised when a check is asked about an instance outside its stated assumptions."""


def _as_matrix(points: Sequence | np.ndarray) -> np.ndarray:
    arr = np.asarray(points, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise InvalidArgument(f"points must be a 2-d array, got shape {arr.shape}")
    return arr


def as_point(x: Sequence[float] | np.ndarray | float, d: int) -> np.ndarray:
    """Coerce a query to a length-*d* float vector."""
    arr = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if arr.ndim != 1 or arr.shape[0] != d:
        raise InvalidArgument(f"query has dimension {arr.shape}, expected ({d},)")
    if not np.all(np.isfinite(arr)):
        raise InvalidArgument("query coordinates must be finite")
    return arr


@dataclass(frozen=True, eq=False)
class WeightedSet:
    """Points ``(n, d)`` with a parallel weight vector; the input (P, w) of every construction.

    Arrays are stored read-only. ``uniform`` records whether all weights are equal,
    which the sublinear builders rely on without rescanning the weights.

    A ``lazy`` set (see :meth:`memory_mapped`) takes a broadcast constant weight
    and skips the coordinate scan; rows are checked by :meth:`require_finite`
    when a construction reads them.
    """

    points: np.ndarray
    weights: np.ndarray
    uniform: bool = field(init=False)
    lazy: bool = False

    def __post_init__(self) -> None:
        pts = _as_matrix(self.points)
        w = np.asarray(self.weights, dtype=np.float64).reshape(-1)
        if pts.shape[0] < 1 or pts.shape[1] < 1:
            raise InvalidArgument("a weighted set needs n >= 1 points of dimension d >= 1")
        if w.shape[0] != pts.shape[0]:
            raise InvalidArgument(f"{pts.shape[0]} points but {w.shape[0]} weights")
        if self.lazy:
            if w.shape[0] > 1 and w.strides[0] != 0:
                raise InvalidArgument("a lazy weighted set needs a broadcast constant weight")
            if not math.isfinite(float(w[0])):
                raise InvalidArgument("weights must be finite")
            if pts.flags.writeable:
                pts = pts.view()
                pts.flags.writeable = False
            object.__setattr__(self, "points", pts)
            object.__setattr__(self, "weights", w)
            object.__setattr__(self, "uniform", True)
            return
        if not np.all(np.isfinite(pts)):
            raise InvalidArgument("point coordinates must be finite")
        if not np.all(np.isfinite(w)):
            raise InvalidArgument("weights must be finite")
        if pts.flags.writeable:
            pts = pts.copy() if pts is self.points else pts
            pts.flags.writeable = False
        if w.flags.writeable:
            w = w.copy() if w is self.weights else w
            w.flags.writeable = False
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "uniform", bool(np.all(w == w[0])))

    @classmethod
    def unweighted(cls, points: Sequence | np.ndarray) -> "WeightedSet":
        """Uniform weights 1/n, the unweighted semantics of the sublinear results."""
        pts = _as_matrix(points)
        n = pts.shape[0]
        return cls(pts, np.full(n, 1.0 / max(n, 1)))

    @classmethod
    def memory_mapped(cls, points: np.ndarray) -> "WeightedSet":
        """Unit weights over a (possibly memory-mapped) point array, without reading it."""
        return cls(points, np.broadcast_to(1.0, np.shape(points)[:1]), lazy=True)

    def require_finite(self, rows: Optional[np.ndarray] = None) -> None:
        """Check the coordinates of *rows* (all rows when omitted); a no-op on eagerly checked sets."""
        if not self.lazy:
            return
        block = self.points if rows is None else self.points[np.unique(np.asarray(rows, dtype=np.int64))]
        if not np.all(np.isfinite(block)):
            raise DataError("point coordinates must be finite")

    @property
    def n(self) -> int:
        return int(self.points.shape[0])

    @property
    def d(self) -> int:
        return int(self.points.shape[1])

    @property
    def total_weight(self) -> float:
        return float(np.sum(self.weights))

    def has_positive_weights(self) -> bool:
        return bool(np.all(self.weights > 0))

    def require_positive_weights(self, purpose: str) -> None:
        if not self.has_positive_weights():
            raise InvalidArgument(f"{purpose} requires strictly positive weights")

    def squared_norms(self) -> np.ndarray:
        return np.einsum("ij,ij->i", self.points, self.points)

    def subset(self, indices: Sequence[int] | np.ndarray) -> "WeightedSet":
        idx = np.asarray(indices, dtype=np.int64)
        return WeightedSet(self.points[idx], self.weights[idx])

    def __len__(self) -> int:
        return self.n


@dataclass(frozen=True, eq=False)
class CoresetWeights:
    """Sparse reweighting u over the indices of a source set of size ``n``.

    Indices are 0-based and strictly increasing. The cardinality of the coreset
    is the number of stored entries. ``fallback`` marks outputs where the
    requested sample would have been at least as large as the data, so the full
    weight vector was returned instead.
    """

    n: int
    indices: np.ndarray
    values: np.ndarray
    fallback: bool = False

    def __post_init__(self) -> None:
        idx = np.asarray(self.indices, dtype=np.int64).reshape(-1)
        vals = np.asarray(self.values, dtype=np.float64).reshape(-1)
        if idx.shape != vals.shape:
            raise InvalidArgument("coreset indices and values differ in length")
        if idx.size:
            if idx.min() < 0 or idx.max() >= self.n:
                raise DataError(f"coreset index out of range for a source of size {self.n}")
            if np.any(np.diff(idx) <= 0):
                order = np.argsort(idx, kind="stable")
                idx, vals = idx[order], vals[order]
                if np.any(np.diff(idx) == 0):
                    raise DataError("coreset indices must be unique")
        if not np.all(np.isfinite(vals)):
            raise InvalidArgument("coreset weights must be finite")
        idx.flags.writeable = False
        vals.flags.writeable = False
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_dense(cls, u: Sequence[float] | np.ndarray, *, fallback: bool = False) -> "CoresetWeights":
        """Keep the nonzero entries of a dense length-n vector."""
        dense = np.asarray(u, dtype=np.float64).reshape(-1)
        idx = np.flatnonzero(dense)
        return cls(dense.shape[0], idx, dense[idx], fallback=fallback)

    @classmethod
    def from_mapping(cls, entries: dict[int, float], n: int) -> "CoresetWeights":
        keys = sorted(entries)
        return cls(n, np.asarray(keys, dtype=np.int64), np.asarray([entries[k] for k in keys]))

    @classmethod
    def identity(cls, source: WeightedSet) -> "CoresetWeights":
        """The trivial coreset u = w (zero weights dropped)."""
        return cls.from_dense(source.weights)

    @property
    def nnz(self) -> int:
        return int(self.indices.size)

    @property
    def total(self) -> float:
        return float(np.sum(self.values))

    def to_dense(self) -> np.ndarray:
        dense = np.zeros(self.n, dtype=np.float64)
        dense[self.indices] = self.values
        return dense

    def as_dict(self) -> dict[int, float]:
        return {int(i): float(v) for i, v in zip(self.indices, self.values)}

    def scaled(self, factor: float) -> "CoresetWeights":
        return CoresetWeights(self.n, self.indices, self.values * float(factor), fallback=self.fallback)

    def check_source(self, source: WeightedSet) -> None:
        if source.n != self.n:
            raise DataError(f"coreset was built for {self.n} points, source has {source.n}")

    def support_set(self, source: WeightedSet) -> WeightedSet:
        """The weighted subset (Q, u) restricted to the support of u."""
        self.check_source(source)
        return WeightedSet(source.points[self.indices], self.values)

    def moments_of(self, source: WeightedSet) -> "MomentSummary":
        self.check_source(source)
        if self.nnz == 0:
            return MomentSummary(0.0, np.zeros(source.d), 0.0)
        return moments(self.support_set(source))


@dataclass(frozen=True, eq=False)
class MomentSummary:
    """(Σw, Σw·p, Σw‖p‖²): sufficient statistics for every 1-mean cost evaluation."""

    s0: float
    s1: np.ndarray
    s2: float

    @property
    def d(self) -> int:
        return int(np.asarray(self.s1).shape[0])

    def cost(self, x: Sequence[float] | np.ndarray) -> float:
        """s2 − 2x·s1 + s0‖x‖², clipped at zero against roundoff."""
        xv = as_point(x, self.d)
        return max(0.0, float(self.s2 - 2.0 * np.dot(xv, self.s1) + self.s0 * np.dot(xv, xv)))

    def mean(self) -> np.ndarray:
        if self.s0 == 0:
            raise DegenerateInput("total weight is zero; the weighted mean is undefined")
        return np.asarray(self.s1, dtype=np.float64) / self.s0

    def __add__(self, other: "MomentSummary") -> "MomentSummary":
        if self.d != other.d:
            raise InvalidArgument("cannot merge summaries of different dimension")
        return MomentSummary(self.s0 + other.s0, np.asarray(self.s1) + np.asarray(other.s1), self.s2 + other.s2)

    def to_dict(self) -> dict:
        return {"s0": float(self.s0), "s1": [float(v) for v in self.s1], "s2": float(self.s2)}

    @classmethod
    def from_dict(cls, data: dict) -> "MomentSummary":
        return cls(float(data["s0"]), np.asarray(data["s1"], dtype=np.float64), float(data["s2"]))


def _fsum_columns(values: np.ndarray) -> np.ndarray:
    return np.array([math.fsum(col) for col in values.T], dtype=np.float64)


def eval_cost(wset: WeightedSet, x: Sequence[float] | np.ndarray) -> float:
    """Σ wᵢ‖pᵢ − x‖² by direct summation."""
    xv = as_point(x, wset.d)
    diff = wset.points - xv
    return float(np.dot(wset.weights, np.einsum("ij,ij->i", diff, diff)))


def moments(wset: WeightedSet, *, compensated: Optional[bool] = None) -> MomentSummary:
    """Exact (s0, s1, s2) in one pass.

    Compensated summation follows MEANCORE_COMPENSATED_SUM unless *compensated*
    is given explicitly.
    """
    if wset.n == 0:
        raise InvalidArgument("moments of an empty set are undefined")
    wset.require_finite()
    if compensated is None:
        compensated = compensated_sum_enabled(wset.n)
    w = wset.weights
    sq = wset.squared_norms()
    if compensated:
        s0 = math.fsum(w)
        s1 = _fsum_columns(w[:, None] * wset.points)
        s2 = math.fsum(w * sq)
    else:
        s0 = float(np.sum(w))
        s1 = w @ wset.points
        s2 = float(np.dot(w, sq))
    return MomentSummary(float(s0), np.asarray(s1, dtype=np.float64), float(s2))


def weighted_mean(wset: WeightedSet) -> np.ndarray:
    """s1 / s0, the unconstrained 1-mean."""
    summary = moments(wset)
    if summary.s0 == 0:
        raise DegenerateInput("total weight is zero; the weighted mean is undefined")
    return summary.s1 / summary.s0


def weighted_variance(wset: WeightedSet) -> float:
    """Mean squared deviation Σwᵢ‖pᵢ − μ‖² / Σwᵢ, computed around the mean."""
    mu = weighted_mean(wset)
    return eval_cost(wset, mu) / wset.total_weight


def derive_seed(base: int, *counters: int) -> int:
    """Counter-based child seed: independent, reproducible streams per (base, counters)."""
    seq = np.random.SeedSequence([int(base) & 0xFFFFFFFFFFFFFFFF, *[int(c) for c in counters]])
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def rng_from_seed(seed: int | np.random.Generator) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(int(seed) & 0xFFFFFFFFFFFFFFFF)


def merge_coresets(parts: Iterable[CoresetWeights], n: int) -> CoresetWeights:
    """Sum sparse weight vectors defined over the same index space."""
    dense = np.zeros(n, dtype=np.float64)
    for part in parts:
        if part.n != n:
            raise InvalidArgument("cannot merge coresets over different index spaces")
        np.add.at(dense, part.indices, part.values)
    return CoresetWeights.from_dense(dense)
