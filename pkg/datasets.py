"""
Synthetic datasets and the on-disk formats used by the CLI.

Point file: UTF-8 CSV, one point per row, d comma-separated floats, optional final
weight column, ``#`` comment lines ignored, optional header row. ``.npy`` point
files are opened memory-mapped.

Coreset file: CSV rows ``index,weight`` with 1-based indices.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd

from core import CoresetWeights, DataError, InvalidArgument, MomentSummary, WeightedSet, weighted_mean, weighted_variance

logger = logging.getLogger(__name__)

DISTRIBUTIONS = ("gaussian", "uniform-cube", "student-t", "clustered", "from-file")


@dataclass(frozen=True)
class DatasetSpec:
    distribution: str = "gaussian"
    n: int = 1000
    d: int = 2
    seed: int = 0
    weighted: bool = False
    df: float = 3.0
    clusters: int = 3
    path: Optional[str] = None

    def __post_init__(self) -> None:
        if self.distribution not in DISTRIBUTIONS:
            raise InvalidArgument(f"unknown distribution {self.distribution!r}; choose from {DISTRIBUTIONS}")
        if self.distribution == "from-file":
            if not self.path:
                raise InvalidArgument("from-file datasets need a path")
            return
        if self.n < 2:
            raise InvalidArgument("datasets need n >= 2")
        if self.d < 1:
            raise InvalidArgument("datasets need d >= 1")


def generate(spec: DatasetSpec) -> WeightedSet:
    """Deterministic sample for *spec*; weights are 1 unless ``spec.weighted``."""
    if spec.distribution == "from-file":
        return read_points(spec.path, weighted=spec.weighted)
    rng = np.random.default_rng(spec.seed)
    n, d = spec.n, spec.d
    if spec.distribution == "gaussian":
        points = rng.standard_normal((n, d))
    elif spec.distribution == "uniform-cube":
        points = rng.uniform(-1.0, 1.0, size=(n, d))
    elif spec.distribution == "student-t":
        points = rng.standard_t(spec.df, size=(n, d))
    else:
        centers = rng.normal(0.0, 10.0, size=(spec.clusters, d))
        labels = rng.integers(0, spec.clusters, size=n)
        points = centers[labels] + rng.standard_normal((n, d))
    weights = rng.uniform(0.5, 2.0, size=n) if spec.weighted else np.ones(n)
    return WeightedSet(points, weights)


def describe(wset: WeightedSet) -> dict:
    """Full-pass summary printed by ``gen``: shape, mass, mean and mean squared deviation."""
    return {
        "n": wset.n,
        "d": wset.d,
        "total_weight": wset.total_weight,
        "mean": [float(v) for v in weighted_mean(wset)],
        "variance": weighted_variance(wset),
    }


def write_points(path: str | Path, wset: WeightedSet, *, weighted: bool = False) -> Path:
    target = Path(path)
    frame = pd.DataFrame(wset.points)
    if weighted:
        frame[wset.d] = wset.weights
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(target, header=False, index=False, lineterminator="\n")
    except OSError as exc:
        raise OSError(f"cannot write point file {target}: {exc}") from exc
    return target


def read_points(path: str | Path, *, weighted: bool = False, header: bool = False) -> WeightedSet:
    """Load a point file; weights default to 1 when the file has no weight column."""
    source = Path(path)
    if source.suffix == ".npy":
        try:
            points = np.load(source, mmap_mode="r")
        except (OSError, ValueError) as exc:
            raise DataError(f"cannot read point file {source}: {exc}") from exc
        try:
            return WeightedSet.memory_mapped(points)
        except InvalidArgument as exc:
            raise DataError(f"{source}: {exc}") from exc
    try:
        frame = pd.read_csv(
            source,
            header=0 if header else None,
            comment="#",
            dtype=np.float64,
            skipinitialspace=True,
            float_precision="round_trip",
        )
    except FileNotFoundError as exc:
        raise DataError(f"point file not found: {source}") from exc
    except (ValueError, pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise DataError(f"cannot parse point file {source}: {exc}") from exc
    values = frame.to_numpy(dtype=np.float64)
    if values.shape[0] == 0:
        raise DataError(f"point file {source} has no rows")
    if weighted:
        if values.shape[1] < 2:
            raise DataError(f"{source}: --weighted needs at least one coordinate and a weight column")
        points, weights = values[:, :-1], values[:, -1]
    else:
        points, weights = values, np.ones(values.shape[0])
    try:
        return WeightedSet(points, weights)
    except InvalidArgument as exc:
        raise DataError(f"{source}: {exc}") from exc


def write_coreset(path: str | Path, u: CoresetWeights) -> Path:
    target = Path(path)
    frame = pd.DataFrame({"index": u.indices + 1, "weight": u.values})
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(target, header=False, index=False, lineterminator="\n")
    except OSError as exc:
        raise OSError(f"cannot write coreset file {target}: {exc}") from exc
    return target


def read_coreset(path: str | Path, n: int) -> CoresetWeights:
    """Load ``index,weight`` rows against a source of *n* points."""
    source = Path(path)
    try:
        frame = pd.read_csv(source, header=None, comment="#", names=["index", "weight"], float_precision="round_trip")
    except FileNotFoundError as exc:
        raise DataError(f"coreset file not found: {source}") from exc
    except pd.errors.EmptyDataError:
        return CoresetWeights(n, np.array([], dtype=np.int64), np.array([]))
    except (ValueError, pd.errors.ParserError) as exc:
        raise DataError(f"cannot parse coreset file {source}: {exc}") from exc
    try:
        raw_indices = frame["index"].to_numpy(dtype=np.float64)
        weights = frame["weight"].to_numpy(dtype=np.float64)
    except (ValueError, TypeError) as exc:
        raise DataError(f"cannot parse coreset file {source}: {exc}") from exc
    if not np.all(np.isfinite(raw_indices)) or np.any(raw_indices != np.floor(raw_indices)):
        raise DataError(f"{source}: coreset indices must be integers")
    indices = raw_indices.astype(np.int64) - 1
    if indices.size and (indices.min() < 0 or indices.max() >= n):
        raise DataError(f"{source}: coreset index out of range for {n} input points")
    return CoresetWeights(n, indices, weights)


def write_summary(path: str | Path, summary: MomentSummary) -> Path:
    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(json.dumps(summary.to_dict()) + "\n", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write summary file {target}: {exc}") from exc
    return target


def read_summary(path: str | Path) -> MomentSummary:
    source = Path(path)
    try:
        return MomentSummary.from_dict(json.loads(source.read_text(encoding="utf-8")))
    except FileNotFoundError as exc:
        raise DataError(f"summary file not found: {source}") from exc
    except (ValueError, KeyError) as exc:
        raise DataError(f"cannot parse summary file {source}: {exc}") from exc


