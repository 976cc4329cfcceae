"""
Merge-reduce composition of strong coresets over a chunked input.

Each chunk is reduced to a coreset; pairs of coresets are merged (the union of
their weighted points, which preserves the moment summary exactly) and reduced
again with the same ε, up a binary tree. With L merge levels the composed
coreset is expected to stay within (1+ε)^L − 1.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Iterator, List

import numpy as np
import pandas as pd

from builders import BuildParams, build
from core import CoresetWeights, DataError, InvalidArgument, MomentSummary, WeightedSet, derive_seed, moments

logger = logging.getLogger(__name__)

STREAM_ALGORITHMS = ("cara", "signed", "bern", "fw")


@dataclass(frozen=True, eq=False)
class StreamNode:
    """A coreset held as global indices with weights, plus the points it refers to."""

    indices: np.ndarray
    points: np.ndarray
    weights: np.ndarray

    def as_set(self) -> WeightedSet:
        return WeightedSet(self.points, self.weights)

    def summary(self) -> MomentSummary:
        return moments(self.as_set())


@dataclass(frozen=True, eq=False)
class StreamResult:
    weights: CoresetWeights
    depth: int
    leaves: int
    n: int

    def composition_bound(self, eps: float) -> float:
        return (1.0 + eps) ** self.depth - 1.0


def merge_nodes(left: StreamNode, right: StreamNode) -> StreamNode:
    """Union of two coresets over disjoint index ranges."""
    return StreamNode(
        indices=np.concatenate([left.indices, right.indices]),
        points=np.vstack([left.points, right.points]),
        weights=np.concatenate([left.weights, right.weights]),
    )


def reduce_node(node: StreamNode, algo: str, params: BuildParams, *tree_position: int) -> StreamNode:
    """Reduce one node; randomized builders get a seed derived from the node position.

    The first leaf keeps the base seed, so a single-chunk stream equals a plain build.
    """
    if any(tree_position):
        params = replace(params, seed=derive_seed(params.seed, *tree_position))
    result = build(node.as_set(), algo, params)
    u = result.weights
    return StreamNode(indices=node.indices[u.indices], points=node.points[u.indices], weights=u.values)


def iter_chunks(path: str | Path, chunk: int, *, weighted: bool = False, header: bool = False) -> Iterator[WeightedSet]:
    """Yield consecutive blocks of at most *chunk* points from a point file."""
    source = Path(path)
    try:
        reader = pd.read_csv(
            source,
            header=0 if header else None,
            comment="#",
            dtype=np.float64,
            skipinitialspace=True,
            float_precision="round_trip",
            chunksize=chunk,
        )
        for frame in reader:
            values = frame.to_numpy(dtype=np.float64)
            if weighted:
                yield WeightedSet(values[:, :-1], values[:, -1])
            else:
                yield WeightedSet(values, np.ones(values.shape[0]))
    except FileNotFoundError as exc:
        raise DataError(f"point file not found: {source}") from exc
    except (ValueError, pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise DataError(f"cannot parse point file {source}: {exc}") from exc


def merge_reduce(chunks: Iterable[WeightedSet], algo: str, params: BuildParams) -> StreamResult:
    """Reduce every chunk, then merge and re-reduce pairwise until one coreset remains."""
    if algo not in STREAM_ALGORITHMS:
        raise InvalidArgument(f"streaming needs a strong-coreset builder: one of {', '.join(STREAM_ALGORITHMS)}")
    level: List[StreamNode] = []
    offset = 0
    for part in chunks:
        leaf = StreamNode(indices=np.arange(offset, offset + part.n), points=np.array(part.points), weights=np.array(part.weights))
        level.append(reduce_node(leaf, algo, params, 0, len(level)))
        offset += part.n
    if not level:
        raise DataError("the stream contained no points")
    leaves = len(level)
    depth = 0
    while len(level) > 1:
        merged: List[StreamNode] = []
        for i in range(0, len(level) - 1, 2):
            merged.append(reduce_node(merge_nodes(level[i], level[i + 1]), algo, params, depth + 1, i // 2))
        if len(level) % 2:
            merged.append(level[-1])
        level = merged
        depth += 1
        logger.info("merge-reduce level %s: %s node(s), sizes %s", depth, len(level), [node.indices.size for node in level])
    root = level[0]
    order = np.argsort(root.indices, kind="stable")
    weights = CoresetWeights(offset, root.indices[order], root.weights[order])
    return StreamResult(weights=weights, depth=depth, leaves=leaves, n=offset)


def stream_file(
    path: str | Path,
    chunk: int,
    algo: str,
    params: BuildParams,
    *,
    weighted: bool = False,
    header: bool = False,
) -> StreamResult:
    if chunk < 2:
        raise InvalidArgument("chunk must be at least 2")
    return merge_reduce(iter_chunks(path, chunk, weighted=weighted, header=header), algo, params)


def expected_depth(n: int, chunk: int) -> int:
    """⌈log₂(number of chunks)⌉."""
    leaves = max(1, math.ceil(n / chunk))
    return math.ceil(math.log2(leaves)) if leaves > 1 else 0
