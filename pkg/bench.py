"""
Benchmark matrix: seeded trials per (algorithm, ε) cell, each verified by the oracles.

Profiles are YAML files in the profiles directory:

    name: matrix
    dataset: {distribution: gaussian, n: 10000, d: 5, seed: 0}
    algos: [stats, cara, signed, sens, bern, fw, uniform, mom]
    eps: [0.5, 0.2]
    delta: 0.1
    mode: strong
    trials: 20

Reports are written as JSON (machine-readable) and CSV (the human table).
"""

from __future__ import annotations

import glob
import json
import logging
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence

import pandas as pd
import yaml
from tqdm import tqdm

from builders import (
    ACCURATE,
    ACCURATE_TOL,
    ALGORITHMS,
    WEAK_ONLY,
    BuildParams,
    build,
    expected_success_floor,
    guarantee_kind,
    guarantee_target,
    size_bound,
    size_formula,
)
from core import CoresetError, InvalidArgument, WeightedSet, derive_seed
from datasets import DatasetSpec, generate
from verify import summary_strong_error, verify_coreset

logger = logging.getLogger(__name__)

DEFAULT_PROFILE = {
    "name": "quick",
    "description": "Every algorithm once at a single eps on a small Gaussian set.",
    "dataset": {"distribution": "gaussian", "n": 2000, "d": 3, "seed": 0},
    "algos": list(ALGORITHMS),
    "eps": [0.5],
    "delta": 0.1,
    "mode": "strong",
    "trials": 5,
}


@dataclass
class BenchCell:
    """One row of the report; errors and nnz are maxima over the trials."""

    algo: str
    type: str
    mode: str
    target_eps: float
    delta: float
    n: int
    d: int
    trials: int
    seed: int
    size_formula: str
    size_bound: int
    nnz: int = 0
    build_time_ms: float = 0.0
    worst_error: Optional[float] = None
    empirical_error: Optional[float] = None
    weak_ratio: Optional[float] = None
    success_count: int = 0
    failures: int = 0
    last_error: Optional[str] = None
    success_floor: float = 0.0

    @property
    def meets_floor(self) -> bool:
        return self.failures == 0 and self.success_count >= self.success_floor

    def to_row(self) -> dict:
        return asdict(self)


@dataclass
class BenchProfile:
    name: str
    dataset: DatasetSpec
    algos: List[str]
    eps: List[float]
    delta: float = 0.1
    mode: str = "strong"
    trials: int = 10
    seed: int = 0
    queries: int = 1000
    c: float = 1.0
    log_base: str = "e"
    description: str = ""
    extra: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise InvalidArgument("trials must be at least 1")
        unknown = [a for a in self.algos if a not in ALGORITHMS]
        if unknown:
            raise InvalidArgument(f"unknown algorithm(s) {unknown}; choose from {', '.join(ALGORITHMS)}")
        if not self.eps:
            raise InvalidArgument("a benchmark needs at least one eps value")

    @classmethod
    def from_dict(cls, data: dict, *, seed: Optional[int] = None) -> "BenchProfile":
        data = dict(data)
        dataset = data.pop("dataset", None) or {}
        eps = data.pop("eps", [0.5])
        if isinstance(eps, (int, float)):
            eps = [eps]
        known = {f for f in cls.__dataclass_fields__ if f not in {"dataset", "eps", "extra"}}
        kwargs = {k: data.pop(k) for k in list(data) if k in known}
        if seed is not None:
            kwargs["seed"] = seed
        return cls(
            dataset=DatasetSpec(**dataset),
            eps=[float(e) for e in eps],
            extra=data,
            **kwargs,
        )


def load_profiles_from_directory(profiles_dir: str = "profiles") -> Dict[str, dict]:
    """Load benchmark profiles from YAML files; the built-in ``quick`` profile is always present.

    Files without a ``name`` field or that fail to parse are skipped with a warning.
    """
    profiles = {DEFAULT_PROFILE["name"]: DEFAULT_PROFILE}
    if not os.path.isdir(profiles_dir):
        logger.warning("Profiles directory '%s' not found; using the built-in profile", profiles_dir)
        return profiles

    profile_files = glob.glob(os.path.join(profiles_dir, "*.yaml"))
    profile_files.extend(glob.glob(os.path.join(profiles_dir, "*.yml")))
    for profile_file in sorted(profile_files):
        try:
            with open(profile_file, "r", encoding="utf-8") as f:
                profile_data = yaml.safe_load(f) or {}
        except (OSError, yaml.YAMLError) as exc:
            logger.warning("Cannot load profile '%s': %s", profile_file, exc)
            continue
        if not isinstance(profile_data, dict) or not profile_data.get("name"):
            logger.warning("Profile file '%s' missing 'name' field. Skipping.", profile_file)
            continue
        profiles[profile_data["name"]] = profile_data
    return profiles


def load_profile(name: str, profiles_dir: str = "profiles", *, seed: Optional[int] = None) -> BenchProfile:
    profiles = load_profiles_from_directory(profiles_dir)
    if name not in profiles:
        raise InvalidArgument(f"unknown bench profile {name!r}; available: {', '.join(sorted(profiles))}")
    return BenchProfile.from_dict(profiles[name], seed=seed)


def _max(current: Optional[float], value: Optional[float]) -> Optional[float]:
    if value is None:
        return current
    return value if current is None else max(current, value)


def _trial_passes(kind: str, target: float, worst: Optional[float], ratio: Optional[float]) -> bool:
    if kind in {"accurate", "strong"}:
        return worst is not None and worst <= target
    return ratio is not None and ratio <= target


def run_cell(
    wset: WeightedSet,
    algo: str,
    params: BuildParams,
    trials: int,
    *,
    queries: int = 1000,
    cell_index: int = 0,
    progress: bool = False,
) -> BenchCell:
    """Run *trials* seeded builds of *algo* and verify each.

    Trial t of cell c uses derive_seed(params.seed, c, t). Strong and accurate
    cells are judged by the exact worst-case oracle, weak cells by the weak ratio.
    """
    kind = guarantee_kind(algo, params.mode)
    target = guarantee_target(algo, params)
    cell = BenchCell(
        algo=algo,
        type=kind,
        mode="weak" if algo in WEAK_ONLY else params.mode,
        target_eps=0.0 if algo in ACCURATE else params.eps,
        delta=params.delta,
        n=wset.n,
        d=wset.d,
        trials=trials,
        seed=params.seed,
        size_formula=size_formula(algo, params.mode),
        size_bound=size_bound(algo, wset.d, params),
        success_floor=expected_success_floor(algo, params, trials),
    )
    checks = ["worst", "weak"] if kind != "accurate" else ["worst"]
    if queries > 0:
        checks.append("empirical")
    total_ms = 0.0
    completed = 0
    for trial in tqdm(range(trials), desc=f"{algo} eps={params.eps}", disable=not progress, leave=False):
        trial_seed = derive_seed(params.seed, cell_index, trial)
        trial_params = BuildParams(
            eps=params.eps,
            delta=params.delta,
            mode=params.mode,
            seed=trial_seed,
            c=params.c,
            log_base=params.log_base,
        )
        try:
            result = build(wset, algo, trial_params)
            if result.summary is not None:
                worst = summary_strong_error(wset, result.summary)
                ratio = None
                cell.worst_error = _max(cell.worst_error, worst)
            else:
                report = verify_coreset(wset, result.weights, checks, queries=queries, seed=trial_seed)
                worst, ratio = report.worst_case, report.weak_ratio
                cell.worst_error = _max(cell.worst_error, worst)
                cell.empirical_error = _max(cell.empirical_error, report.empirical)
                cell.weak_ratio = _max(cell.weak_ratio, ratio)
            cell.nnz = max(cell.nnz, result.nnz)
        except CoresetError as exc:
            cell.failures += 1
            cell.last_error = str(exc)
            logger.warning("%s trial %s failed: %s", algo, trial, exc)
            continue
        completed += 1
        total_ms += result.build_ms
        if _trial_passes(kind, ACCURATE_TOL if kind == "accurate" else target, worst, ratio):
            cell.success_count += 1
    if completed:
        cell.build_time_ms = total_ms / completed
    logger.info(
        "cell %s eps=%s: %s/%s passed (floor %.1f), max nnz %s",
        algo,
        params.eps,
        cell.success_count,
        trials,
        cell.success_floor,
        cell.nnz,
    )
    return cell


def run_bench(
    wset: WeightedSet,
    algos: Sequence[str],
    eps_grid: Iterable[float],
    *,
    delta: float = 0.1,
    mode: str = "strong",
    trials: int = 10,
    seed: int = 0,
    queries: int = 1000,
    c: float = 1.0,
    log_base: str = "e",
    progress: bool = False,
) -> List[BenchCell]:
    """The full (algorithm × ε) matrix. Accurate builders ignore ε and run once per algorithm."""
    if trials < 1:
        raise InvalidArgument("trials must be at least 1")
    cells: List[BenchCell] = []
    cell_index = 0
    for algo in algos:
        grid = [0.5] if algo in ACCURATE else list(eps_grid)
        for eps in grid:
            params = BuildParams(eps=eps, delta=delta, mode=mode, seed=seed, c=c, log_base=log_base)
            cells.append(run_cell(wset, algo, params, trials, queries=queries, cell_index=cell_index, progress=progress))
            cell_index += 1
    return cells


def run_profile(profile: BenchProfile, *, progress: bool = False) -> List[BenchCell]:
    wset = generate(profile.dataset)
    logger.info("bench profile %s: n=%s d=%s, %s algorithm(s)", profile.name, wset.n, wset.d, len(profile.algos))
    return run_bench(
        wset,
        profile.algos,
        profile.eps,
        delta=profile.delta,
        mode=profile.mode,
        trials=profile.trials,
        seed=profile.seed,
        queries=profile.queries,
        c=profile.c,
        log_base=profile.log_base,
        progress=progress,
    )


def write_report(cells: Sequence[BenchCell], out: str | Path) -> tuple[Path, Path]:
    """Write ``<out>.json`` and ``<out>.csv``; returns both paths."""
    stem = Path(out)
    if stem.suffix in {".json", ".csv"}:
        stem = stem.with_suffix("")
    rows = [cell.to_row() for cell in cells]
    json_path = stem.with_suffix(".json")
    csv_path = stem.with_suffix(".csv")
    try:
        stem.parent.mkdir(parents=True, exist_ok=True)
        json_path.write_text(json.dumps({"cells": rows}, indent=2) + "\n", encoding="utf-8")
        pd.DataFrame(rows).to_csv(csv_path, index=False, float_format="%.6g", lineterminator="\n")
    except OSError as exc:
        raise OSError(f"cannot write bench report {stem}: {exc}") from exc
    return json_path, csv_path


def violations(cells: Sequence[BenchCell]) -> List[BenchCell]:
    """Cells whose success count falls below the binomial floor or that had failing trials."""
    return [cell for cell in cells if not cell.meets_floor]
