import sys
from pathlib import Path

import numpy as np
import pytest

ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from core import WeightedSet  # noqa: E402
from normalize import normalize  # noqa: E402

_ENV_VARS = (
    "MEANCORE_SEED",
    "MEANCORE_C_CONST",
    "MEANCORE_LOG_BASE",
    "MEANCORE_COMPENSATED_SUM",
    "MEANCORE_QUERIES",
    "MEANCORE_PROFILES_DIR",
    "MEANCORE_BENCH_PROFILE",
    "MEANCORE_OUT_DIR",
    "RUN_LOG_MAX_AGE_DAYS",
)


@pytest.fixture(autouse=True)
def isolated_env(monkeypatch, tmp_path):
    for name in _ENV_VARS:
        monkeypatch.delenv(name, raising=False)
    monkeypatch.setenv("MEANCORE_LOG_DIR", str(tmp_path / "log"))
    monkeypatch.setenv("MEANCORE_OUT_DIR", str(tmp_path / "out"))


def random_set(seed, n, d, *, weighted=True):
    rng = np.random.default_rng(seed)
    points = rng.normal(0.0, 3.0, size=(n, d)) + rng.normal(0.0, 5.0, size=d)
    weights = rng.uniform(0.5, 2.0, size=n) if weighted else np.ones(n)
    return WeightedSet(points, weights)


def normalized_set(seed, n, d, *, weighted=False):
    normalized, _ = normalize(random_set(seed, n, d, weighted=weighted))
    return normalized


@pytest.fixture
def make_set():
    return random_set


@pytest.fixture
def make_normalized():
    return normalized_set
