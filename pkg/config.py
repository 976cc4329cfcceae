"""Environment-driven settings for the CLI and the numerical defaults."""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional

from dotenv import load_dotenv

_LOG_BASES = {"e", "2", "10"}


def env_str(name: str, default: str) -> str:
    value = os.getenv(name)
    if value is None or not value.strip():
        return default
    return value.strip()


def env_int(name: str, default: int) -> int:
    raw = os.getenv(name, "").strip()
    if not raw:
        return default
    try:
        return int(raw)
    except ValueError:
        return default


def env_float(name: str, default: float) -> float:
    raw = os.getenv(name, "").strip()
    if not raw:
        return default
    try:
        return float(raw)
    except ValueError:
        return default


def compensated_sum_enabled(n: int) -> bool:
    """Whether moment accumulation should use compensated summation for *n* points.

    MEANCORE_COMPENSATED_SUM: ``auto`` (default, on above one million points),
    ``on`` or ``off``.
    """
    mode = env_str("MEANCORE_COMPENSATED_SUM", "auto").lower()
    if mode in {"1", "true", "yes", "on"}:
        return True
    if mode in {"0", "false", "no", "off"}:
        return False
    return n > 1_000_000


@dataclass(frozen=True)
class Settings:
    seed: int = 0
    c_const: float = 1.0
    log_base: str = "e"
    queries: int = 1000
    profiles_dir: str = "profiles"
    bench_profile: str = "matrix"
    out_dir: str = "out"

    @classmethod
    def from_env(cls, *, dotenv: bool = True) -> "Settings":
        """Resolve settings from the environment (and `.env` unless *dotenv* is false)."""
        if dotenv:
            load_dotenv()
        log_base = env_str("MEANCORE_LOG_BASE", "e").lower()
        if log_base not in _LOG_BASES:
            log_base = "e"
        return cls(
            seed=env_int("MEANCORE_SEED", 0),
            c_const=env_float("MEANCORE_C_CONST", 1.0),
            log_base=log_base,
            queries=env_int("MEANCORE_QUERIES", 1000),
            profiles_dir=env_str("MEANCORE_PROFILES_DIR", "profiles"),
            bench_profile=env_str("MEANCORE_BENCH_PROFILE", "matrix"),
            out_dir=env_str("MEANCORE_OUT_DIR", "out"),
        )


def resolve_seed(flag_value: Optional[int], settings: Settings) -> int:
    """Flag beats MEANCORE_SEED; MEANCORE_SEED beats the built-in default."""
    if flag_value is not None:
        return int(flag_value)
    return settings.seed
