"""
Logging for the CLI and benchmark scripts.

The root logger gets one rotating file in MEANCORE_LOG_DIR plus a stderr
handler. Each ``bench`` or ``stream`` invocation additionally writes its own
file under ``<MEANCORE_LOG_DIR>/runs/`` so a single run can be read back
without the noise of earlier ones.

Environment:
  MEANCORE_LOG_DIR      log directory (default: log)
  LOG_LEVEL             DEBUG, INFO, WARNING or ERROR (default: INFO)
  LOG_FILE              main log file name (default: meancore.log)
  LOG_MAX_BYTES         size rotation threshold (default: 10 MiB)
  LOG_BACKUP_COUNT      rotated files kept (default: 5)
  LOG_RETENTION_DAYS    > 0 switches to daily rotation at midnight UTC
  RUN_LOG_MAX_AGE_DAYS  > 0 prunes older per-run files when logging is configured
"""

from __future__ import annotations

import datetime
import logging
import os
import sys
import time
from contextlib import contextmanager
from dataclasses import dataclass
from logging.handlers import RotatingFileHandler, TimedRotatingFileHandler
from pathlib import Path
from typing import Iterator

from config import env_int, env_str

LOG_FORMAT = "%(asctime)s | %(levelname)-8s | %(name)s | %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

_CONFIGURED = False


@dataclass(frozen=True)
class LogSettings:
    directory: Path
    file_name: str = "meancore.log"
    max_bytes: int = 10 * 1024 * 1024
    backup_count: int = 5
    retention_days: int = 0
    run_max_age_days: int = 0

    @classmethod
    def from_env(cls) -> "LogSettings":
        return cls(
            directory=Path(env_str("MEANCORE_LOG_DIR", "log")).resolve(),
            file_name=env_str("LOG_FILE", "meancore.log"),
            max_bytes=env_int("LOG_MAX_BYTES", 10 * 1024 * 1024),
            backup_count=env_int("LOG_BACKUP_COUNT", 5),
            retention_days=env_int("LOG_RETENTION_DAYS", 0),
            run_max_age_days=env_int("RUN_LOG_MAX_AGE_DAYS", 0),
        )

    @property
    def runs_dir(self) -> Path:
        return self.directory / "runs"


@dataclass
class RunLog:
    """A per-run logger and the file it writes to."""

    logger: logging.Logger
    path: Path


def _resolve_level(level: int | str | None) -> int:
    if isinstance(level, int):
        return level
    name = str(level) if level is not None else env_str("LOG_LEVEL", "INFO")
    resolved = logging.getLevelName(name.upper())
    return resolved if isinstance(resolved, int) else logging.INFO


def _file_handler(settings: LogSettings, path: Path) -> logging.Handler:
    if settings.retention_days > 0:
        return TimedRotatingFileHandler(
            path,
            when="midnight",
            backupCount=min(366, settings.retention_days),
            encoding="utf-8",
            utc=True,
        )
    return RotatingFileHandler(
        path,
        maxBytes=settings.max_bytes,
        backupCount=settings.backup_count,
        encoding="utf-8",
    )


def _writes_to(handler: logging.Handler, path: Path) -> bool:
    target = getattr(handler, "baseFilename", None)
    return target is not None and Path(target) == path


def configure_logging(
    *,
    log_dir: str | Path | None = None,
    level: int | str | None = None,
    force: bool = False,
) -> logging.Logger:
    """Install the file and stderr handlers on the root logger; later calls are no-ops unless *force*."""
    global _CONFIGURED
    root = logging.getLogger()
    if _CONFIGURED and not force:
        return root

    settings = LogSettings.from_env()
    if log_dir is not None:
        settings = LogSettings(
            Path(log_dir).resolve(),
            settings.file_name,
            settings.max_bytes,
            settings.backup_count,
            settings.retention_days,
            settings.run_max_age_days,
        )
    level_val = _resolve_level(level)
    root.setLevel(level_val)
    formatter = logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT)

    log_path = settings.directory / settings.file_name
    if not any(_writes_to(h, log_path) for h in root.handlers):
        try:
            settings.directory.mkdir(parents=True, exist_ok=True)
            handler = _file_handler(settings, log_path)
            handler.setFormatter(formatter)
            handler.setLevel(level_val)
            root.addHandler(handler)
        except OSError as exc:
            sys.stderr.write(f"[app_logging] cannot write {log_path}: {exc}; logging to stderr only\n")

    if not any(type(h) is logging.StreamHandler for h in root.handlers):
        stream = logging.StreamHandler(sys.stderr)
        stream.setFormatter(formatter)
        stream.setLevel(level_val)
        root.addHandler(stream)

    removed = prune_run_logs(settings.runs_dir, settings.run_max_age_days)
    if removed:
        logging.getLogger(__name__).info("pruned %s run log(s) older than %s days", removed, settings.run_max_age_days)

    logging.captureWarnings(True)
    _CONFIGURED = True
    return root


def prune_run_logs(runs_dir: Path, max_age_days: int) -> int:
    """Delete ``*.log`` files in *runs_dir* last modified more than *max_age_days* ago."""
    if max_age_days <= 0 or not runs_dir.is_dir():
        return 0
    cutoff = time.time() - max_age_days * 86400
    removed = 0
    for path in runs_dir.glob("*.log"):
        try:
            if path.stat().st_mtime < cutoff:
                path.unlink()
                removed += 1
        except OSError:
            continue
    return removed


def run_log_path(kind: str, seed: int | None) -> Path:
    """``runs/YYYYMMDD-HHMMSSZ-<kind>-seed<seed>.log`` (UTC) under MEANCORE_LOG_DIR."""
    runs_dir = LogSettings.from_env().runs_dir
    runs_dir.mkdir(parents=True, exist_ok=True)
    stamp = datetime.datetime.now(datetime.timezone.utc).strftime("%Y%m%d-%H%M%SZ")
    return runs_dir / f"{stamp}-{kind}-seed{seed if seed is not None else 'none'}.log"


@contextmanager
def run_log(kind: str, seed: int | None) -> Iterator[RunLog]:
    """Logger ``run.<kind>.<seed>`` with its own file for the duration of the block.

    Records still propagate to the root handlers.
    """
    path = run_log_path(kind, seed)
    logger = logging.getLogger(f"run.{kind}.{seed}")
    logger.setLevel(logging.INFO)
    handler = logging.FileHandler(path, encoding="utf-8")
    handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT))
    logger.addHandler(handler)
    try:
        yield RunLog(logger, path)
    finally:
        logger.removeHandler(handler)
        handler.close()
