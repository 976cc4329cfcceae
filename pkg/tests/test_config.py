import logging
import os

import pytest

import app_logging
from config import Settings, compensated_sum_enabled, env_float, env_int, env_str, resolve_seed


def test_defaults_without_environment():
    settings = Settings.from_env(dotenv=False)

    assert settings.seed == 0
    assert settings.c_const == 1.0
    assert settings.log_base == "e"
    assert settings.bench_profile == "matrix"


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("MEANCORE_SEED", "42")
    monkeypatch.setenv("MEANCORE_C_CONST", "2.5")
    monkeypatch.setenv("MEANCORE_LOG_BASE", "10")
    monkeypatch.setenv("MEANCORE_QUERIES", "77")

    settings = Settings.from_env(dotenv=False)

    assert settings.seed == 42
    assert settings.c_const == 2.5
    assert settings.log_base == "10"
    assert settings.queries == 77


def test_bad_values_fall_back_to_defaults(monkeypatch):
    monkeypatch.setenv("MEANCORE_SEED", "many")
    monkeypatch.setenv("MEANCORE_LOG_BASE", "3")

    settings = Settings.from_env(dotenv=False)

    assert settings.seed == 0
    assert settings.log_base == "e"


def test_flag_beats_environment(monkeypatch):
    monkeypatch.setenv("MEANCORE_SEED", "9")
    settings = Settings.from_env(dotenv=False)

    assert resolve_seed(None, settings) == 9
    assert resolve_seed(4, settings) == 4


@pytest.mark.parametrize("raw,expected", [("on", True), ("off", False), ("auto", None)])
def test_compensated_sum_switch(monkeypatch, raw, expected):
    monkeypatch.setenv("MEANCORE_COMPENSATED_SUM", raw)

    if expected is None:
        assert not compensated_sum_enabled(1000)
        assert compensated_sum_enabled(2_000_000)
    else:
        assert compensated_sum_enabled(10) is expected


def test_env_helpers(monkeypatch):
    monkeypatch.setenv("X_STR", "   ")
    monkeypatch.setenv("X_INT", " 12 ")
    monkeypatch.setenv("X_FLOAT", "nope")

    assert env_str("X_STR", "out") == "out"
    assert env_int("X_INT", 0) == 12
    assert env_float("X_FLOAT", 0.5) == 0.5


def test_run_log_writes_its_own_file(tmp_path):
    with app_logging.run_log("stream", 5) as run:
        run.logger.info("depth=%s", 3)

    assert run.path.parent == (tmp_path / "log" / "runs").resolve()
    assert run.path.name.endswith("-stream-seed5.log")
    assert "depth=3" in run.path.read_text(encoding="utf-8")
    assert not run.logger.handlers


def test_old_run_logs_are_pruned(tmp_path):
    runs = tmp_path / "runs"
    runs.mkdir()
    old, fresh = runs / "old.log", runs / "fresh.log"
    old.write_text("x")
    fresh.write_text("y")
    os.utime(old, (0, 0))

    assert app_logging.prune_run_logs(runs, 7) == 1
    assert app_logging.prune_run_logs(runs, 0) == 0
    assert not old.exists() and fresh.exists()


def test_log_level_resolution(monkeypatch):
    monkeypatch.setenv("LOG_LEVEL", "debug")

    assert app_logging._resolve_level(None) == logging.DEBUG
    assert app_logging._resolve_level("warning") == logging.WARNING
    assert app_logging._resolve_level(logging.ERROR) == logging.ERROR
    assert app_logging._resolve_level("loud") == logging.INFO
