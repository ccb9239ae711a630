"""Tests for environment settings and logging setup."""

import logging
from pathlib import Path

import pytest

from qwa_sim.config import LOG_FORMAT, Settings, configure_logging


@pytest.fixture
def clean_env(monkeypatch):
    # setenv first so values loaded from .env files are undone too
    for name in ("QWA_OUT_DIR", "QWA_LOG_LEVEL", "QWA_TIMING"):
        monkeypatch.setenv(name, "")
        monkeypatch.delenv(name)
    return monkeypatch


@pytest.fixture
def package_logger():
    logger = logging.getLogger("qwa_sim")
    saved = (logger.level, list(logger.handlers))
    logger.handlers.clear()
    yield logger
    logger.setLevel(saved[0])
    logger.handlers[:] = saved[1]


class TestSettings:
    def test_defaults(self, clean_env, tmp_path):
        settings = Settings.from_env(dotenv_path=tmp_path / "missing.env")
        assert settings == Settings(out_dir=Path("results"), log_level="WARNING", timing=False)

    def test_environment(self, clean_env, tmp_path):
        clean_env.setenv("QWA_OUT_DIR", str(tmp_path))
        clean_env.setenv("QWA_LOG_LEVEL", "debug")
        clean_env.setenv("QWA_TIMING", "yes")
        settings = Settings.from_env(dotenv_path=tmp_path / "missing.env")
        assert settings.out_dir == tmp_path
        assert settings.log_level == "DEBUG"
        assert settings.timing is True

    def test_dotenv_file(self, clean_env, tmp_path):
        env_file = tmp_path / ".env"
        env_file.write_text("QWA_LOG_LEVEL=INFO\nQWA_TIMING=0\n")
        settings = Settings.from_env(dotenv_path=env_file)
        assert settings.log_level == "INFO"
        assert settings.timing is False

    def test_environment_wins_over_dotenv(self, clean_env, tmp_path):
        env_file = tmp_path / ".env"
        env_file.write_text("QWA_LOG_LEVEL=INFO\n")
        clean_env.setenv("QWA_LOG_LEVEL", "ERROR")
        assert Settings.from_env(dotenv_path=env_file).log_level == "ERROR"


class TestConfigureLogging:
    def test_single_handler(self, package_logger):
        configure_logging("INFO")
        configure_logging("DEBUG")
        assert len(package_logger.handlers) == 1
        assert package_logger.level == logging.DEBUG
        assert package_logger.handlers[0].formatter._fmt == LOG_FORMAT

    def test_unknown_level_falls_back(self, package_logger):
        configure_logging("chatty")
        assert package_logger.level == logging.WARNING

    def test_numeric_level(self, package_logger):
        configure_logging(logging.ERROR)
        assert package_logger.level == logging.ERROR
