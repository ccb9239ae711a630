"""Environment-driven settings and logging setup.

Values come from the process environment, optionally seeded from a ``.env``
file in the working directory. Numerical parameters are not read
from here: they are set on ``DmrgSettings`` / ``AnnealParams`` or on the
command line.
"""

import logging
import os
from dataclasses import dataclass
from pathlib import Path

from dotenv import load_dotenv

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

_TRUTHY = {"1", "true", "yes", "on"}


@dataclass(frozen=True)
class Settings:
    """Run-environment settings.

    Attributes:
        out_dir: Default directory for artifacts.
        log_level: Name of the logging level for the CLI.
        timing: Record wall-clock time per anneal step (breaks byte-identical
            telemetry across runs).
    """

    out_dir: Path = Path("results")
    log_level: str = "WARNING"
    timing: bool = False

    @classmethod
    def from_env(cls, dotenv_path: str | None = None) -> "Settings":
        """Build settings from ``QWA_*`` environment variables.

        Args:
            dotenv_path: Explicit ``.env`` file. If None, python-dotenv searches
                from the working directory upwards.
        """
        load_dotenv(dotenv_path=dotenv_path, override=False)
        return cls(
            out_dir=Path(os.environ.get("QWA_OUT_DIR", "results")),
            log_level=os.environ.get("QWA_LOG_LEVEL", "WARNING").upper(),
            timing=os.environ.get("QWA_TIMING", "0").strip().lower() in _TRUTHY,
        )


def configure_logging(level: str | int = "WARNING") -> None:
    """Install a single stderr handler on the package logger."""
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
        if not isinstance(level, int):
            level = logging.WARNING

    logger = logging.getLogger("qwa_sim")
    logger.setLevel(level)
    if not logger.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logger.addHandler(handler)
