"""Environment configuration, defaults and logging setup."""

from __future__ import annotations

import logging
import os

from dotenv import load_dotenv

from stable_trees.errors import ConfigurationError

load_dotenv()

DEFAULT_ALPHA = 1.5
DEFAULT_SEED = 20240601
DEFAULT_EPSILON = 1e-4
DEFAULT_X_SWITCH = 8.0
DEFAULT_CHUNK_SIZE = 4096
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

_MAX_SEED = 2**64 - 1


def _get_int_env(name: str, default: int, *, minimum: int = 0) -> int:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        value = int(raw.strip())
    except ValueError as exc:
        raise ConfigurationError(f"{name} must be an integer, got {raw!r}.") from exc
    if value < minimum:
        raise ConfigurationError(f"{name} must be at least {minimum}.")
    return value


def get_seed(default: int = DEFAULT_SEED) -> int:
    """Return the global seed, honouring the STL_SEED override."""

    seed = _get_int_env("STL_SEED", default)
    if seed > _MAX_SEED:
        raise ConfigurationError("STL_SEED must fit in an unsigned 64-bit integer.")
    return seed


def get_n_jobs() -> int:
    return _get_int_env("STL_N_JOBS", 1, minimum=1)


def get_chunk_size() -> int:
    return _get_int_env("STL_CHUNK_SIZE", DEFAULT_CHUNK_SIZE, minimum=1)


def get_log_level() -> str:
    return os.getenv("STL_LOG_LEVEL", "WARNING").upper()


def configure_logging(level: str | int | None = None) -> None:
    """Install a single stream handler on the package logger."""

    resolved = level if level is not None else get_log_level()
    package_logger = logging.getLogger("stable_trees")
    package_logger.setLevel(resolved)
    if not any(getattr(h, "_stable_trees", False) for h in package_logger.handlers):
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handler._stable_trees = True  # type: ignore[attr-defined]
        package_logger.addHandler(handler)
