"""
Logging Configuration

Centralized logging setup with rotating log files and compaction of numeric
payloads (numpy arrays) so mesh-sized arguments never flood the logs.
"""

import logging
from logging.handlers import RotatingFileHandler
import os
from pathlib import Path
from typing import Any, Optional

import numpy as np

from app.core.config import get_settings


# ============================================================================
# NUMERIC PAYLOAD COMPACTION
# ============================================================================

MAX_INLINE_ELEMENTS = 8


def summarize_array(value: np.ndarray) -> str:
    """
    Compact representation of an array for logging.

    Small arrays are printed inline; larger ones as shape, dtype and range.
    """
    if value.size <= MAX_INLINE_ELEMENTS:
        return np.array2string(value, precision=6, separator=", ")
    if value.size == 0 or not np.issubdtype(value.dtype, np.number):
        return f"<array shape={value.shape} dtype={value.dtype}>"
    finite = value[np.isfinite(value)] if np.issubdtype(value.dtype, np.floating) else value
    if finite.size == 0:
        return f"<array shape={value.shape} dtype={value.dtype} all non-finite>"
    return (
        f"<array shape={value.shape} dtype={value.dtype} "
        f"min={finite.min():.6g} max={finite.max():.6g}>"
    )


def compact_value(value: Any, depth: int = 0) -> Any:
    """Replace numpy arrays (possibly nested in dicts/lists) by summaries"""
    if depth > 5:
        return value
    if isinstance(value, np.ndarray):
        return summarize_array(value)
    if isinstance(value, dict):
        return {k: compact_value(v, depth + 1) for k, v in value.items()}
    if isinstance(value, (list, tuple)) and len(value) > MAX_INLINE_ELEMENTS:
        return f"<{type(value).__name__} len={len(value)}>"
    return value


class NumericPayloadFilter(logging.Filter):
    """
    Logging filter that compacts numeric payloads in log records.

    Arrays passed as %-format arguments are summarized; scalars are left
    untouched so %d/%g formatting keeps working.
    """

    def filter(self, record: logging.LogRecord) -> bool:
        if record.args:
            if isinstance(record.args, dict):
                record.args = {k: compact_value(v) for k, v in record.args.items()}
            elif isinstance(record.args, tuple):
                record.args = tuple(
                    compact_value(arg) if isinstance(arg, (np.ndarray, dict, list, tuple)) else arg
                    for arg in record.args
                )
        if isinstance(record.msg, np.ndarray):
            record.msg = summarize_array(record.msg)
        return True


class SafeRotatingFileHandler(RotatingFileHandler):
    """RotatingFileHandler that won't crash logging on Windows file-lock rollover issues."""

    def doRollover(self) -> None:
        try:
            super().doRollover()
        except PermissionError:
            # Another process holds the file open; keep writing to the current one.
            return


_FILE_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - [%(filename)s:%(lineno)d] - %(message)s'
_CONSOLE_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def setup_logging(level: Optional[str] = None, log_dir: Optional[str] = None,
                  to_file: Optional[bool] = None) -> logging.Logger:
    """Configure logging with console (stderr) and rotating file handlers"""

    settings = get_settings()
    level = (level or settings.LOG_LEVEL).upper()
    to_file = settings.LOG_TO_FILE if to_file is None else to_file

    numeric_filter = NumericPayloadFilter()

    root_logger = logging.getLogger()
    root_logger.setLevel(logging.DEBUG)

    # Avoid duplicate handlers when the CLI runs several times in one process.
    for existing in list(root_logger.handlers):
        try:
            existing.close()
        except Exception:
            pass
        root_logger.removeHandler(existing)
    for existing in list(root_logger.filters):
        root_logger.removeFilter(existing)
    root_logger.addFilter(numeric_filter)

    # Console handler goes to stderr: stdout is reserved for the CLI summary.
    console_handler = logging.StreamHandler()
    console_handler.setLevel(getattr(logging, level, logging.INFO))
    console_handler.addFilter(numeric_filter)
    console_handler.setFormatter(logging.Formatter(_CONSOLE_FORMAT))
    root_logger.addHandler(console_handler)

    if to_file:
        logs_dir = Path(log_dir or settings.LOG_DIR)
        logs_dir.mkdir(parents=True, exist_ok=True)
        pid_suffix = f".{os.getpid()}" if os.name == "nt" else ""
        file_formatter = logging.Formatter(_FILE_FORMAT)

        file_handler = SafeRotatingFileHandler(
            logs_dir / f"bv_relax{pid_suffix}.log",
            maxBytes=settings.LOG_ROTATION_SIZE,
            backupCount=settings.LOG_RETENTION_COUNT,
            encoding="utf-8",
            delay=True,
        )
        file_handler.setLevel(logging.DEBUG)
        file_handler.addFilter(numeric_filter)
        file_handler.setFormatter(file_formatter)
        root_logger.addHandler(file_handler)

        error_handler = SafeRotatingFileHandler(
            logs_dir / f"error{pid_suffix}.log",
            maxBytes=settings.LOG_ROTATION_SIZE,
            backupCount=settings.LOG_RETENTION_COUNT,
            encoding="utf-8",
            delay=True,
        )
        error_handler.setLevel(logging.ERROR)
        error_handler.addFilter(numeric_filter)
        error_handler.setFormatter(file_formatter)
        root_logger.addHandler(error_handler)

    # Third-party plotting backends are chatty at DEBUG.
    logging.getLogger("matplotlib").setLevel(logging.WARNING)
    return root_logger

