"""
Report Writer Service

Writes tabular results as CSV (pandas, fixed float format, so identical inputs
give byte-identical files) and records as indented JSON.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Dict, Iterable, Mapping, Optional, Union

import pandas as pd
from pydantic import BaseModel

from app.core.config import get_settings

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
Rows = Union[pd.DataFrame, Iterable[Mapping[str, object]]]


def as_frame(rows: Rows) -> pd.DataFrame:
    if isinstance(rows, pd.DataFrame):
        return rows
    return pd.DataFrame(list(rows))


def write_csv(rows: Rows, path: PathLike, float_format: Optional[str] = None) -> Path:
    """
    Write rows as CSV with a fixed float format and "\\n" line endings.

    Raises:
        OSError: the file cannot be written (logged first)
    """
    path = Path(path)
    frame = as_frame(rows)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, float_format=float_format or get_settings().CSV_FLOAT_FORMAT,
                     lineterminator="\n")
    except OSError as e:
        logger.error(f"Could not write {path}: {e}")
        raise
    logger.info(f"Wrote {len(frame)} rows to {path}")
    return path


def write_json(payload: Union[BaseModel, Dict[str, object]], path: PathLike) -> Path:
    """Pydantic models through model_dump; dicts as they are"""
    path = Path(path)
    data = payload.model_dump() if isinstance(payload, BaseModel) else payload
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(data, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    except OSError as e:
        logger.error(f"Could not write {path}: {e}")
        raise
    logger.info(f"Wrote {path}")
    return path
