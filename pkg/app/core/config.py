"""
Configuration

Environment variables and numerical defaults.
Every tolerance named in the requirements lives here so one `.env` file can
retune a whole run.
"""

from functools import lru_cache
import json
from typing import List, Union

from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings from environment variables"""

    model_config = SettingsConfigDict(env_file=".env", case_sensitive=True, extra="ignore")

    # ============================================================================
    # Application
    # ============================================================================
    APP_TITLE: str = "BV Relaxed Area Toolkit"
    APP_VERSION: str = "1.0.0"
    SCHEMA_VERSION: str = "bv-relax/1"

    # ============================================================================
    # Logging Configuration
    # ============================================================================
    LOG_LEVEL: str = "INFO"
    LOG_DIR: str = "logs"
    LOG_TO_FILE: bool = True
    LOG_ROTATION_SIZE: int = 10_485_760  # 10 MB
    LOG_RETENTION_COUNT: int = 5

    # ============================================================================
    # Numerical Tolerances
    # ============================================================================
    DEFAULT_TOL: float = 1e-6
    EDGE_TOL: float = 1e-12  # query points closer than this to a loop edge are rejected
    ORIGIN_TOL: float = 1e-9  # degree samples closer than this to the origin are rejected
    SNAP_TOL: float = 1e-9  # vertex snapping for closed-form recognition
    ARC_LENGTH_TOL: float = 1e-8
    ANGLE_SUM_TOL: float = 1e-9
    DEGENERATE_TRIANGLE_AREA: float = 1e-14
    GRADIENT_STEP: float = 1e-6  # central differences for callable maps
    TRACE_OFFSET: float = 1e-6  # one-sided trace sampling offset along the normal
    TRANSVERSALITY_MIN_ANGLE: float = 1e-3  # radians
    MAX_QUADRATURE_CELLS: int = 400_000
    MAX_QUADTREE_DEPTH: int = 48

    # ============================================================================
    # Plateau Optimizer
    # ============================================================================
    MESH_RINGS: int = 24
    MESH_ANGULAR: int = 96
    OPTIMIZER_METHOD: str = "lbfgs"  # "lbfgs" or "gradient-descent"
    OPTIMIZER_MAX_ITERS: int = 600
    SMOOTHING_SCHEDULE: Union[str, List[float]] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6]
    JITTER_STARTS: int = 2
    JITTER_SCALE: float = 0.05
    DEFAULT_SEED: int = 20240917

    # ============================================================================
    # Parallelism
    # ============================================================================
    WORKERS: int = 1  # thread pool size for independent terms and multi-starts

    # ============================================================================
    # Output
    # ============================================================================
    RESULTS_DIR: str = "results"
    CSV_FLOAT_FORMAT: str = "%.12g"
    SVG_HASH_SALT: str = "bv-relax"

    @field_validator("SMOOTHING_SCHEDULE", mode="before")
    @classmethod
    def parse_smoothing_schedule(cls, v):
        """Accept a JSON array or a comma-separated list"""
        if v is None or v == "":
            return [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6]
        if isinstance(v, str):
            v = v.strip()
            if v.startswith("["):
                return [float(x) for x in json.loads(v)]
            return [float(x) for x in v.split(",") if x.strip()]
        return [float(x) for x in v]

    @field_validator("SMOOTHING_SCHEDULE")
    @classmethod
    def check_smoothing_schedule(cls, v):
        if not v or any(eps <= 0 for eps in v):
            raise ValueError("smoothing schedule must be a non-empty list of positive values")
        return sorted(v, reverse=True)


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance"""
    return Settings()
