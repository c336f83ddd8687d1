"""
Command Configuration

The validated options shared by every sub-command, the exit codes, and the
mapping from domain errors to exit codes.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from app.core.config import get_settings
from app.core.exceptions import (
    AmbiguousDegree,
    BallTooLarge,
    InvalidGeometry,
    InvalidScene,
    OriginHit,
    PointOnBoundary,
    RelaxationError,
    SceneFormatError,
    WindowOverlap,
)
from app.plateau.optimizer import PlateauOptions
from app.relaxation.breakdown import AreaOptions

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_IO = 1
EXIT_INVALID = 2
EXIT_NUMERICAL = 3
EXIT_UNKNOWN_EXAMPLE = 4

# Caller-side mistakes: bad files, bad geometry, bad parameters
_INVALID_INPUT = (
    SceneFormatError,
    InvalidScene,
    InvalidGeometry,
    BallTooLarge,
    PointOnBoundary,
    AmbiguousDegree,
    OriginHit,
    WindowOverlap,
)


class CommandConfig(BaseModel):
    """One sub-command invocation"""

    model_config = ConfigDict(extra="forbid")

    command: Literal["area", "tvj", "plateau", "recovery-check", "example"]
    scene: Optional[Path] = None
    loop: Optional[Path] = None
    example: Optional[str] = None
    tol: float = Field(default_factory=lambda: get_settings().DEFAULT_TOL, gt=0)
    seed: int = Field(default_factory=lambda: get_settings().DEFAULT_SEED, ge=0, lt=2 ** 64)
    csv: Optional[Path] = None
    svg: Optional[Path] = None
    json_path: Optional[Path] = None
    rings: int = Field(default_factory=lambda: get_settings().MESH_RINGS, ge=1)
    angular: int = Field(default_factory=lambda: get_settings().MESH_ANGULAR, ge=8)
    levels: int = Field(20, ge=1)
    r: float = Field(1.0, gt=0)
    workers: int = Field(default_factory=lambda: get_settings().WORKERS, ge=1)
    recovery: bool = False

    def plateau_options(self, **overrides) -> PlateauOptions:
        return PlateauOptions(n_rings=self.rings, n_angular=self.angular, seed=self.seed, tol=self.tol,
                              workers=self.workers, **overrides)

    def area_options(self) -> AreaOptions:
        return AreaOptions(tol=self.tol, plateau=self.plateau_options(), workers=self.workers)

    def require(self, name: str) -> Path:
        """The input path the command needs; a missing one is a config error"""
        path = getattr(self, name)
        if path is None:
            raise InvalidScene(f"'{self.command}' needs --{name}")
        return path


def exit_code_for(exc: BaseException) -> int:
    """Map an exception raised by a command to its exit code"""
    if isinstance(exc, (ValidationError, *_INVALID_INPUT)):
        return EXIT_INVALID
    if isinstance(exc, OSError):
        return EXIT_IO
    if isinstance(exc, (RelaxationError, ArithmeticError)):
        return EXIT_NUMERICAL
    raise exc
