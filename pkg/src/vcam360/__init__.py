"""Virtual NFOV videography for 360-degree video.

Searches a spatio-temporal lattice of camera glimpses for smooth,
high-scoring virtual camera trajectories (with optional zoom), renders them
to normal-field-of-view video, and evaluates them against human edits.
"""

from .geometry import BASE_FOV_DEG, CameraPose, FrameGeometry, angular_distance, fov_from_focal
from .grid import (
    GlimpseGrid,
    GlimpseIndex,
    TransitionConstraints,
    build_coarse_grid,
    build_full_grid,
)
from .scoring import MissingScoreError, ScoreField, ScoreParseError, ScorerSpec
from .dp_solver import InfeasibleError, SearchProblem, Trajectory

__version__ = "0.1.0"

__all__ = [
    "BASE_FOV_DEG",
    "CameraPose",
    "FrameGeometry",
    "GlimpseGrid",
    "GlimpseIndex",
    "InfeasibleError",
    "MissingScoreError",
    "ScoreField",
    "ScoreParseError",
    "ScorerSpec",
    "SearchProblem",
    "Trajectory",
    "TransitionConstraints",
    "angular_distance",
    "build_coarse_grid",
    "build_full_grid",
    "fov_from_focal",
    "__version__",
]
