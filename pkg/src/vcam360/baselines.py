"""Reference trajectory generators to compare the search against.

* Center: seeded Gaussian random walks starting at (0, 0), each step's
  proposal snapped to the nearest feasible lattice successor.
* Eye-level: one static trajectory per lattice azimuth at elevation 0.
* Saliency: the per-endpoint search run on saliency-proxy scores instead of
  capture-worthiness scores.
"""

from __future__ import annotations

import numpy as np

from .dp_solver import SearchProblem, Trajectory, top_k_by_endpoint
from .geometry import CameraPose, angle_between, pose_to_direction
from .grid import (
    GlimpseGrid,
    GlimpseIndex,
    TransitionConstraints,
    feasible_successors,
)
from .renderer import EquirectSequence
from .scoring import ScorerSpec, make_score_field

CENTER_SIGMA_THETA_DEG = 10.0
CENTER_SIGMA_PHI_DEG = 20.0


def center_baseline(grid: GlimpseGrid, seed: int, k: int = 1,
                    sigma_theta_deg: float = CENTER_SIGMA_THETA_DEG,
                    sigma_phi_deg: float = CENTER_SIGMA_PHI_DEG,
                    constraints: TransitionConstraints = TransitionConstraints(),
                    ) -> list[Trajectory]:
    """``k`` random walks from pose (0, 0) at focal scale 1.0.

    Each step draws a Gaussian direction offset (sigma of one lattice step)
    and moves to the feasible successor nearest the proposal by great-circle
    angle, ties to the smallest index, so sigma -> 0 degenerates to a static
    center trajectory.  Walks are reproducible per (seed, walk index).
    """
    if k < 1:
        raise ValueError(f"k must be at least 1: {k}")
    theta0, phi0 = grid.direction_index_of(0.0, 0.0)
    f0 = grid.focal_index_of(1.0)
    trajs = []
    for walk in range(k):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, walk])))
        current = GlimpseIndex(0, theta0, phi0, f0)
        keyframes = [(grid.t_values[0], grid.pose(current))]
        for _ in range(grid.n_steps - 1):
            d_theta, d_phi = rng.normal(0.0, [sigma_theta_deg, sigma_phi_deg])
            pose = grid.pose(current)
            target = pose_to_direction(CameraPose(
                min(90.0, max(-90.0, pose.theta_deg + d_theta)),
                pose.phi_deg + d_phi))
            options = [s for s in feasible_successors(current, grid, constraints)
                       if s.f_idx == f0]
            best = None
            best_angle = None
            for s in options:
                a = angle_between(pose_to_direction(grid.pose(s)), target)
                if best_angle is None or a < best_angle - 1e-12:
                    best, best_angle = s, a
            current = best
            keyframes.append((grid.t_values[current.t_idx], grid.pose(current)))
        trajs.append(Trajectory(keyframes, 0.0, grid.glimpse_duration_s,
                                {"mode": "baseline:center", "seed": seed, "walk": walk}))
    return trajs


def eye_level_baseline(grid: GlimpseGrid) -> list[Trajectory]:
    """One static trajectory per lattice azimuth, at elevation 0, focal 1.0."""
    theta_idx = None
    for ti, tv in enumerate(grid.theta_values):
        if abs(tv) <= 1e-9:
            theta_idx = ti
            break
    if theta_idx is None:
        raise ValueError("lattice has no elevation-0 row")
    grid.focal_index_of(1.0)
    trajs = []
    for phi in grid.phi_values:
        pose = CameraPose(0.0, phi, 1.0)
        keyframes = [(t, pose) for t in grid.t_values]
        trajs.append(Trajectory(keyframes, 0.0, grid.glimpse_duration_s,
                                {"mode": "baseline:eyelevel", "phi_deg": phi}))
    return trajs


def saliency_baseline(frames: EquirectSequence, grid: GlimpseGrid, k: int = 1,
                      constraints: TransitionConstraints = TransitionConstraints(),
                      ) -> list[Trajectory]:
    """Per-endpoint search over saliency-proxy scores."""
    field = make_score_field(ScorerSpec("saliency-proxy"), grid, frames)
    trajs = top_k_by_endpoint(SearchProblem(grid, field, constraints), k)
    for traj in trajs:
        traj.meta["mode"] = "baseline:saliency"
    return trajs
