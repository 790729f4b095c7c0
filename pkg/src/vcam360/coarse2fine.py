"""Coarse-to-fine acceleration of the trajectory search.

Stage one solves the search on the coarse lattice (half the angular and
temporal resolution, widest lens only).  Stage two lifts that result onto
the full lattice by inserting spherical-midpoint keyframes, then re-solves
with the candidate set restricted to the small neighborhood around the
lifted path.  Because score fields evaluate lazily, the two stages together
touch well under a tenth of the glimpses a full search would score, and the
cost report states exactly how many.
"""

from __future__ import annotations

from typing import Callable

from .dp_solver import (
    SearchProblem,
    Trajectory,
    solve,
    top_k_by_endpoint,
)
from .grid import (
    GlimpseGrid,
    TransitionConstraints,
    build_coarse_grid,
    build_full_grid,
    refinement_neighborhood,
    snap_to_grid_direction,
)
from .geometry import CameraPose
from .renderer import spherical_midpoint
from .scoring import ScoreField

ScorerFactory = Callable[[GlimpseGrid], ScoreField]
"""Builds a (typically lazy) score field for whichever lattice a stage asks for."""

# One coarse index step spans two fine steps, so 8-adjacency on the coarse
# lattice is the doubled-step counterpart of the full-lattice constraint.
COARSE_CONSTRAINTS = TransitionConstraints(1, 1, 0.5)


def solve_coarse(scorer_factory: ScorerFactory, video_length_s: float,
                 ) -> tuple[Trajectory, ScoreField]:
    """First-stage search on the coarse lattice.

    Returns the trajectory (every pose at focal scale 0.5) plus the score
    field so callers can read its evaluation counter.
    """
    grid = build_coarse_grid(video_length_s)
    field = scorer_factory(grid)
    if field.grid != grid:
        raise ValueError("scorer factory returned a field for a different lattice")
    traj = solve(SearchProblem(grid, field, COARSE_CONSTRAINTS))
    traj.meta["stage"] = "coarse"
    return traj, field


def interpolate_to_fine(coarse_traj: Trajectory, fine_grid: GlimpseGrid) -> Trajectory:
    """Lift a coarse trajectory onto the full lattice's time steps.

    Keyframes at coarse times are kept; in-between steps take the spherical
    midpoint of the flanking coarse poses, snapped to the nearest lattice
    direction; steps past the last coarse keyframe hold its pose.  Focal
    scale stays 0.5 throughout (scores have not been consulted yet, so the
    total is carried as 0.0 until refinement).
    """
    coarse_times = [t for t, _ in coarse_traj.keyframes]
    coarse_poses = [p for _, p in coarse_traj.keyframes]
    focal = coarse_poses[0].focal_scale
    keyframes = []
    for t in fine_grid.t_values:
        after = next((i for i, ct in enumerate(coarse_times) if ct > t + 1e-9),
                     len(coarse_times))
        if after == 0:
            raise ValueError(f"fine step {t} s precedes the first coarse keyframe")
        prev_pose = coarse_poses[after - 1]
        if abs(coarse_times[after - 1] - t) <= 1e-9 or after == len(coarse_times):
            theta, phi = prev_pose.theta_deg, prev_pose.phi_deg
        else:
            theta_m, phi_m = spherical_midpoint(prev_pose, coarse_poses[after])
            ti, pi = snap_to_grid_direction(theta_m, phi_m, fine_grid)
            theta, phi = fine_grid.theta_values[ti], fine_grid.phi_values[pi]
        keyframes.append((t, CameraPose(theta, phi, focal)))
    return Trajectory(keyframes, 0.0, fine_grid.glimpse_duration_s,
                      {"stage": "interpolated"})


def refine(traj0: Trajectory, fine_grid: GlimpseGrid, scores: ScoreField,
           k: int = 1,
           constraints: TransitionConstraints = TransitionConstraints(),
           ) -> list[Trajectory]:
    """Second-stage search restricted to the neighborhood of ``traj0``.

    With ``k`` > 1, returns the best trajectory per distinct final direction
    of the neighborhood (at most 9), best first.
    """
    allowed = refinement_neighborhood(traj0, fine_grid, constraints)
    problem = SearchProblem(fine_grid, scores, constraints, allowed=allowed)
    if k == 1:
        trajs = [solve(problem)]
    else:
        trajs = top_k_by_endpoint(problem, k)
    for traj in trajs:
        traj.meta["stage"] = "refined"
    return trajs


def solve_fast(scorer_factory: ScorerFactory, video_length_s: float, k: int = 1,
               diverse: bool = False, with_zoom: bool = True,
               ) -> tuple[list[Trajectory], dict]:
    """Full coarse-to-fine pipeline.

    Args:
        scorer_factory: Called once with the coarse lattice and once with the
            full lattice; must return lazily evaluating fields for the cost
            accounting to mean anything.
        video_length_s: Input video length.
        k: Number of trajectories to return.
        diverse: With ``k`` > 1, spread the coarse stage over time-windowed
            exclusions and endpoint regions instead of plain per-endpoint
            expansion of the refinement stage.
        with_zoom: Search all three focal scales in the refinement stage.

    Returns:
        (trajectories, cost_report) where the report holds ``coarse_evals``,
        ``refine_evals``, ``full_grid_size`` and their ``ratio``.
    """
    fine_grid = build_full_grid(video_length_s, with_zoom=with_zoom)
    fine_field = scorer_factory(fine_grid)
    if fine_field.grid != fine_grid:
        raise ValueError("scorer factory returned a field for a different lattice")

    if diverse and k > 1:
        from .diverse import diverse_search

        coarse_grid = build_coarse_grid(video_length_s)
        coarse_field = scorer_factory(coarse_grid)
        problem = SearchProblem(coarse_grid, coarse_field, COARSE_CONSTRAINTS)
        coarse_trajs = diverse_search(problem, k)
        trajs = []
        for ct in coarse_trajs:
            refined = refine(interpolate_to_fine(ct, fine_grid), fine_grid, fine_field)[0]
            refined.meta.update({key: ct.meta[key] for key in ("iteration", "window", "region")
                                 if key in ct.meta})
            trajs.append(refined)
        trajs.sort(key=lambda tr: -tr.total_score)
    else:
        coarse_traj, coarse_field = solve_coarse(scorer_factory, video_length_s)
        traj0 = interpolate_to_fine(coarse_traj, fine_grid)
        trajs = refine(traj0, fine_grid, fine_field, k=k)

    coarse_evals = coarse_field.eval_counter
    refine_evals = fine_field.eval_counter
    report = {
        "coarse_evals": coarse_evals,
        "refine_evals": refine_evals,
        "full_grid_size": fine_grid.size,
        "ratio": (coarse_evals + refine_evals) / fine_grid.size,
    }
    return trajs, report
