"""Diverse multi-trajectory search.

One optimal path is rarely the only interesting one.  This module returns
up to ``k`` trajectories per input by combining two mechanisms:

* endpoint regions: each iteration solves for the best path ending in each
  of six sphere regions (three equal azimuth sectors crossed with the two
  elevation hemispheres), so one iteration's outputs point different ways;
* windowed exclusions: from the second iteration on, the search must avoid
  every glimpse already used by earlier outputs inside one of twenty time
  windows, each a tenth of the video long, which forces later outputs to
  differ from all earlier ones at no fewer keyframes than a window holds.

Exclusion sets update between iterations only, so the six searches inside
one iteration run against the same sub-problem family.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .dp_solver import (
    InfeasibleError,
    SearchProblem,
    Trajectory,
    forward_pass,
)

WINDOW_COUNT = 20
WINDOW_FRACTION = 0.10
REGION_SECTORS = 3


@dataclass(frozen=True)
class TimeWindow:
    """Half-open range [start_idx, end_idx) of time steps."""

    start_idx: int
    end_idx: int

    def steps(self) -> range:
        return range(self.start_idx, self.end_idx)

    def __len__(self) -> int:
        return self.end_idx - self.start_idx


@dataclass(frozen=True)
class SphereRegion:
    """One azimuth sector of one elevation hemisphere.

    The equator (theta = 0) counts as the lower hemisphere, so the six
    canonical regions partition every pose exactly once.
    """

    phi_start_deg: float
    phi_end_deg: float
    upper: bool

    def contains(self, theta_deg: float, phi_deg: float) -> bool:
        if (theta_deg > 0.0) != self.upper:
            return False
        return self.phi_start_deg <= phi_deg % 360.0 < self.phi_end_deg


def canonical_regions() -> list[SphereRegion]:
    """The six regions in a fixed order: lower hemisphere sectors first."""
    sector = 360.0 / REGION_SECTORS
    return [SphereRegion(i * sector, (i + 1) * sector, upper)
            for upper in (False, True) for i in range(REGION_SECTORS)]


def window_length(num_steps: int, fraction: float = WINDOW_FRACTION) -> int:
    """Window length in time steps: a tenth of the video, at least one step.

    Rounding is half-up so the guaranteed difference never undershoots the
    fraction by more than half a step.
    """
    return max(1, int(np.floor(fraction * num_steps + 0.5)))


def sample_windows(num_steps: int, count: int = WINDOW_COUNT,
                   fraction: float = WINDOW_FRACTION) -> list[TimeWindow]:
    """Evenly spaced windows covering [0, num_steps); fewer when the video
    is too short for ``count`` distinct starts."""
    if num_steps < 1:
        raise ValueError(f"need at least one time step: {num_steps}")
    length = window_length(num_steps, fraction)
    max_start = num_steps - length
    n = min(count, max_start + 1)
    starts = sorted({int(round(s)) for s in np.linspace(0, max_start, n)})
    return [TimeWindow(s, s + length) for s in starts]


def diverse_search(problem: SearchProblem, k: int,
                   window_count: int = WINDOW_COUNT,
                   window_fraction: float = WINDOW_FRACTION) -> list[Trajectory]:
    """Up to ``k`` diverse trajectories, best total score first.

    Iteration 1 solves the six endpoint-region problems with no exclusions.
    Every later iteration solves them once per time window with the window's
    glimpses of all previous outputs excluded, keeping each region's best
    window.  Outputs from different iterations are therefore guaranteed to
    differ at one full window's worth of keyframes.

    When exclusions make every sub-problem of an iteration infeasible the
    search stops early with a warning and returns what it has.
    """
    if k < 1:
        raise ValueError(f"k must be at least 1: {k}")
    grid = problem.grid
    regions = canonical_regions()
    region_dirs = []
    for region in regions:
        dirs = [(ti, pi)
                for ti, tv in enumerate(grid.theta_values)
                for pi, pv in enumerate(grid.phi_values)
                if region.contains(tv, pv)]
        region_dirs.append(dirs)
    windows = sample_windows(grid.n_steps, window_count, window_fraction)

    results: list[Trajectory] = []
    iteration = 1
    while len(results) < k:
        if iteration == 1:
            subproblems: list[tuple[TimeWindow | None, SearchProblem]] = [(None, problem)]
        else:
            used = [traj.glimpse_indices(grid) for traj in results]
            subproblems = []
            for w in windows:
                banned = frozenset(path[t] for path in used for t in w.steps())
                subproblems.append(
                    (w, replace(problem, excluded=problem.excluded | banned)))

        solved = []
        for w, sub in subproblems:
            try:
                tables = forward_pass(sub)
            except InfeasibleError:
                continue
            solved.append((w, tables))

        added = 0
        for region, dirs in zip(regions, region_dirs):
            best: Trajectory | None = None
            best_window: TimeWindow | None = None
            for w, tables in solved:
                try:
                    traj = tables.best_trajectory(dirs)
                except InfeasibleError:
                    continue
                if best is None or traj.total_score > best.total_score:
                    best = traj
                    best_window = w
            if best is None:
                continue
            best.meta.update({
                "iteration": iteration,
                "window": None if best_window is None
                else [best_window.start_idx, best_window.end_idx],
                "region": [region.phi_start_deg, region.phi_end_deg,
                           "upper" if region.upper else "lower"],
            })
            results.append(best)
            added += 1
        if added == 0:
            warnings.warn(
                f"diverse search exhausted after {len(results)} trajectories "
                f"(requested {k}); exclusions left no feasible sub-problem")
            break
        iteration += 1

    results.sort(key=lambda tr: -tr.total_score)
    return results[:k]
