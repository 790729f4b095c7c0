"""Constrained shortest-path search over glimpse lattices.

Trajectory quality is the sum of per-glimpse scores; transitions carry no
cost but must respect the smoothness constraints, so the optimum is found
with one forward dynamic-programming pass over the lattice (value plus
backpointer per candidate).

Determinism: whenever two predecessors (or two endpoints) tie on value, the
smallest (theta_idx, phi_idx, f_idx) tuple wins, so identical inputs always
reproduce the same trajectory.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Collection, Optional, Sequence

from .geometry import CameraPose
from .grid import (
    GlimpseGrid,
    GlimpseIndex,
    TransitionConstraints,
    direction_neighbors,
    focal_neighbors,
    grid_from_manifest,
    grid_to_manifest,
)
from .scoring import ScoreField

DirFocal = tuple[int, int, int]
"""(theta_idx, phi_idx, f_idx) triple: a candidate within one time step."""


class InfeasibleError(RuntimeError):
    """No path satisfies the constraints; ``step`` names the first empty step."""

    def __init__(self, message: str, step: int):
        super().__init__(message)
        self.step = step


@dataclass
class Trajectory:
    """A virtual camera path: one (time, pose) keyframe per glimpse."""

    keyframes: list[tuple[float, CameraPose]]
    total_score: float
    keyframe_interval_s: float = 5.0
    meta: dict = field(default_factory=dict)

    def poses(self) -> list[CameraPose]:
        return [p for _, p in self.keyframes]

    def times(self) -> list[float]:
        return [t for t, _ in self.keyframes]

    @property
    def duration_s(self) -> float:
        return self.keyframes[-1][0] + self.keyframe_interval_s

    def glimpse_indices(self, grid: GlimpseGrid) -> list[GlimpseIndex]:
        """Lattice indices of each keyframe; keyframes must lie on the lattice."""
        out = []
        for t, pose in self.keyframes:
            ti, pi = grid.direction_index_of(pose.theta_deg, pose.phi_deg)
            out.append(GlimpseIndex(grid.t_index_of(t), ti, pi,
                                    grid.focal_index_of(pose.focal_scale)))
        return out


@dataclass
class SearchProblem:
    """Inputs to one trajectory search.

    Attributes:
        grid: Candidate lattice.
        scores: Score field over that lattice.
        constraints: Transition limits.
        allowed: Optional per-time-step candidate whitelists (DirFocal triples);
            ``None`` means the whole lattice.
        excluded: Glimpses removed from the search space.
        endpoint_dirs: Optional (theta_idx, phi_idx) set the final keyframe
            must land in.
    """

    grid: GlimpseGrid
    scores: ScoreField
    constraints: TransitionConstraints = TransitionConstraints()
    allowed: Optional[Sequence[Collection[DirFocal]]] = None
    excluded: frozenset[GlimpseIndex] = frozenset()
    endpoint_dirs: Optional[Collection[tuple[int, int]]] = None


class DPTables:
    """Result of one forward pass: per-step candidates, values, backpointers."""

    NEG_INF = float("-inf")

    def __init__(self, problem: SearchProblem, candidates: list[list[DirFocal]],
                 values: list[list[float]], backs: list[list[int]]):
        self.problem = problem
        self.candidates = candidates
        self.values = values
        self.backs = backs

    def _reconstruct(self, endpoint_pos: int) -> Trajectory:
        grid = self.problem.grid
        positions = []
        pos = endpoint_pos
        for t in range(len(self.candidates) - 1, -1, -1):
            positions.append(pos)
            pos = self.backs[t][pos]
        positions.reverse()
        keyframes = []
        for t, p in enumerate(positions):
            ti, pi, fi = self.candidates[t][p]
            keyframes.append((grid.t_values[t],
                              CameraPose(grid.theta_values[ti], grid.phi_values[pi],
                                         grid.f_values[fi])))
        total = self.values[-1][endpoint_pos]
        return Trajectory(keyframes, total, grid.glimpse_duration_s)

    def best_trajectory(self, endpoint_dirs: Optional[Collection[tuple[int, int]]] = None,
                        ) -> Trajectory:
        """Optimal trajectory, optionally restricted to endpoint directions.

        Ties pick the lexicographically smallest endpoint triple.
        """
        final_t = len(self.candidates) - 1
        allowed = None if endpoint_dirs is None else set(endpoint_dirs)
        best_pos = -1
        best_val = self.NEG_INF
        for p, (ti, pi, fi) in enumerate(self.candidates[final_t]):
            if allowed is not None and (ti, pi) not in allowed:
                continue
            v = self.values[final_t][p]
            if v > best_val:
                best_val = v
                best_pos = p
        if best_pos < 0:
            raise InfeasibleError(
                f"no feasible path reaches the requested endpoints at step {final_t}",
                final_t)
        return self._reconstruct(best_pos)

    def endpoint_trajectories(self) -> list[Trajectory]:
        """Best trajectory per distinct final direction, best score first.

        Within one direction the best focal scale wins; between directions
        equal scores order by (theta_idx, phi_idx).
        """
        final_t = len(self.candidates) - 1
        allowed = (None if self.problem.endpoint_dirs is None
                   else set(self.problem.endpoint_dirs))
        best_per_dir: dict[tuple[int, int], int] = {}
        for p, (ti, pi, fi) in enumerate(self.candidates[final_t]):
            if allowed is not None and (ti, pi) not in allowed:
                continue
            if self.values[final_t][p] == self.NEG_INF:
                continue
            cur = best_per_dir.get((ti, pi))
            if cur is None or self.values[final_t][p] > self.values[final_t][cur]:
                best_per_dir[(ti, pi)] = p
        ordered = sorted(best_per_dir.items())
        trajs = [self._reconstruct(pos) for _, pos in ordered]
        trajs.sort(key=lambda tr: -tr.total_score)
        return trajs


def forward_pass(problem: SearchProblem) -> DPTables:
    """Run the DP recursion once; raises on empty or unreachable steps."""
    grid = problem.grid
    c = problem.constraints
    n_f = len(grid.f_values)
    all_triples = [(ti, pi, fi)
                   for ti in range(len(grid.theta_values))
                   for pi in range(len(grid.phi_values))
                   for fi in range(n_f)]

    if problem.allowed is not None and len(problem.allowed) != grid.n_steps:
        raise ValueError(f"allowed has {len(problem.allowed)} entries "
                         f"for {grid.n_steps} time steps")

    excluded_by_t: dict[int, set[DirFocal]] = {}
    for g in problem.excluded:
        excluded_by_t.setdefault(g.t_idx, set()).add((g.theta_idx, g.phi_idx, g.f_idx))

    candidates: list[list[DirFocal]] = []
    for t in range(grid.n_steps):
        base = all_triples if problem.allowed is None else sorted(set(problem.allowed[t]))
        banned = excluded_by_t.get(t, ())
        cand = [x for x in base if x not in banned]
        if not cand:
            raise InfeasibleError(f"no candidates left at time step {t}", t)
        candidates.append(cand)

    # Predecessor triples per lattice cell, in ascending (theta, phi, f)
    # order so the first strict maximum seen is the tie-break winner.
    pred_cache: dict[DirFocal, list[DirFocal]] = {}

    def preds(cell: DirFocal) -> list[DirFocal]:
        cached = pred_cache.get(cell)
        if cached is None:
            ti, pi, fi = cell
            cached = sorted((a, b, fj)
                            for (a, b) in direction_neighbors(ti, pi, grid, c)
                            for fj in focal_neighbors(fi, grid, c))
            pred_cache[cell] = cached
        return cached

    neg_inf = DPTables.NEG_INF
    values: list[list[float]] = []
    backs: list[list[int]] = []
    pos_prev: dict[DirFocal, int] = {}
    vals_prev: list[float] = []
    for t, cand in enumerate(candidates):
        vals_t = []
        back_t = []
        any_reachable = False
        for triple in cand:
            score = problem.scores.get(GlimpseIndex(t, *triple))
            if t == 0:
                vals_t.append(score)
                back_t.append(-1)
                any_reachable = True
                continue
            best_val = neg_inf
            best_pos = -1
            get_pos = pos_prev.get
            for p_triple in preds(triple):
                k = get_pos(p_triple)
                if k is not None and vals_prev[k] > best_val:
                    best_val = vals_prev[k]
                    best_pos = k
            if best_pos < 0:
                vals_t.append(neg_inf)
                back_t.append(-1)
            else:
                vals_t.append(best_val + score)
                back_t.append(best_pos)
                any_reachable = True
        if not any_reachable:
            raise InfeasibleError(f"no feasible transition into time step {t}", t)
        values.append(vals_t)
        backs.append(back_t)
        pos_prev = {triple: p for p, triple in enumerate(cand)
                    if vals_t[p] != neg_inf}
        vals_prev = vals_t
    return DPTables(problem, candidates, values, backs)


def solve(problem: SearchProblem) -> Trajectory:
    """Highest-scoring feasible trajectory (deterministic under ties)."""
    return forward_pass(problem).best_trajectory(problem.endpoint_dirs)


def top_k_by_endpoint(problem: SearchProblem, k: int) -> list[Trajectory]:
    """Up to ``k`` trajectories, the best one per distinct final direction."""
    if k < 1:
        raise ValueError(f"k must be at least 1: {k}")
    return forward_pass(problem).endpoint_trajectories()[:k]


def best_ending_in_region(problem: SearchProblem, region) -> Trajectory:
    """Optimal trajectory whose final keyframe lies inside ``region``.

    ``region`` needs a ``contains(theta_deg, phi_deg)`` predicate.
    """
    grid = problem.grid
    dirs = [(ti, pi)
            for ti, tv in enumerate(grid.theta_values)
            for pi, pv in enumerate(grid.phi_values)
            if region.contains(tv, pv)]
    if problem.endpoint_dirs is not None:
        dirs = [d for d in dirs if d in set(problem.endpoint_dirs)]
    if not dirs:
        raise InfeasibleError(
            f"no lattice direction inside the requested region at step {grid.n_steps - 1}",
            grid.n_steps - 1)
    return forward_pass(problem).best_trajectory(dirs)


def trajectory_score(traj: Trajectory, scores: ScoreField) -> float:
    """Recompute a trajectory's total under a score field (same accumulation
    order as the solver, so totals compare exactly)."""
    total = 0.0
    for g in traj.glimpse_indices(scores.grid):
        total = total + scores.get(g)
    return total


def trajectory_to_dict(traj: Trajectory, video_id: str, grid: GlimpseGrid) -> dict:
    return {
        "video_id": video_id,
        "grid": grid_to_manifest(grid),
        "keyframe_interval_s": traj.keyframe_interval_s,
        "keyframes": [
            {"t_s": t, "theta_deg": p.theta_deg, "phi_deg": p.phi_deg,
             "focal_scale": p.focal_scale}
            for t, p in traj.keyframes
        ],
        "total_score": traj.total_score,
        "meta": traj.meta,
    }


def trajectory_from_dict(data: dict) -> tuple[Trajectory, str, GlimpseGrid]:
    try:
        keyframes = [(float(k["t_s"]),
                      CameraPose(float(k["theta_deg"]), float(k["phi_deg"]),
                                 float(k["focal_scale"])))
                     for k in data["keyframes"]]
        traj = Trajectory(keyframes, float(data["total_score"]),
                          float(data["keyframe_interval_s"]), dict(data.get("meta", {})))
        return traj, str(data["video_id"]), grid_from_manifest(data["grid"])
    except KeyError as exc:
        raise ValueError(f"trajectory JSON missing field {exc}") from exc


def save_trajectory(path: str | Path, traj: Trajectory, video_id: str,
                    grid: GlimpseGrid) -> None:
    Path(path).write_text(
        json.dumps(trajectory_to_dict(traj, video_id, grid), sort_keys=True, indent=2) + "\n")


def load_trajectory(path: str | Path) -> tuple[Trajectory, str, GlimpseGrid]:
    return trajectory_from_dict(json.loads(Path(path).read_text()))
