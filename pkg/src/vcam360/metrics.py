"""Agreement metrics between algorithm trajectories and human edits.

Per-frame agreement is the overlap score

    overlap = max(1 - 2 * delta / (fov_a + fov_b), 0)

where ``delta`` is the great-circle angle between the two principal axes and
the FOVs come from each frame's focal scale.  Tracks are pooled two ways:

* trajectory pooling: mean per-frame overlap against each human track, then
  the best human;
* frame pooling: best human per frame, then the mean, which can only exceed
  trajectory pooling (the max moves inside the mean).

Diversity counts connected groups of trajectories under the relation
"fewer than 10% of frames differ"; the cost report aggregates score
evaluation counts (and wall time only when explicitly supplied, so artifact
bytes stay reproducible).

Field names for rater-facing metrics (distinguishability, likeness,
transferability) are reserved: reports never contain them, since those
require human studies rather than computation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .dp_solver import Trajectory, trajectory_from_dict
from .geometry import CameraPose, fov_from_focal, pose_to_direction
from .renderer import expand_schedule


@dataclass
class FrameTrack:
    """A camera pose for every output frame of one edit."""

    poses: list[CameraPose]
    fps: float
    source: str = "algorithm"

    def __post_init__(self) -> None:
        if not self.poses:
            raise ValueError("a frame track needs at least one pose")
        if self.fps <= 0:
            raise ValueError(f"fps must be positive: {self.fps}")

    def __len__(self) -> int:
        return len(self.poses)

    @classmethod
    def from_trajectory(cls, traj: Trajectory, fps: float,
                        source: str = "algorithm") -> "FrameTrack":
        """Hold-expand a keyframe trajectory to one pose per frame."""
        return cls(expand_schedule(traj, fps, mode="hold").poses, fps, source)


def frame_overlap(a: CameraPose, b: CameraPose) -> float:
    """Overlap score between two frames; 1 at identity, 0 once the axes are
    a full average-FOV apart."""
    d = np.degrees(np.arccos(np.clip(
        np.dot(pose_to_direction(a), pose_to_direction(b)), -1.0, 1.0)))
    fov_a = fov_from_focal(a.focal_scale)
    fov_b = fov_from_focal(b.focal_scale)
    return float(max(1.0 - 2.0 * d / (fov_a + fov_b), 0.0))


def _overlap_series(a: FrameTrack, b: FrameTrack) -> np.ndarray:
    if len(a) != len(b):
        raise ValueError(f"track lengths differ: {len(a)} vs {len(b)}")
    da = np.array([pose_to_direction(p) for p in a.poses])
    db = np.array([pose_to_direction(p) for p in b.poses])
    delta = np.degrees(np.arccos(np.clip(np.sum(da * db, axis=1), -1.0, 1.0)))
    fov_a = np.array([fov_from_focal(p.focal_scale) for p in a.poses])
    fov_b = np.array([fov_from_focal(p.focal_scale) for p in b.poses])
    return np.maximum(1.0 - 2.0 * delta / (fov_a + fov_b), 0.0)


def resample_track(track: FrameTrack, fps: float, frame_count: int) -> FrameTrack:
    """Nearest-pose-in-time resampling to a target fps and length."""
    if track.fps == fps and len(track) == frame_count:
        return track
    src_times = np.arange(len(track)) / track.fps
    out = []
    for i in range(frame_count):
        t = i / fps
        out.append(track.poses[int(np.argmin(np.abs(src_times - t)))])
    return FrameTrack(out, fps, track.source)


def _prepare(algo_tracks: Sequence[FrameTrack],
             human_tracks: Sequence[FrameTrack]) -> list[FrameTrack]:
    if not algo_tracks:
        raise ValueError("no algorithm tracks given")
    if not human_tracks:
        raise ValueError("no human tracks given")
    fps = algo_tracks[0].fps
    n = len(algo_tracks[0])
    for tr in algo_tracks[1:]:
        if tr.fps != fps or len(tr) != n:
            raise ValueError("algorithm tracks must share fps and length")
    return [resample_track(h, fps, n) for h in human_tracks]


def pool_trajectory(algo_tracks: Sequence[FrameTrack],
                    human_tracks: Sequence[FrameTrack]) -> list[float]:
    """Per algorithm track: mean overlap per human track, then the best human."""
    humans = _prepare(algo_tracks, human_tracks)
    return [max(float(np.mean(_overlap_series(a, h))) for h in humans)
            for a in algo_tracks]


def pool_frame(algo_tracks: Sequence[FrameTrack],
               human_tracks: Sequence[FrameTrack]) -> list[float]:
    """Per algorithm track: best human per frame, then the mean over frames."""
    humans = _prepare(algo_tracks, human_tracks)
    out = []
    for a in algo_tracks:
        series = np.stack([_overlap_series(a, h) for h in humans])
        out.append(float(np.mean(np.max(series, axis=0))))
    return out


def _lattice_key(pose: CameraPose) -> tuple[float, float, float]:
    return (pose.theta_deg, pose.phi_deg, pose.focal_scale)


def diversity_group_labels(trajs: Sequence[Trajectory], fps: float = 2.0) -> list[int]:
    """Group label per trajectory; two belong together when fewer than 10%
    of their hold-expanded frames differ (transitively closed)."""
    tracks = [FrameTrack.from_trajectory(t, fps) for t in trajs]
    n_frames = len(tracks[0]) if tracks else 0
    for tr in tracks:
        if len(tr) != n_frames:
            raise ValueError("trajectories must share a duration to compare diversity")
    n = len(tracks)
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        keys_i = [_lattice_key(p) for p in tracks[i].poses]
        for j in range(i + 1, n):
            keys_j = [_lattice_key(p) for p in tracks[j].poses]
            differing = sum(a != b for a, b in zip(keys_i, keys_j))
            if differing < 0.10 * n_frames:
                parent[find(i)] = find(j)
    roots = {}
    labels = []
    for i in range(n):
        r = find(i)
        labels.append(roots.setdefault(r, len(roots)))
    return labels


def diversity_groups(trajs: Sequence[Trajectory], fps: float = 2.0) -> int:
    """Number of distinct trajectory groups."""
    if not trajs:
        return 0
    return max(diversity_group_labels(trajs, fps)) + 1


def cost_report(stage_evals: dict[str, int], full_grid_size: int,
                wall_time_s: Optional[float] = None,
                video_length_s: Optional[float] = None) -> dict:
    """Aggregate search cost: evaluation counts, ratio to the full lattice,
    and (only when supplied) wall time normalized per input minute."""
    if full_grid_size <= 0:
        raise ValueError(f"full grid size must be positive: {full_grid_size}")
    total = sum(stage_evals.values())
    report = {
        "stages": dict(sorted(stage_evals.items())),
        "total_evals": total,
        "full_grid_size": full_grid_size,
        "ratio": total / full_grid_size,
    }
    if wall_time_s is not None and video_length_s:
        report["seconds_per_input_minute"] = wall_time_s * 60.0 / video_length_s
    return report


def load_track(path: str | Path, fps: float) -> FrameTrack:
    """Read either trajectory flavor from disk as a frame track.

    Keyframe trajectory files are hold-expanded at ``fps``; human files
    (``"kind": "human"`` with per-frame poses) are taken as recorded.
    """
    data = json.loads(Path(path).read_text())
    if data.get("kind") == "human":
        try:
            poses = [CameraPose(float(f["theta_deg"]), float(f["phi_deg"]),
                                float(f["focal_scale"]))
                     for f in data["frames"]]
            return FrameTrack(poses, float(data["fps"]), source="human")
        except KeyError as exc:
            raise ValueError(f"human track JSON missing field {exc}") from exc
    traj, _, _ = trajectory_from_dict(data)
    return FrameTrack.from_trajectory(traj, fps)
