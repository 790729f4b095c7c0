"""Rendering NFOV output video from equirectangular input frames.

Input video is consumed as a directory of zero-padded numbered PNG frames
(``000000.png``, ``000001.png``, ...) plus a ``manifest.json`` holding
``{"width", "height", "fps", "frame_count"}``.  Conversion to and from real
video containers is left to ffmpeg; see the README for the recipe.

Rendering inverts the viewport mapping per output pixel: pixel center ->
direction on the sphere -> equirectangular coordinates -> bilinear sample
with horizontal wraparound at the azimuth seam and vertical clamping at the
poles.
"""

from __future__ import annotations

import bisect
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np
from PIL import Image

from .geometry import (
    CameraPose,
    FrameGeometry,
    _pixel_to_direction_unchecked,
    direction_to_equirect,
    fov_from_focal,
    pose_to_direction,
)

FRAME_NAME = "{:06d}.png"
MANIFEST_NAME = "manifest.json"

DEFAULT_OUT_WIDTH = 640
DEFAULT_OUT_HEIGHT = 360


@dataclass
class EquirectSequence:
    """An addressable sequence of equirectangular frames."""

    width: int
    height: int
    fps: float
    frame_count: int
    _loader: Callable[[int], np.ndarray] = field(repr=False)

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise ValueError(f"bad frame dimensions {self.width}x{self.height}")
        if self.fps <= 0:
            raise ValueError(f"fps must be positive: {self.fps}")
        if self.frame_count <= 0:
            raise ValueError(f"frame count must be positive: {self.frame_count}")

    @property
    def duration_s(self) -> float:
        return self.frame_count / self.fps

    def frame(self, i: int) -> np.ndarray:
        """Frame ``i`` as a (height, width, 3) uint8 array."""
        if not 0 <= i < self.frame_count:
            raise ValueError(f"missing input frame {i}: sequence has {self.frame_count} frames")
        img = self._loader(i)
        if img.shape[:2] != (self.height, self.width):
            raise ValueError(
                f"frame {i} is {img.shape[1]}x{img.shape[0]}, "
                f"manifest says {self.width}x{self.height}")
        return img

    @classmethod
    def open(cls, directory: str | Path) -> "EquirectSequence":
        directory = Path(directory)
        manifest_path = directory / MANIFEST_NAME
        if not manifest_path.is_file():
            raise ValueError(f"no {MANIFEST_NAME} in {directory}")
        manifest = json.loads(manifest_path.read_text())
        try:
            width = int(manifest["width"])
            height = int(manifest["height"])
            fps = float(manifest["fps"])
            frame_count = int(manifest["frame_count"])
        except KeyError as exc:
            raise ValueError(f"frame manifest missing field {exc}") from exc

        def load(i: int) -> np.ndarray:
            path = directory / FRAME_NAME.format(i)
            if not path.is_file():
                raise ValueError(f"missing input frame {i}: {path} does not exist")
            with Image.open(path) as img:
                return np.asarray(img.convert("RGB"))

        return cls(width, height, fps, frame_count, load)

    @classmethod
    def from_arrays(cls, frames: Sequence[np.ndarray], fps: float) -> "EquirectSequence":
        frames = [np.asarray(f) for f in frames]
        h, w = frames[0].shape[:2]
        return cls(w, h, fps, len(frames), lambda i: frames[i])


def write_sequence(directory: str | Path, frames: Iterable[np.ndarray], fps: float) -> dict:
    """Write frames plus manifest to ``directory``; returns the manifest."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    count = 0
    width = height = None
    for i, frame in enumerate(frames):
        arr = np.asarray(frame)
        if arr.dtype != np.uint8:
            arr = np.clip(np.rint(arr), 0, 255).astype(np.uint8)
        if width is None:
            height, width = arr.shape[:2]
        Image.fromarray(arr).save(directory / FRAME_NAME.format(i))
        count = i + 1
    if count == 0:
        raise ValueError("refusing to write an empty frame sequence")
    manifest = {"width": width, "height": height, "fps": fps, "frame_count": count}
    (directory / MANIFEST_NAME).write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n")
    return manifest


def sample_equirect(img: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Bilinear sample at continuous equirect coordinates.

    Pixel j's center sits at coordinate j + 0.5.  Sampling wraps across the
    left/right azimuth seam and clamps at the top/bottom rows.
    """
    h, w = img.shape[:2]
    x = np.asarray(u, dtype=float) - 0.5
    y = np.asarray(v, dtype=float) - 0.5
    x0 = np.floor(x).astype(np.int64)
    y0 = np.floor(y).astype(np.int64)
    fx = x - x0
    fy = y - y0
    x0w = x0 % w
    x1w = (x0 + 1) % w
    y0c = np.clip(y0, 0, h - 1)
    y1c = np.clip(y0 + 1, 0, h - 1)
    vals = img.astype(np.float64)
    if vals.ndim == 2:
        fx_ = fx
        fy_ = fy
    else:
        fx_ = fx[..., None]
        fy_ = fy[..., None]
    top = vals[y0c, x0w] * (1.0 - fx_) + vals[y0c, x1w] * fx_
    bot = vals[y1c, x0w] * (1.0 - fx_) + vals[y1c, x1w] * fx_
    return top * (1.0 - fy_) + bot * fy_


def viewport_sample_coords(pose: CameraPose, geom: FrameGeometry,
                           eq_width: int, eq_height: int) -> tuple[np.ndarray, np.ndarray]:
    """Equirect coordinates sampled by each output pixel center."""
    px = np.arange(geom.width, dtype=float) + 0.5
    py = np.arange(geom.height, dtype=float) + 0.5
    pxg, pyg = np.meshgrid(px, py)
    dirs = _pixel_to_direction_unchecked(pxg, pyg, pose, geom)
    return direction_to_equirect(dirs, eq_width, eq_height)


def extract_viewport(frame: np.ndarray, pose: CameraPose, out_width: int,
                     out_height: int, fov_deg: float) -> np.ndarray:
    """Rectilinear crop of an equirect frame; float output, any channel count."""
    geom = FrameGeometry(out_width, out_height, fov_deg)
    u, v = viewport_sample_coords(pose, geom, frame.shape[1], frame.shape[0])
    return sample_equirect(frame, u, v)


def render_frame(eq_frame: np.ndarray, pose: CameraPose, geom: FrameGeometry) -> np.ndarray:
    """Render one NFOV output frame from one equirect frame.

    ``geom.fov_deg`` must agree with the pose's focal scale, since the pose
    is what trajectory files carry.
    """
    if abs(geom.fov_deg - fov_from_focal(pose.focal_scale)) > 1e-6:
        raise ValueError(
            f"geom fov {geom.fov_deg} does not match pose focal scale "
            f"{pose.focal_scale} (fov {fov_from_focal(pose.focal_scale):.4f})")
    out = extract_viewport(eq_frame, pose, geom.width, geom.height, geom.fov_deg)
    if eq_frame.dtype == np.uint8:
        return np.clip(np.rint(out), 0, 255).astype(np.uint8)
    return out


@dataclass
class PoseSchedule:
    """One camera pose per output frame."""

    poses: list[CameraPose]
    fps: float

    def __len__(self) -> int:
        return len(self.poses)


def _slerp(d0: np.ndarray, d1: np.ndarray, s: float) -> np.ndarray:
    dot = float(np.clip(np.dot(d0, d1), -1.0, 1.0))
    omega = math.acos(dot)
    if math.sin(omega) < 1e-9:
        mix = (1.0 - s) * d0 + s * d1
        norm = np.linalg.norm(mix)
        if norm < 1e-12:
            return d0
        return mix / norm
    return (math.sin((1.0 - s) * omega) * d0 + math.sin(s * omega) * d1) / math.sin(omega)


def spherical_midpoint(a: CameraPose, b: CameraPose) -> tuple[float, float]:
    """(theta, phi) halfway along the great circle between two poses."""
    d = _slerp(pose_to_direction(a), pose_to_direction(b), 0.5)
    theta = math.degrees(math.asin(max(-1.0, min(1.0, float(d[2])))))
    phi = math.degrees(math.atan2(float(d[1]), float(d[0]))) % 360.0
    return theta, phi


def expand_schedule(traj, fps: float, mode: str = "hold",
                    transition_s: float = 1.0) -> PoseSchedule:
    """Expand trajectory keyframes into one pose per output frame.

    ``hold`` keeps each keyframe's pose until the next keyframe time.
    ``smooth`` additionally blends into each keyframe over a transition
    window of ``transition_s`` seconds that ends exactly at the keyframe
    time, interpolating direction spherically and focal scale linearly, so
    the schedule still equals the keyframe pose at every keyframe time.

    The schedule spans the trajectory's full duration: last keyframe time
    plus one keyframe interval.
    """
    if mode not in ("hold", "smooth"):
        raise ValueError(f"unknown schedule mode: {mode!r}")
    if fps <= 0:
        raise ValueError(f"fps must be positive: {fps}")
    times = [t for t, _ in traj.keyframes]
    poses = [p for _, p in traj.keyframes]
    if not times:
        raise ValueError("trajectory has no keyframes")
    duration = times[-1] + traj.keyframe_interval_s
    n_frames = int(round(duration * fps))
    window = min(transition_s, traj.keyframe_interval_s)
    out: list[CameraPose] = []
    for i in range(n_frames):
        tau = i / fps
        k = bisect.bisect_right(times, tau + 1e-9) - 1
        k = max(k, 0)
        pose = poses[k]
        if mode == "smooth" and k + 1 < len(poses) and window > 0:
            t_next = times[k + 1]
            if tau >= t_next - window:
                s = (tau - (t_next - window)) / window
                d = _slerp(pose_to_direction(poses[k]), pose_to_direction(poses[k + 1]), s)
                theta = math.degrees(math.asin(max(-1.0, min(1.0, float(d[2])))))
                phi = math.degrees(math.atan2(float(d[1]), float(d[0]))) % 360.0
                focal = (1.0 - s) * poses[k].focal_scale + s * poses[k + 1].focal_scale
                pose = CameraPose(theta, phi, focal)
        out.append(pose)
    return PoseSchedule(out, fps)


def render_trajectory(seq: EquirectSequence, traj, out_width: int = DEFAULT_OUT_WIDTH,
                      out_height: int = DEFAULT_OUT_HEIGHT, mode: str = "hold",
                      transition_s: float = 1.0) -> Iterator[np.ndarray]:
    """Yield one rendered output frame per input frame over the trajectory.

    Raises:
        ValueError: If the sequence is shorter than the trajectory span
            (naming the first missing frame index), or on a schedule error.
    """
    schedule = expand_schedule(traj, seq.fps, mode, transition_s)
    if len(schedule) > seq.frame_count:
        raise ValueError(
            f"missing input frame {seq.frame_count}: trajectory needs "
            f"{len(schedule)} frames")
    for i, pose in enumerate(schedule.poses):
        geom = FrameGeometry(out_width, out_height, fov_from_focal(pose.focal_scale))
        yield render_frame(seq.frame(i), pose, geom)
