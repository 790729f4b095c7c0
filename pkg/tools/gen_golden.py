#!/usr/bin/env python3
"""Generate the shared golden vectors that keep the annotation UI honest.

The browser editor re-implements a slice of the camera geometry in
TypeScript: the 540-degree strip mapping, viewport border overlays, zoom
stepping, and the preview remap.  Both implementations are tested against
the JSON emitted here, so any drift in conventions shows up as a test
failure on one side or the other instead of a silent disagreement.

Writes:
    shared/golden_ui_vectors.json
    shared/example_human_track.json

Run from the repository root:
    python tools/gen_golden.py
"""

import json
import math
from pathlib import Path

import numpy as np

from vcam360.geometry import (
    CameraPose,
    FrameGeometry,
    camera_basis,
    direction_to_pose,
    fov_from_focal,
    viewport_plane_extents,
)
from vcam360.renderer import render_frame

REPO_ROOT = Path(__file__).resolve().parent.parent
SHARED_DIR = REPO_ROOT / "shared"

# Strip conventions.  The editor shows the panned equirect frame with a
# 90 degree duplicated band on each side, 540 degrees total.  The strip's
# horizontal center shows azimuth == pan offset, azimuth increases to the
# right (equirect column order), and the vertical axis is plain equirect
# latitude with the top edge at +90 elevation.
STRIP_SPAN_DEG = 540.0
EXTENSION_DEG = 90.0

ZOOM_LEVELS = (0.5, 1.0, 1.5)
PAN_PROTOCOL_DEG = (0.0, 180.0, 0.0, 180.0)


def strip_point_to_pose(x: float, y: float, width: float, height: float,
                        pan_deg: float) -> tuple[float, float]:
    """Elevation/azimuth under the pointer at strip coordinates (x, y)."""
    phi = (pan_deg + (x / width - 0.5) * STRIP_SPAN_DEG) % 360.0
    theta = (0.5 - y / height) * 180.0
    theta = max(-90.0, min(90.0, theta))
    return theta, phi


def pose_to_strip_point(theta_deg: float, phi_deg: float, width: float,
                        height: float, pan_deg: float):
    """Primary strip coordinates of a pose, plus duplicate-band positions.

    The primary x uses the azimuth representative nearest the strip center;
    a pose whose azimuth also falls inside a 90 degree extension band gets
    that second x reported in ``alternate_x``.
    """
    delta = (phi_deg - pan_deg + 180.0) % 360.0 - 180.0
    x = width * (0.5 + delta / STRIP_SPAN_DEG)
    y = height * (0.5 - theta_deg / 180.0)
    alternate_x = []
    for shift in (-360.0, 360.0):
        xa = width * (0.5 + (delta + shift) / STRIP_SPAN_DEG)
        if 0.0 <= xa <= width:
            alternate_x.append(round(xa, 9))
    return x, y, alternate_x


def strip_source_columns(eq_width: int, strip_width: int, pan_deg: float):
    """Equirect source column for each strip column (nearest neighbor)."""
    cols = []
    for j in range(strip_width):
        _, phi = strip_point_to_pose(j + 0.5, 0.5, strip_width, 1.0, pan_deg)
        cols.append(int(math.floor(phi / 360.0 * eq_width)) % eq_width)
    return cols


def step_zoom(focal_scale: float, direction: str) -> float:
    """One zoom step through the discrete focal levels, clamped at the ends."""
    idx = ZOOM_LEVELS.index(focal_scale)
    if direction == "in":
        idx = min(idx + 1, len(ZOOM_LEVELS) - 1)
    elif direction == "out":
        idx = max(idx - 1, 0)
    else:
        raise ValueError(f"unknown zoom direction {direction!r}")
    return ZOOM_LEVELS[idx]


def border_points(pose: CameraPose, aspect_w: int, aspect_h: int,
                  n_per_edge: int):
    """Viewport border sampled in normalized device coordinates.

    Walks the border clockwise from the top-left corner: top edge left to
    right, right edge down, bottom edge right to left, left edge up.  Each
    sample records its NDC position and the elevation/azimuth it lands on.
    """
    geom = FrameGeometry(aspect_w, aspect_h, fov_from_focal(pose.focal_scale))
    half_w, half_h = viewport_plane_extents(geom)
    forward, right, up = camera_basis(pose)
    edges = []
    ts = [i / n_per_edge for i in range(n_per_edge)]
    for t in ts:
        edges.append((-1.0 + 2.0 * t, -1.0))     # top, left -> right
    for t in ts:
        edges.append((1.0, -1.0 + 2.0 * t))      # right, top -> bottom
    for t in ts:
        edges.append((1.0 - 2.0 * t, 1.0))       # bottom, right -> left
    for t in ts:
        edges.append((-1.0, 1.0 - 2.0 * t))      # left, bottom -> top
    points = []
    for x_ndc, y_ndc in edges:
        d = forward + x_ndc * half_w * right - y_ndc * half_h * up
        p = direction_to_pose(d)
        points.append({
            "x_ndc": round(x_ndc, 9),
            "y_ndc": round(y_ndc, 9),
            "theta_deg": round(p.theta_deg, 9),
            "phi_deg": round(p.phi_deg, 9),
        })
    return points


def preview_frame(width: int = 32, height: int = 16) -> np.ndarray:
    """Small deterministic equirect test card (smooth, seam-free channels)."""
    j = np.arange(width, dtype=float) + 0.5
    i = np.arange(height, dtype=float) + 0.5
    jj, ii = np.meshgrid(j, i)
    r = 127.5 * (1.0 + np.sin(2.0 * np.pi * jj / width))
    g = 255.0 * ii / height
    b = 127.5 * (1.0 + np.cos(2.0 * np.pi * jj / width)
                 * np.cos(np.pi * (ii / height - 0.5)))
    img = np.stack([r, g, b], axis=-1)
    return np.clip(np.rint(img), 0, 255).astype(np.uint8)


def build_vectors() -> dict:
    pointer_cases = []
    strip_w, strip_h = 1620.0, 540.0
    probes = [
        # Anchors: the strip center always shows (0, pan).
        (0.0, strip_w / 2, strip_h / 2),
        (180.0, strip_w / 2, strip_h / 2),
        # Main-band edges and extension bands at pan 0.
        (0.0, strip_w / 6, strip_h / 2),          # left edge of the main band
        (0.0, 5 * strip_w / 6, strip_h / 2),      # right edge of the main band
        (0.0, 0.0, strip_h / 2),                  # far left of the left band
        (0.0, strip_w / 12, strip_h / 2),         # middle of the left band
        (0.0, 11 * strip_w / 12, strip_h / 2),    # middle of the right band
        # Elevation rows, including the clamped top/bottom edges.
        (0.0, strip_w / 2, 0.0),
        (0.0, strip_w / 2, strip_h),
        (0.0, strip_w / 2, strip_h / 4),
        (0.0, strip_w / 2, 3 * strip_h / 4),
        # Mixed probes at the protocol's second pan and one odd pan.
        (180.0, strip_w / 6, strip_h / 4),
        (180.0, strip_w * 0.75, strip_h * 0.6),
        (180.0, strip_w / 12, strip_h / 2),
        (90.0, strip_w * 0.3, strip_h * 0.1),
    ]
    for pan, x, y in probes:
        theta, phi = strip_point_to_pose(x, y, strip_w, strip_h, pan)
        pointer_cases.append({
            "pan_deg": pan, "width": strip_w, "height": strip_h,
            "x": round(x, 9), "y": round(y, 9),
            "theta_deg": round(theta, 9), "phi_deg": round(phi, 9),
        })

    pose_cases = []
    for pan, theta, phi in [
        (0.0, 0.0, 0.0),
        (0.0, 0.0, 350.0),
        (0.0, 45.0, 90.0),
        (0.0, -30.0, 170.0),
        (0.0, 0.0, 180.0),      # lands on the main-band edge, duplicate right
        (180.0, 0.0, 180.0),
        (180.0, 60.0, 0.0),
        (180.0, -90.0, 300.0),
        (90.0, 10.0, 350.0),
    ]:
        x, y, alternate_x = pose_to_strip_point(theta, phi, strip_w, strip_h, pan)
        pose_cases.append({
            "pan_deg": pan, "width": strip_w, "height": strip_h,
            "theta_deg": theta, "phi_deg": phi,
            "x": round(x, 9), "y": round(y, 9),
            "alternate_x": alternate_x,
        })

    zoom_cases = []
    for level in ZOOM_LEVELS:
        for direction in ("in", "out"):
            zoom_cases.append({
                "from": level, "direction": direction,
                "to": step_zoom(level, direction),
            })

    borders = []
    for theta, phi, focal in [
        (0.0, 0.0, 1.0),
        (0.0, 350.0, 1.0),
        (30.0, 90.0, 1.5),
        (0.0, 180.0, 0.5),
        (-20.0, 200.0, 1.0),
    ]:
        pose = CameraPose(theta, phi, focal)
        borders.append({
            "pose": {"theta_deg": theta, "phi_deg": phi, "focal_scale": focal},
            "aspect": [16, 9],
            "n_per_edge": 8,
            "points": border_points(pose, 16, 9, 8),
        })

    frame = preview_frame()
    vp_w, vp_h = 24, 14
    preview_cases = []
    sample_xy = [(vp_w // 2, vp_h // 2), (0, 0), (vp_w - 1, vp_h - 1), (5, 3)]
    for theta, phi, focal in [
        (0.0, 0.0, 1.0),
        (0.0, 90.0, 1.0),
        (20.0, 350.0, 1.5),
        (0.0, 180.0, 0.5),
        (-30.0, 45.0, 1.0),
    ]:
        pose = CameraPose(theta, phi, focal)
        geom = FrameGeometry(vp_w, vp_h, fov_from_focal(focal))
        out = render_frame(frame, pose, geom)
        samples = [{"x": x, "y": y, "rgb": [int(c) for c in out[y, x]]}
                   for x, y in sample_xy]
        preview_cases.append({
            "pose": {"theta_deg": theta, "phi_deg": phi, "focal_scale": focal},
            "samples": samples,
        })

    return {
        "conventions": {
            "strip_span_deg": STRIP_SPAN_DEG,
            "extension_deg": EXTENSION_DEG,
            "center_azimuth": "pan_offset",
            "azimuth_increases": "rightward",
            "top_edge_theta_deg": 90.0,
            "theta_clamped": True,
        },
        "pan_protocol_deg": list(PAN_PROTOCOL_DEG),
        "zoom_levels": list(ZOOM_LEVELS),
        "fov_deg": {str(f): round(fov_from_focal(f), 6) for f in ZOOM_LEVELS},
        "pointer_cases": pointer_cases,
        "pose_to_strip_cases": pose_cases,
        "zoom_steps": zoom_cases,
        "viewport_borders": borders,
        "strip_columns": [
            {"pan_deg": 0.0, "eq_width": 32, "strip_width": 48,
             "source_col": strip_source_columns(32, 48, 0.0)},
            {"pan_deg": 180.0, "eq_width": 32, "strip_width": 48,
             "source_col": strip_source_columns(32, 48, 180.0)},
        ],
        "preview": {
            "frame": {"width": frame.shape[1], "height": frame.shape[0],
                      "pixels": frame.tolist()},
            "viewport": {"width": vp_w, "height": vp_h},
            "rgb_tolerance": 2,
            "cases": preview_cases,
        },
        "recording": {
            "fps": 30.0,
            "duration_s": 60.0,
            "frame_count": 1800,
            "last_frame_index": 1799,
        },
    }


def build_example_track() -> dict:
    """A short recorded pan with one zoom change, in the uploaded format."""
    fps = 2.0
    n = 40
    frames = []
    for i in range(n):
        t = i / fps
        theta = round(12.0 * math.sin(2.0 * math.pi * t / 20.0), 6)
        phi = round((340.0 + 4.0 * t) % 360.0, 6)
        focal = 1.0 if i < n // 2 else 1.5
        frames.append({"theta_deg": theta, "phi_deg": phi,
                       "focal_scale": focal})
    return {
        "kind": "human",
        "video_id": "example",
        "pan_deg": 0.0,
        "pass_index": 1,
        "editor_id": "golden",
        "fps": fps,
        "frames": frames,
    }


def main() -> None:
    SHARED_DIR.mkdir(exist_ok=True)
    vectors = build_vectors()
    out = SHARED_DIR / "golden_ui_vectors.json"
    out.write_text(json.dumps(vectors, indent=1, sort_keys=True) + "\n")
    track = build_example_track()
    track_out = SHARED_DIR / "example_human_track.json"
    track_out.write_text(json.dumps(track, indent=1) + "\n")
    print(f"wrote {out}")
    print(f"wrote {track_out}")


if __name__ == "__main__":
    main()
