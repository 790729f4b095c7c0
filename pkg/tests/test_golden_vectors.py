"""The shared UI golden vectors stay in sync with the library geometry.

The annotation editor re-implements strip mapping, overlays, zoom stepping
and the preview remap in TypeScript against shared/golden_ui_vectors.json.
These tests pin the committed file to the generator and check the vectors
against the library from the other direction, so neither side can drift.
"""

import importlib.util
import json
import math
from pathlib import Path

import numpy as np
import pytest

from vcam360.geometry import (
    CameraPose,
    FrameGeometry,
    direction_to_viewport,
    fov_from_focal,
    pose_to_direction,
)
from vcam360.metrics import FrameTrack, load_track, pool_frame, pool_trajectory
from vcam360.renderer import render_frame

REPO = Path(__file__).resolve().parent.parent
VECTORS_PATH = REPO / "shared" / "golden_ui_vectors.json"
TRACK_PATH = REPO / "shared" / "example_human_track.json"


def _load_generator():
    spec = importlib.util.spec_from_file_location(
        "gen_golden", REPO / "tools" / "gen_golden.py")
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    return mod


@pytest.fixture(scope="module")
def gen():
    return _load_generator()


@pytest.fixture(scope="module")
def vectors():
    return json.loads(VECTORS_PATH.read_text())


class TestCommittedFiles:
    def test_vectors_match_generator(self, gen, vectors):
        assert gen.build_vectors() == vectors

    def test_track_matches_generator(self, gen):
        assert gen.build_example_track() == json.loads(TRACK_PATH.read_text())

    def test_vector_file_formatting_is_stable(self, gen, vectors):
        text = json.dumps(gen.build_vectors(), indent=1, sort_keys=True) + "\n"
        assert text == VECTORS_PATH.read_text()


class TestStripMapping:
    def test_center_anchors(self, gen):
        for pan in (0.0, 180.0):
            theta, phi = gen.strip_point_to_pose(810.0, 270.0, 1620.0, 540.0, pan)
            assert theta == 0.0
            assert phi == pan

    def test_top_edge_clamps_to_north_pole(self, gen):
        theta, _ = gen.strip_point_to_pose(100.0, 0.0, 1620.0, 540.0, 0.0)
        assert theta == 90.0
        theta, _ = gen.strip_point_to_pose(100.0, 540.0, 1620.0, 540.0, 0.0)
        assert theta == -90.0

    def test_extension_bands_duplicate_main_band(self, gen):
        # A point 360 degrees of strip away shows the same azimuth.
        w = 1620.0
        for x in (10.0, 200.0, 500.0):
            _, phi_a = gen.strip_point_to_pose(x, 270.0, w, 540.0, 0.0)
            _, phi_b = gen.strip_point_to_pose(x + w * 2 / 3, 270.0, w, 540.0, 0.0)
            assert phi_b == pytest.approx(phi_a % 360.0, abs=1e-9)

    def test_round_trip_identity_within_half_degree(self, gen):
        rng = np.random.default_rng(7)
        w, h = 1620.0, 540.0
        for _ in range(300):
            pan = float(rng.choice([0.0, 180.0]))
            x = float(rng.uniform(0.0, w))
            y = float(rng.uniform(0.0, h))
            theta, phi = gen.strip_point_to_pose(x, y, w, h, pan)
            x2, y2, alt = gen.pose_to_strip_point(theta, phi, w, h, pan)
            # x comes back either at the primary spot or a duplicate band.
            dx = min([abs(x2 - x)] + [abs(a - x) for a in alt])
            assert dx * 540.0 / w <= 0.5
            assert abs(y2 - y) * 180.0 / h <= 0.5

    def test_pointer_cases_recompute(self, gen, vectors):
        for case in vectors["pointer_cases"]:
            theta, phi = gen.strip_point_to_pose(
                case["x"], case["y"], case["width"], case["height"],
                case["pan_deg"])
            assert theta == pytest.approx(case["theta_deg"], abs=1e-9)
            assert phi == pytest.approx(case["phi_deg"], abs=1e-9)

    def test_known_pointer_values(self, vectors):
        by_key = {(c["pan_deg"], c["x"], c["y"]): c
                  for c in vectors["pointer_cases"]}
        assert by_key[(0.0, 810.0, 270.0)]["phi_deg"] == 0.0
        assert by_key[(180.0, 810.0, 270.0)]["phi_deg"] == 180.0
        # Middle of the left duplicate band at pan 0.
        assert by_key[(0.0, 135.0, 270.0)]["phi_deg"] == 135.0
        # Top edge clamps.
        assert by_key[(0.0, 810.0, 0.0)]["theta_deg"] == 90.0

    def test_strip_columns_match_equirect_layout(self, vectors):
        for entry in vectors["strip_columns"]:
            w_eq, w_strip = entry["eq_width"], entry["strip_width"]
            pan = entry["pan_deg"]
            for j, src in enumerate(entry["source_col"]):
                phi = (pan + ((j + 0.5) / w_strip - 0.5) * 540.0) % 360.0
                assert src == int(math.floor(phi / 360.0 * w_eq)) % w_eq
            # Strip columns one full turn apart read the same source column.
            period = w_strip * 360 // 540
            cols = entry["source_col"]
            for j in range(w_strip - period):
                assert cols[j] == cols[j + period]


class TestZoomSteps:
    def test_table_clamps_at_both_ends(self, vectors):
        table = {(c["from"], c["direction"]): c["to"]
                 for c in vectors["zoom_steps"]}
        assert table[(1.0, "in")] == 1.5
        assert table[(1.5, "in")] == 1.5
        assert table[(0.5, "in")] == 1.0
        assert table[(1.0, "out")] == 0.5
        assert table[(0.5, "out")] == 0.5
        assert table[(1.5, "out")] == 1.0

    def test_steps_stay_on_lattice_levels(self, vectors):
        levels = set(vectors["zoom_levels"])
        for c in vectors["zoom_steps"]:
            assert c["to"] in levels
            assert abs(c["to"] - c["from"]) <= 0.5 + 1e-12

    def test_fov_table_matches_lens_model(self, vectors):
        for key, fov in vectors["fov_deg"].items():
            assert fov == pytest.approx(fov_from_focal(float(key)), abs=1e-6)


class TestViewportBorders:
    def test_points_project_back_to_their_ndc_position(self, vectors):
        for entry in vectors["viewport_borders"]:
            p = entry["pose"]
            pose = CameraPose(p["theta_deg"], p["phi_deg"], p["focal_scale"])
            aw, ah = entry["aspect"]
            geom = FrameGeometry(aw, ah, fov_from_focal(p["focal_scale"]))
            for pt in entry["points"]:
                d = pose_to_direction(
                    CameraPose(pt["theta_deg"], pt["phi_deg"]))
                px, py = direction_to_viewport(d, pose, geom)
                assert 2.0 * (px / aw) - 1.0 == pytest.approx(pt["x_ndc"], abs=1e-6)
                assert 2.0 * (py / ah) - 1.0 == pytest.approx(pt["y_ndc"], abs=1e-6)

    def test_border_stays_within_half_fov_cone(self, vectors):
        # Corner points sit farthest out; all must stay inside the diagonal
        # half-angle, which is below 90 degrees for every zoom level.
        for entry in vectors["viewport_borders"]:
            p = entry["pose"]
            pose = CameraPose(p["theta_deg"], p["phi_deg"], p["focal_scale"])
            axis = pose_to_direction(pose)
            half_w = math.tan(math.radians(fov_from_focal(p["focal_scale"])) / 2)
            half_h = half_w * entry["aspect"][1] / entry["aspect"][0]
            diag = math.degrees(math.atan(math.hypot(half_w, half_h)))
            for pt in entry["points"]:
                d = pose_to_direction(CameraPose(pt["theta_deg"], pt["phi_deg"]))
                ang = math.degrees(math.acos(np.clip(float(axis @ d), -1, 1)))
                assert ang <= diag + 1e-6

    def test_border_of_pose_near_seam_is_contiguous_on_strip(self, gen, vectors):
        # Pose (0, 350) at pan 0: every border azimuth unwraps to one
        # uninterrupted x range on the strip, no split across the seam.
        entry = next(e for e in vectors["viewport_borders"]
                     if e["pose"]["phi_deg"] == 350.0)
        center_x, _, _ = gen.pose_to_strip_point(0.0, 350.0, 1620.0, 540.0, 0.0)
        xs = []
        for pt in entry["points"]:
            delta = (pt["phi_deg"] - 350.0 + 180.0) % 360.0 - 180.0
            xs.append(center_x + delta * 1620.0 / 540.0)
        assert all(0.0 <= x <= 1620.0 for x in xs)
        assert max(xs) - min(xs) < 1620.0 / 3  # far narrower than one band


class TestPreview:
    def test_samples_match_renderer(self, gen, vectors):
        pv = vectors["preview"]
        frame = np.array(pv["frame"]["pixels"], dtype=np.uint8)
        assert frame.shape == (pv["frame"]["height"], pv["frame"]["width"], 3)
        vp = pv["viewport"]
        for case in pv["cases"]:
            p = case["pose"]
            pose = CameraPose(p["theta_deg"], p["phi_deg"], p["focal_scale"])
            geom = FrameGeometry(vp["width"], vp["height"],
                                 fov_from_focal(p["focal_scale"]))
            out = render_frame(frame, pose, geom)
            for s in case["samples"]:
                assert [int(c) for c in out[s["y"], s["x"]]] == s["rgb"]

    def test_frozen_center_pixel(self, vectors):
        # Regenerating with different conventions would shift these bytes.
        case0 = vectors["preview"]["cases"][0]
        center = next(s for s in case0["samples"] if s["x"] == 12 and s["y"] == 7)
        assert center["rgb"] == [124, 130, 254]


class TestExampleTrack:
    def test_loads_as_human_flavor(self):
        track = load_track(TRACK_PATH, fps=2.0)
        assert track.source == "human"
        assert len(track) == 40
        assert track.fps == 2.0

    def test_self_overlap_pools_to_one(self):
        track = load_track(TRACK_PATH, fps=2.0)
        assert pool_trajectory([track], [track])[0] == pytest.approx(1.0)
        assert pool_frame([track], [track])[0] == pytest.approx(1.0)

    def test_poses_stay_on_zoom_levels(self, vectors):
        data = json.loads(TRACK_PATH.read_text())
        levels = set(vectors["zoom_levels"])
        for f in data["frames"]:
            assert f["focal_scale"] in levels
            assert -90.0 <= f["theta_deg"] <= 90.0
            assert 0.0 <= f["phi_deg"] < 360.0

    def test_overlap_against_shifted_copy_is_below_one(self):
        track = load_track(TRACK_PATH, fps=2.0)
        shifted = FrameTrack(
            [CameraPose(p.theta_deg, (p.phi_deg + 30.0) % 360.0, p.focal_scale)
             for p in track.poses], track.fps, source="human")
        assert pool_trajectory([track], [shifted])[0] < 1.0


class TestRecordingInvariant:
    def test_sixty_seconds_at_thirty_fps(self, vectors):
        rec = vectors["recording"]
        n = int(round(rec["duration_s"] * rec["fps"]))
        assert n == rec["frame_count"] == 1800
        assert rec["last_frame_index"] == n - 1 == 1799
