"""Annotation server endpoints over a real socket."""

import json
import threading
import urllib.error
import urllib.request

import numpy as np
import pytest

from vcam360.grid import build_full_grid, grid_to_manifest
from vcam360.renderer import write_sequence
from vcam360.server import AnnotationServer

from helpers import bump_video


@pytest.fixture
def running_server(tmp_path):
    frames_dir = tmp_path / "frames"
    write_sequence(frames_dir, bump_video(width=32, height=16, seconds=10.0), fps=2.0)
    grid_path = tmp_path / "grid.json"
    grid_path.write_text(json.dumps(grid_to_manifest(build_full_grid(10.0))))
    ui_dir = tmp_path / "ui"
    ui_dir.mkdir()
    (ui_dir / "index.html").write_text("<!doctype html><title>editor</title>")
    server = AnnotationServer(frames_dir, grid_path, tmp_path / "data", ui_dir=ui_dir)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield server, f"http://127.0.0.1:{server.port}"
    server.shutdown()
    thread.join(timeout=5)


def get(url):
    with urllib.request.urlopen(url) as resp:
        return resp.status, resp.headers, resp.read()


def get_json(url):
    status, headers, body = get(url)
    return status, json.loads(body)


def post_json(url, payload):
    req = urllib.request.Request(url, data=json.dumps(payload).encode(),
                                 headers={"Content-Type": "application/json"})
    with urllib.request.urlopen(req) as resp:
        return resp.status, json.loads(resp.read())


class TestGet:
    def test_manifest(self, running_server):
        _, base = running_server
        status, data = get_json(base + "/manifest")
        assert status == 200
        assert data == {"width": 32, "height": 16, "fps": 2.0, "frame_count": 20}

    def test_grid(self, running_server):
        _, base = running_server
        status, data = get_json(base + "/grid")
        assert status == 200
        assert len(data["phi_values"]) == 18

    def test_frame_bytes_match_disk(self, running_server):
        server, base = running_server
        status, headers, body = get(base + "/frames/3.png")
        assert status == 200
        assert headers["Content-Type"] == "image/png"
        assert body == (server.frames_dir / "000003.png").read_bytes()

    def test_cors_header_everywhere(self, running_server):
        _, base = running_server
        for path in ("/manifest", "/grid", "/frames/0.png", "/trajectories"):
            _, headers, _ = get(base + path)
            assert headers["Access-Control-Allow-Origin"] == "*"

    def test_missing_frame_404(self, running_server):
        _, base = running_server
        with pytest.raises(urllib.error.HTTPError) as exc:
            get(base + "/frames/999.png")
        assert exc.value.code == 404

    def test_unknown_path_404(self, running_server):
        _, base = running_server
        with pytest.raises(urllib.error.HTTPError) as exc:
            get(base + "/nope/nothing")
        assert exc.value.code == 404

    def test_static_ui_index(self, running_server):
        _, base = running_server
        status, headers, body = get(base + "/")
        assert status == 200
        assert b"editor" in body
        assert headers["Content-Type"].startswith("text/html")

    def test_path_traversal_blocked(self, running_server):
        _, base = running_server
        with pytest.raises(urllib.error.HTTPError) as exc:
            get(base + "/../grid.json")
        assert exc.value.code == 404


class TestUploads:
    def _payload(self, phi=0.0):
        return {"video_id": "vid01", "kind": "human", "fps": 30.0,
                "frames": [{"theta_deg": 0.0, "phi_deg": phi, "focal_scale": 1.0}]}

    def test_round_trip(self, running_server):
        _, base = running_server
        status, saved = post_json(base + "/trajectories", self._payload())
        assert status == 201
        assert saved == {"saved": "vid01_human_000.json"}
        status, listing = get_json(base + "/trajectories")
        assert listing == {"trajectories": ["vid01_human_000.json"]}
        status, back = get_json(base + "/trajectories/vid01_human_000.json")
        assert back == self._payload()

    def test_serials_increment(self, running_server):
        _, base = running_server
        names = [post_json(base + "/trajectories", self._payload(phi=i))[1]["saved"]
                 for i in range(3)]
        assert names == ["vid01_human_000.json", "vid01_human_001.json",
                         "vid01_human_002.json"]

    def test_algorithm_uploads_labeled_algo(self, running_server):
        _, base = running_server
        _, saved = post_json(base + "/trajectories", {"video_id": "vid01", "keyframes": []})
        assert saved["saved"] == "vid01_algo_000.json"

    def test_video_id_sanitized(self, running_server):
        _, base = running_server
        _, saved = post_json(base + "/trajectories",
                             {"video_id": "../../etc/passwd", "kind": "human"})
        assert "/" not in saved["saved"]
        assert saved["saved"].endswith("_human_000.json")

    def test_upload_survives_on_disk(self, running_server):
        server, base = running_server
        post_json(base + "/trajectories", self._payload())
        stored = json.loads((server.data_dir / "vid01_human_000.json").read_text())
        assert stored == self._payload()
        assert not list(server.data_dir.glob("*.tmp"))

    def test_invalid_json_400(self, running_server):
        _, base = running_server
        req = urllib.request.Request(base + "/trajectories", data=b"{not json")
        with pytest.raises(urllib.error.HTTPError) as exc:
            urllib.request.urlopen(req)
        assert exc.value.code == 400

    def test_missing_video_id_400(self, running_server):
        _, base = running_server
        with pytest.raises(urllib.error.HTTPError) as exc:
            post_json(base + "/trajectories", {"kind": "human"})
        assert exc.value.code == 400

    def test_get_missing_trajectory_404(self, running_server):
        _, base = running_server
        with pytest.raises(urllib.error.HTTPError) as exc:
            get(base + "/trajectories/absent.json")
        assert exc.value.code == 404

    def test_concurrent_uploads_get_distinct_names(self, running_server):
        _, base = running_server
        names = []
        lock = threading.Lock()

        def upload(i):
            _, saved = post_json(base + "/trajectories", self._payload(phi=float(i)))
            with lock:
                names.append(saved["saved"])

        threads = [threading.Thread(target=upload, args=(i,)) for i in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert len(set(names)) == 8


class TestConstruction:
    def test_missing_frames_manifest_rejected(self, tmp_path):
        grid_path = tmp_path / "grid.json"
        grid_path.write_text(json.dumps(grid_to_manifest(build_full_grid(10.0))))
        with pytest.raises(ValueError):
            AnnotationServer(tmp_path, grid_path, tmp_path / "data")

    def test_missing_grid_manifest_rejected(self, tmp_path):
        frames_dir = tmp_path / "frames"
        write_sequence(frames_dir, bump_video(width=16, height=8, seconds=5.0), 2.0)
        with pytest.raises(ValueError):
            AnnotationServer(frames_dir, tmp_path / "grid.json", tmp_path / "data")
