"""Local HTTP server feeding the annotation editor.

Serves the input frame sequence, the glimpse lattice manifest, and accepts
trajectory uploads.  Uploads are written atomically (temp file + rename)
into the data directory so a crashed request never leaves a torn file.

Endpoints:
    GET  /manifest            frame sequence manifest JSON
    GET  /frames/{i}.png      one input frame
    GET  /grid                lattice manifest JSON
    GET  /trajectories        names of stored trajectory files
    GET  /trajectories/{name} one stored trajectory
    POST /trajectories        store a trajectory JSON body
    GET  /...                 static files from the UI directory, if given
"""

from __future__ import annotations

import json
import re
import tempfile
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Optional

from .renderer import FRAME_NAME, MANIFEST_NAME

_SAFE_NAME = re.compile(r"^[A-Za-z0-9._-]+$")

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".json": "application/json",
    ".png": "image/png",
    ".map": "application/json",
}


class AnnotationServer:
    """Wraps a ThreadingHTTPServer bound to the given directories."""

    def __init__(self, frames_dir: str | Path, grid_manifest_path: str | Path,
                 data_dir: str | Path, ui_dir: Optional[str | Path] = None,
                 host: str = "127.0.0.1", port: int = 0):
        self.frames_dir = Path(frames_dir)
        self.grid_manifest_path = Path(grid_manifest_path)
        self.data_dir = Path(data_dir)
        self.ui_dir = Path(ui_dir) if ui_dir else None
        if not (self.frames_dir / MANIFEST_NAME).is_file():
            raise ValueError(f"no {MANIFEST_NAME} in {self.frames_dir}")
        if not self.grid_manifest_path.is_file():
            raise ValueError(f"no grid manifest at {self.grid_manifest_path}")
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._upload_lock = threading.Lock()
        owner = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, fmt, *args):  # tests stay quiet
                pass

            def _send(self, code: int, body: bytes, content_type: str) -> None:
                self.send_response(code)
                self.send_header("Content-Type", content_type)
                self.send_header("Content-Length", str(len(body)))
                self.send_header("Access-Control-Allow-Origin", "*")
                self.end_headers()
                self.wfile.write(body)

            def _send_json(self, code: int, payload) -> None:
                self._send(code, json.dumps(payload, sort_keys=True, indent=2).encode()
                           + b"\n", "application/json")

            def _error(self, code: int, message: str) -> None:
                self._send_json(code, {"error": message})

            def do_OPTIONS(self) -> None:
                self.send_response(204)
                self.send_header("Access-Control-Allow-Origin", "*")
                self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
                self.send_header("Access-Control-Allow-Headers", "Content-Type")
                self.end_headers()

            def do_GET(self) -> None:
                owner._handle_get(self)

            def do_POST(self) -> None:
                owner._handle_post(self)

        self.httpd = ThreadingHTTPServer((host, port), Handler)

    @property
    def port(self) -> int:
        return self.httpd.server_address[1]

    def serve_forever(self) -> None:
        self.httpd.serve_forever()

    def shutdown(self) -> None:
        self.httpd.shutdown()
        self.httpd.server_close()

    # request handling -----------------------------------------------------

    def _handle_get(self, req: BaseHTTPRequestHandler) -> None:
        path = req.path.split("?", 1)[0]
        if path == "/manifest":
            req._send(200, (self.frames_dir / MANIFEST_NAME).read_bytes(),
                      "application/json")
        elif path == "/grid":
            req._send(200, self.grid_manifest_path.read_bytes(), "application/json")
        elif path.startswith("/frames/"):
            m = re.fullmatch(r"/frames/(\d+)\.png", path)
            if not m:
                req._error(404, f"bad frame path {path}")
                return
            frame_path = self.frames_dir / FRAME_NAME.format(int(m.group(1)))
            if not frame_path.is_file():
                req._error(404, f"no frame {m.group(1)}")
                return
            req._send(200, frame_path.read_bytes(), "image/png")
        elif path == "/trajectories":
            names = sorted(p.name for p in self.data_dir.glob("*.json"))
            req._send_json(200, {"trajectories": names})
        elif path.startswith("/trajectories/"):
            name = path[len("/trajectories/"):]
            if not _SAFE_NAME.fullmatch(name) or not (self.data_dir / name).is_file():
                req._error(404, f"no trajectory {name!r}")
                return
            req._send(200, (self.data_dir / name).read_bytes(), "application/json")
        else:
            self._serve_static(req, path)

    def _serve_static(self, req: BaseHTTPRequestHandler, path: str) -> None:
        if self.ui_dir is None:
            req._error(404, f"unknown path {path}")
            return
        rel = path.lstrip("/") or "index.html"
        target = (self.ui_dir / rel).resolve()
        if not str(target).startswith(str(self.ui_dir.resolve())) or not target.is_file():
            req._error(404, f"unknown path {path}")
            return
        ctype = _CONTENT_TYPES.get(target.suffix, "application/octet-stream")
        req._send(200, target.read_bytes(), ctype)

    def _handle_post(self, req: BaseHTTPRequestHandler) -> None:
        if req.path.split("?", 1)[0] != "/trajectories":
            req._error(404, f"unknown path {req.path}")
            return
        length = int(req.headers.get("Content-Length", 0))
        body = req.rfile.read(length)
        try:
            data = json.loads(body)
        except json.JSONDecodeError as exc:
            req._error(400, f"body is not valid JSON: {exc}")
            return
        if not isinstance(data, dict) or "video_id" not in data:
            req._error(400, "trajectory JSON must be an object with a video_id")
            return
        name = self._store(data)
        req._send_json(201, {"saved": name})

    def _store(self, data: dict) -> str:
        video_id = re.sub(r"[^A-Za-z0-9._-]", "_", str(data["video_id"])) or "unnamed"
        kind = "human" if data.get("kind") == "human" else "algo"
        with self._upload_lock:
            serial = 0
            while True:
                name = f"{video_id}_{kind}_{serial:03d}.json"
                if not (self.data_dir / name).exists():
                    break
                serial += 1
            payload = json.dumps(data, sort_keys=True, indent=2) + "\n"
            fd, tmp = tempfile.mkstemp(dir=self.data_dir, suffix=".tmp")
            try:
                with open(fd, "w") as fh:
                    fh.write(payload)
                Path(tmp).replace(self.data_dir / name)
            finally:
                Path(tmp).unlink(missing_ok=True)
        return name
