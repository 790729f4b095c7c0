"""Capture-worthiness scores for glimpses.

A :class:`ScoreField` maps glimpse indices to scalar scores.  Fields are
either eager (loaded from a CSV file) or lazy (backed by a scorer callable);
lazy fields count every distinct glimpse they materialize, which is what the
search-cost accounting reports.

Score files are CSV with the exact header ``t_idx,theta_idx,phi_idx,f_idx,score``
plus a sibling ``.json`` manifest carrying the lattice parameters, so a file
is interpretable without out-of-band context.

Built-in scorers are lightweight stand-ins for a learned capture-worthiness
model; they exist so the full pipeline runs end to end and stays deterministic:

* ``motion-proxy``: mean absolute temporal luminance difference inside the
  glimpse's viewport footprint.
* ``saliency-proxy``: spatial gradient energy plus temporal difference of the
  equirect frame, averaged over the footprint.
* ``center-prior``: a fixed bump peaked at pose (0, 0).
* ``random``: seeded uniform [0, 1) per glimpse.
* ``external-file``: scores from a CSV produced elsewhere.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterator, Optional

import numpy as np

from .geometry import CameraPose, fov_from_focal
from .grid import GlimpseGrid, GlimpseIndex, grid_from_manifest, grid_to_manifest
from .renderer import EquirectSequence, extract_viewport

SCORE_HEADER = "t_idx,theta_idx,phi_idx,f_idx,score"

SCORER_KINDS = ("external-file", "motion-proxy", "center-prior", "saliency-proxy", "random")

# Footprint sampling defaults shared by the proxy scorers.
FOOTPRINT_WIDTH = 32
TIME_SAMPLES = 5


class MissingScoreError(LookupError):
    """A score was requested for a glimpse the field has no value for."""


class ScoreParseError(ValueError):
    """A score file failed validation; the message names the line."""


@dataclass
class ScorerSpec:
    """Which scorer to run and with what parameters."""

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in SCORER_KINDS:
            raise ValueError(f"unknown scorer kind {self.kind!r}; expected one of {SCORER_KINDS}")


class ScoreField:
    """Scores over a glimpse lattice, with evaluation counting.

    ``eval_counter`` is the number of distinct glimpses whose score has been
    materialized, whether loaded eagerly or computed on demand.
    """

    def __init__(self, grid: GlimpseGrid, scores: Optional[dict[GlimpseIndex, float]] = None,
                 scorer: Optional[Callable[[GlimpseIndex], float]] = None):
        self.grid = grid
        self._scores: dict[GlimpseIndex, float] = dict(scores) if scores else {}
        self._scorer = scorer
        self._lock = threading.Lock()

    @property
    def eval_counter(self) -> int:
        return len(self._scores)

    def get(self, g: GlimpseIndex) -> float:
        self.grid.check_index(g)
        try:
            return self._scores[g]
        except KeyError:
            pass
        if self._scorer is None:
            raise MissingScoreError(f"no score for glimpse {tuple(g)}")
        with self._lock:
            if g not in self._scores:
                self._scores[g] = float(self._scorer(g))
            return self._scores[g]

    def known_items(self) -> Iterator[tuple[GlimpseIndex, float]]:
        """Materialized (index, score) pairs in sorted index order."""
        return iter(sorted(self._scores.items()))

    def materialize_all(self) -> None:
        """Evaluate every glimpse in the lattice (eager fields are a no-op)."""
        g = self.grid
        for t in range(g.n_steps):
            for ti in range(len(g.theta_values)):
                for pi in range(len(g.phi_values)):
                    for fi in range(len(g.f_values)):
                        self.get(GlimpseIndex(t, ti, pi, fi))


def _manifest_path(path: Path) -> Path:
    return path.with_suffix(".json")


def save_scores(scores: ScoreField, path: str | Path) -> None:
    """Write materialized scores as CSV plus the sibling grid manifest."""
    path = Path(path)
    lines = [SCORE_HEADER]
    for g, s in scores.known_items():
        lines.append(f"{g.t_idx},{g.theta_idx},{g.phi_idx},{g.f_idx},{s!r}")
    path.write_text("\n".join(lines) + "\n")
    manifest = grid_to_manifest(scores.grid)
    _manifest_path(path).write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n")


def load_score_grid(path: str | Path) -> GlimpseGrid:
    """Lattice described by a score file's sibling manifest."""
    manifest_path = _manifest_path(Path(path))
    if not manifest_path.is_file():
        raise ValueError(f"no sibling grid manifest {manifest_path}")
    return grid_from_manifest(json.loads(manifest_path.read_text()))


def load_scores(path: str | Path, grid: Optional[GlimpseGrid] = None) -> ScoreField:
    """Parse and validate a score CSV into an eager field.

    Args:
        path: CSV path; the sibling ``.json`` manifest supplies the lattice
            when ``grid`` is not given.
        grid: Lattice to validate indices against.  When both are present
            the manifest must agree with it.

    Raises:
        ScoreParseError: On malformed rows, out-of-range indices, or
            duplicate indices, naming the offending line number.
        ValueError: If no lattice is available or manifests disagree.
    """
    path = Path(path)
    manifest_path = _manifest_path(path)
    if manifest_path.is_file():
        file_grid = grid_from_manifest(json.loads(manifest_path.read_text()))
        if grid is not None and grid != file_grid:
            raise ValueError(
                f"score manifest {manifest_path} describes a different lattice "
                f"than the one requested")
        grid = file_grid
    if grid is None:
        raise ValueError(f"no grid given and no sibling manifest {manifest_path}")

    scores: dict[GlimpseIndex, float] = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if lineno == 1:
                if line != SCORE_HEADER:
                    raise ScoreParseError(
                        f"line 1: bad header {line!r}, expected {SCORE_HEADER!r}")
                continue
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 5:
                raise ScoreParseError(f"line {lineno}: expected 5 fields, got {len(parts)}")
            try:
                g = GlimpseIndex(int(parts[0]), int(parts[1]), int(parts[2]), int(parts[3]))
                value = float(parts[4])
            except ValueError as exc:
                raise ScoreParseError(f"line {lineno}: {exc}") from exc
            try:
                grid.check_index(g)
            except ValueError as exc:
                raise ScoreParseError(f"line {lineno}: {exc}") from exc
            if g in scores:
                raise ScoreParseError(f"line {lineno}: duplicate glimpse index {tuple(g)}")
            scores[g] = value
    return ScoreField(grid, scores=scores)


def _glimpse_sample_indices(seq: EquirectSequence, t_start: float, duration: float,
                            n_samples: int) -> np.ndarray:
    """Frame indices sampled from one glimpse's time span."""
    i0 = int(round(t_start * seq.fps))
    i1 = int(round((t_start + duration) * seq.fps))
    i1 = min(i1, seq.frame_count)
    if i0 >= seq.frame_count:
        raise ValueError(f"glimpse at {t_start} s starts past the end of the video")
    if i1 <= i0:
        i1 = i0 + 1
    return np.unique(np.round(np.linspace(i0, i1 - 1, n_samples)).astype(int))


def _luma(frame: np.ndarray) -> np.ndarray:
    f = frame.astype(np.float64)
    if f.ndim == 2:
        return f
    return 0.299 * f[..., 0] + 0.587 * f[..., 1] + 0.114 * f[..., 2]


def _footprint(frame2d: np.ndarray, pose: CameraPose, fov_deg: float) -> np.ndarray:
    h = max(2, int(round(FOOTPRINT_WIDTH * 9 / 16)))
    return extract_viewport(frame2d, pose, FOOTPRINT_WIDTH, h, fov_deg)


def _motion_proxy(seq: EquirectSequence, pose: CameraPose, fov_deg: float,
                  t_start: float, duration: float, n_samples: int) -> float:
    idxs = _glimpse_sample_indices(seq, t_start, duration, n_samples)
    views = [_footprint(_luma(seq.frame(int(i))), pose, fov_deg) for i in idxs]
    if len(views) < 2:
        return 0.0
    diffs = [np.mean(np.abs(b - a)) for a, b in zip(views, views[1:])]
    return float(np.mean(diffs) / 255.0)


def _saliency_proxy(seq: EquirectSequence, pose: CameraPose, fov_deg: float,
                    t_start: float, duration: float, n_samples: int) -> float:
    idxs = _glimpse_sample_indices(seq, t_start, duration, n_samples)
    prev = None
    totals = []
    for i in idxs:
        luma = _luma(seq.frame(int(i)))
        gy, gx = np.gradient(luma)
        sal = np.abs(gx) + np.abs(gy)
        if prev is not None:
            sal = sal + np.abs(luma - prev)
        totals.append(float(np.mean(_footprint(sal, pose, fov_deg))))
        prev = luma
    return float(np.mean(totals) / 255.0)


def _center_prior(pose: CameraPose) -> float:
    wrap = min(pose.phi_deg, 360.0 - pose.phi_deg)
    return float(np.cos(np.radians(pose.theta_deg)) * np.cos(np.radians(wrap / 2.0)))


def _random_score(g: GlimpseIndex, seed: int) -> float:
    ss = np.random.SeedSequence([seed, g.t_idx, g.theta_idx, g.phi_idx, g.f_idx])
    return float(np.random.Generator(np.random.PCG64(ss)).random())


def proxy_score(frames: Optional[EquirectSequence], grid: GlimpseGrid,
                g: GlimpseIndex, spec: ScorerSpec) -> float:
    """Score one glimpse with the scorer described by ``spec``."""
    grid.check_index(g)
    pose = grid.pose(g)
    fov = fov_from_focal(pose.focal_scale)
    t_start = grid.time_of(g)
    n_samples = int(spec.params.get("time_samples", TIME_SAMPLES))
    if spec.kind == "center-prior":
        return _center_prior(pose)
    if spec.kind == "random":
        return _random_score(g, int(spec.params.get("seed", 0)))
    if spec.kind == "motion-proxy":
        if frames is None:
            raise ValueError("motion-proxy needs input frames")
        return _motion_proxy(frames, pose, fov, t_start, grid.glimpse_duration_s, n_samples)
    if spec.kind == "saliency-proxy":
        if frames is None:
            raise ValueError("saliency-proxy needs input frames")
        return _saliency_proxy(frames, pose, fov, t_start, grid.glimpse_duration_s, n_samples)
    raise ValueError(f"scorer kind {spec.kind!r} cannot score single glimpses")


def _remap_file_scores(file_field: ScoreField, grid: GlimpseGrid) -> ScoreField:
    """Look up scores by lattice values when the file's lattice differs."""
    fg = file_field.grid

    def lookup(g: GlimpseIndex) -> float:
        pose = grid.pose(g)
        try:
            ti, pi = fg.direction_index_of(pose.theta_deg, pose.phi_deg)
            fi = fg.focal_index_of(pose.focal_scale)
            tt = fg.t_index_of(grid.time_of(g))
        except ValueError as exc:
            raise MissingScoreError(
                f"glimpse {tuple(g)} has no counterpart in the score file's lattice") from exc
        return file_field.get(GlimpseIndex(tt, ti, pi, fi))

    return ScoreField(grid, scorer=lookup)


def make_score_field(spec: ScorerSpec, grid: GlimpseGrid,
                     frames: Optional[EquirectSequence] = None) -> ScoreField:
    """Build a score field for ``grid`` according to ``spec``.

    ``external-file`` loads eagerly (indices per its own manifest, matched to
    ``grid`` by lattice values when the lattices differ); every other kind
    evaluates lazily so search-cost counters only reflect glimpses actually
    requested.
    """
    if spec.kind == "external-file":
        path = spec.params.get("path")
        if not path:
            raise ValueError("external-file scorer needs params['path']")
        file_field = load_scores(path)
        if file_field.grid == grid:
            return file_field
        return _remap_file_scores(file_field, grid)
    return ScoreField(grid, scorer=lambda g: proxy_score(frames, grid, g, spec))
