"""Command-line pipeline: grid, score, solve, render, evaluate, serve.

Every subcommand reads optional defaults from a JSON config file
(``--config``); explicit flags win over the file, which wins over built-in
defaults.  Data problems exit with status 1 and a single ``error: ...`` line
on stderr; usage problems exit with status 2 (argparse).  Identical inputs,
flags, and seeds produce byte-identical artifacts.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

from . import baselines, coarse2fine, diverse, dp_solver, metrics
from .grid import (
    GlimpseGrid,
    build_coarse_grid,
    build_full_grid,
    grid_from_manifest,
    grid_to_manifest,
)
from .renderer import (
    DEFAULT_OUT_HEIGHT,
    DEFAULT_OUT_WIDTH,
    EquirectSequence,
    MANIFEST_NAME,
    render_trajectory,
    write_sequence,
)
from .scoring import ScoreField, ScorerSpec, load_scores, make_score_field, save_scores
from .server import AnnotationServer

DEFAULT_K = 20
PROXY_SCORERS = ("motion-proxy", "saliency-proxy", "center-prior", "random")
SOLVE_MODES = ("autocam", "zoom", "fast", "diverse", "fast-diverse",
               "baseline:center", "baseline:eyelevel", "baseline:saliency")


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _length_from_grid(grid: GlimpseGrid) -> float:
    if grid.n_steps >= 2:
        return grid.t_values[-1] + (grid.t_values[1] - grid.t_values[0])
    return grid.t_values[-1] + grid.glimpse_duration_s


def _open_frames(path: Optional[str]) -> Optional[EquirectSequence]:
    return EquirectSequence.open(path) if path else None


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vcam360",
        description="Virtual NFOV camera search and rendering for 360-degree video.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="JSON file of default values for this command")

    p = sub.add_parser("grid", help="write a glimpse lattice manifest")
    add_common(p)
    p.add_argument("--length", type=float, help="video length in seconds")
    p.add_argument("--frames", help="frame directory to take the length from")
    p.add_argument("--coarse", action="store_true", default=None,
                   help="build the coarse lattice instead of the full one")
    p.add_argument("--no-zoom", action="store_true", default=None,
                   help="keep only focal scale 1.0")
    p.add_argument("--out", required=True, help="output manifest path")

    p = sub.add_parser("score", help="score every glimpse of a lattice")
    add_common(p)
    p.add_argument("--scorer", choices=PROXY_SCORERS, help="scorer kind")
    p.add_argument("--frames", help="input frame directory (motion/saliency)")
    p.add_argument("--grid", help="lattice manifest path")
    p.add_argument("--length", type=float, help="build the lattice from this length")
    p.add_argument("--coarse", action="store_true", default=None)
    p.add_argument("--no-zoom", action="store_true", default=None)
    p.add_argument("--seed", type=int, help="seed for the random scorer")
    p.add_argument("--out", required=True, help="output CSV path")

    p = sub.add_parser("solve", help="search for output trajectories")
    add_common(p)
    p.add_argument("--mode", choices=SOLVE_MODES, help="search mode")
    p.add_argument("--scores", help="score CSV (with sibling lattice manifest)")
    p.add_argument("--scorer", choices=PROXY_SCORERS,
                   help="score lazily with this kind instead of a file")
    p.add_argument("--frames", help="input frame directory")
    p.add_argument("--length", type=float, help="video length in seconds")
    p.add_argument("--k", type=int, help=f"trajectories to produce (default {DEFAULT_K})")
    p.add_argument("--seed", type=int, help="seed for random scorer / center baseline")
    p.add_argument("--video-id", help="identifier stored in trajectory files")
    p.add_argument("--out-dir", required=True, help="directory for trajectory files")

    p = sub.add_parser("render", help="render a trajectory to output frames")
    add_common(p)
    p.add_argument("--frames", help="input frame directory")
    p.add_argument("--trajectory", help="trajectory JSON path")
    p.add_argument("--width", type=int, help=f"output width (default {DEFAULT_OUT_WIDTH})")
    p.add_argument("--height", type=int, help=f"output height (default {DEFAULT_OUT_HEIGHT})")
    p.add_argument("--schedule", choices=("hold", "smooth"), help="pose schedule mode")
    p.add_argument("--transition-s", type=float,
                   help="smooth-mode transition window in seconds (default 1.0)")
    p.add_argument("--out-dir", required=True, help="directory for output frames")

    p = sub.add_parser("evaluate", help="compare trajectories against human edits")
    add_common(p)
    p.add_argument("--algo", nargs="+", help="trajectory files or solve output dirs")
    p.add_argument("--human", nargs="+", help="human track files (or any trajectory)")
    p.add_argument("--fps", type=float, help="comparison frame rate (default 2)")
    p.add_argument("--cost", nargs="*", help="cost report JSONs to aggregate")
    p.add_argument("--wall-time-s", type=float, help="measured wall time to report")
    p.add_argument("--out", required=True, help="report JSON path")

    p = sub.add_parser("serve", help="serve frames + lattice to the editor UI")
    add_common(p)
    p.add_argument("--frames", help="input frame directory")
    p.add_argument("--grid", help="lattice manifest path")
    p.add_argument("--data-dir", help="directory for uploaded trajectories")
    p.add_argument("--ui-dir", help="static editor files to serve at /")
    p.add_argument("--host", help="bind address (default 127.0.0.1)")
    p.add_argument("--port", type=int, help="bind port (default 8360)")
    return parser


def _apply_config(args: argparse.Namespace) -> argparse.Namespace:
    if not getattr(args, "config", None):
        return args
    path = Path(args.config)
    if not path.is_file():
        raise ValueError(f"config file not found: {path}")
    config = json.loads(path.read_text())
    if not isinstance(config, dict):
        raise ValueError(f"config must be a JSON object: {path}")
    for key, value in config.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise ValueError(f"config key {key!r} is not an option of this command")
        if getattr(args, attr) is None:
            setattr(args, attr, value)
    return args


def _require(args: argparse.Namespace, *names: str) -> None:
    for name in names:
        if getattr(args, name) is None:
            raise ValueError(f"--{name.replace('_', '-')} is required (flag or config)")


def _grid_from_args(args: argparse.Namespace) -> GlimpseGrid:
    if getattr(args, "grid", None):
        return grid_from_manifest(json.loads(Path(args.grid).read_text()))
    _require(args, "length")
    if getattr(args, "coarse", None):
        return build_coarse_grid(args.length)
    return build_full_grid(args.length, with_zoom=not getattr(args, "no_zoom", None))


def _cmd_grid(args: argparse.Namespace) -> int:
    if args.length is None and args.frames:
        seq = EquirectSequence.open(args.frames)
        args.length = seq.duration_s
    _require(args, "length")
    if args.coarse:
        grid = build_coarse_grid(args.length)
    else:
        grid = build_full_grid(args.length, with_zoom=not args.no_zoom)
    _write_json(Path(args.out), grid_to_manifest(grid))
    print(f"wrote lattice of {grid.size} glimpses to {args.out}")
    return 0


def _cmd_score(args: argparse.Namespace) -> int:
    _require(args, "scorer")
    grid = _grid_from_args(args)
    frames = _open_frames(args.frames)
    spec = ScorerSpec(args.scorer, {"seed": args.seed or 0})
    field = make_score_field(spec, grid, frames)
    field.materialize_all()
    save_scores(field, args.out)
    print(f"wrote {field.eval_counter} scores to {args.out}")
    return 0


def _solve_scorer_factory(args: argparse.Namespace, frames):
    if args.scores:
        spec = ScorerSpec("external-file", {"path": args.scores})
    elif args.scorer:
        spec = ScorerSpec(args.scorer, {"seed": args.seed or 0})
    else:
        raise ValueError("give --scores or --scorer so glimpses can be scored")
    return lambda grid: make_score_field(spec, grid, frames)


def _solve_length(args: argparse.Namespace, frames) -> float:
    if args.length is not None:
        return args.length
    if args.scores:
        return _length_from_grid(load_scores(args.scores).grid)
    if frames is not None:
        return frames.duration_s
    raise ValueError("give --length, --scores, or --frames to size the lattice")


def _cmd_solve(args: argparse.Namespace) -> int:
    _require(args, "mode")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    frames = _open_frames(args.frames)
    length = _solve_length(args, frames)
    k = args.k if args.k is not None else DEFAULT_K
    video_id = args.video_id or "video"
    seed = args.seed or 0
    cost: Optional[dict] = None

    if args.mode in ("autocam", "zoom", "diverse"):
        grid = build_full_grid(length, with_zoom=args.mode != "autocam")
        field = _solve_scorer_factory(args, frames)(grid)
        problem = dp_solver.SearchProblem(grid, field)
        if args.mode == "diverse":
            trajs = diverse.diverse_search(problem, k)
        else:
            trajs = dp_solver.top_k_by_endpoint(problem, k)
        for traj in trajs:
            traj.meta.setdefault("mode", args.mode)
        cost = metrics.cost_report({"search": field.eval_counter}, grid.size)
    elif args.mode in ("fast", "fast-diverse"):
        factory = _solve_scorer_factory(args, frames)
        trajs, cost = coarse2fine.solve_fast(
            factory, length, k=k, diverse=args.mode == "fast-diverse")
        for traj in trajs:
            traj.meta.setdefault("mode", args.mode)
        grid = build_full_grid(length, with_zoom=True)
    elif args.mode == "baseline:center":
        grid = build_full_grid(length, with_zoom=False)
        trajs = baselines.center_baseline(grid, seed, k)
    elif args.mode == "baseline:eyelevel":
        grid = build_full_grid(length, with_zoom=False)
        trajs = baselines.eye_level_baseline(grid)
    elif args.mode == "baseline:saliency":
        if frames is None:
            raise ValueError("baseline:saliency needs --frames")
        grid = build_full_grid(length, with_zoom=False)
        trajs = baselines.saliency_baseline(frames, grid, k)
        cost = metrics.cost_report({"search": grid.size}, grid.size)
    else:
        raise ValueError(f"unknown mode {args.mode!r}")

    for i, traj in enumerate(trajs):
        dp_solver.save_trajectory(out_dir / f"traj_{i:03d}.json", traj, video_id, grid)
    if cost is not None:
        _write_json(out_dir / "cost_report.json", cost)
    print(f"wrote {len(trajs)} trajectories to {out_dir}")
    return 0


def _cmd_render(args: argparse.Namespace) -> int:
    _require(args, "frames", "trajectory")
    seq = EquirectSequence.open(args.frames)
    traj, _, _ = dp_solver.load_trajectory(args.trajectory)
    width = args.width if args.width is not None else DEFAULT_OUT_WIDTH
    height = args.height if args.height is not None else DEFAULT_OUT_HEIGHT
    mode = args.schedule or "hold"
    transition = args.transition_s if args.transition_s is not None else 1.0
    out_dir = Path(args.out_dir)
    frames_iter = render_trajectory(seq, traj, width, height, mode, transition)
    manifest = write_sequence(out_dir, frames_iter, seq.fps)
    manifest["trajectory"] = json.loads(Path(args.trajectory).read_text())
    manifest["schedule"] = mode
    _write_json(out_dir / MANIFEST_NAME, manifest)
    print(f"rendered {manifest['frame_count']} frames to {out_dir}")
    return 0


def _collect_trajectory_paths(entries: list[str]) -> list[Path]:
    paths: list[Path] = []
    for entry in entries:
        p = Path(entry)
        if p.is_dir():
            found = sorted(p.glob("traj_*.json"))
            if not found:
                raise ValueError(f"no traj_*.json files in directory {p}")
            paths.extend(found)
        elif p.is_file():
            paths.append(p)
        else:
            raise ValueError(f"no such trajectory file or directory: {p}")
    return paths


def _cmd_evaluate(args: argparse.Namespace) -> int:
    _require(args, "algo", "human")
    fps = args.fps if args.fps is not None else 2.0
    algo_paths = _collect_trajectory_paths(args.algo)
    human_paths = _collect_trajectory_paths(args.human)
    algo_tracks = [metrics.load_track(p, fps) for p in algo_paths]
    human_tracks = [metrics.load_track(p, fps) for p in human_paths]
    names = [p.name for p in algo_paths]

    traj_pool = metrics.pool_trajectory(algo_tracks, human_tracks)
    frame_pool = metrics.pool_frame(algo_tracks, human_tracks)
    report = {
        "fps": fps,
        "algorithms": names,
        "humans": [p.name for p in human_paths],
        "trajectory_pooling": dict(zip(names, traj_pool)),
        "frame_pooling": dict(zip(names, frame_pool)),
        "mean_trajectory_pooling": sum(traj_pool) / len(traj_pool),
        "mean_frame_pooling": sum(frame_pool) / len(frame_pool),
    }

    keyframe_trajs = []
    for p in algo_paths:
        data = json.loads(p.read_text())
        if data.get("kind") != "human":
            keyframe_trajs.append(dp_solver.trajectory_from_dict(data)[0])
    if len(keyframe_trajs) == len(algo_tracks) and keyframe_trajs:
        labels = metrics.diversity_group_labels(keyframe_trajs, fps)
        report["diversity"] = {
            "groups": max(labels) + 1,
            "labels": dict(zip(names, labels)),
        }

    if args.cost:
        stages: dict[str, int] = {}
        full_size = 0
        for cost_path in args.cost:
            cost = json.loads(Path(cost_path).read_text())
            full_size = max(full_size, int(cost.get("full_grid_size", 0)))
            for key, value in cost.items():
                if key.endswith("_evals") and key != "total_evals":
                    stages[key[:-len("_evals")]] = stages.get(key[:-len("_evals")], 0) + int(value)
            for key, value in cost.get("stages", {}).items():
                stages[key] = stages.get(key, 0) + int(value)
        if stages and full_size:
            report["cost"] = metrics.cost_report(
                stages, full_size, args.wall_time_s,
                video_length_s=None if args.wall_time_s is None else
                len(algo_tracks[0]) / fps)
    _write_json(Path(args.out), report)
    print(f"wrote evaluation report to {args.out}")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    _require(args, "frames", "grid", "data_dir")
    host = args.host or "127.0.0.1"
    port = args.port if args.port is not None else 8360
    server = AnnotationServer(args.frames, args.grid, args.data_dir,
                              ui_dir=args.ui_dir, host=host, port=port)
    print(f"serving on http://{host}:{server.port} (Ctrl-C to stop)")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()
    return 0


_COMMANDS = {
    "grid": _cmd_grid,
    "score": _cmd_score,
    "solve": _cmd_solve,
    "render": _cmd_render,
    "evaluate": _cmd_evaluate,
    "serve": _cmd_serve,
}


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        args = _apply_config(args)
        return _COMMANDS[args.command](args)
    except (ValueError, LookupError, RuntimeError, OSError, json.JSONDecodeError) as exc:
        message = " ".join(str(exc).split())
        print(f"error: {message}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
