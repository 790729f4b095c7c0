"""Independent oracles and fixtures shared across test modules.

Everything here deliberately re-derives behavior from first principles
(plain loops over value lists, exhaustive path enumeration) rather than
calling back into the library's own neighbor/search code, so tests compare
two separate routes to the same answer.
"""

from __future__ import annotations

import math

import numpy as np

from vcam360.geometry import CameraPose
from vcam360.grid import GlimpseGrid, GlimpseIndex, TransitionConstraints


def assert_feasible(traj, grid: GlimpseGrid,
                    constraints: TransitionConstraints = TransitionConstraints()) -> None:
    """Check a trajectory against the smoothness rules, from raw values."""
    times = [t for t, _ in traj.keyframes]
    assert len(times) == len(grid.t_values)
    for a, b in zip(times, grid.t_values):
        assert abs(a - b) < 1e-9
    n_phi = len(grid.phi_values)
    prev = None
    for _, pose in traj.keyframes:
        ti = grid.theta_values.index(pose.theta_deg)
        pi = grid.phi_values.index(pose.phi_deg)
        assert pose.focal_scale in grid.f_values
        if prev is not None:
            pti, ppi, pf = prev
            assert abs(ti - pti) <= constraints.eps_theta_steps
            dphi = abs(pi - ppi)
            assert min(dphi, n_phi - dphi) <= constraints.eps_phi_steps
            assert abs(pose.focal_scale - pf) <= constraints.max_delta_focal + 1e-9
        prev = (ti, pi, pose.focal_scale)


def oracle_successor_triples(triple, grid: GlimpseGrid,
                             constraints: TransitionConstraints) -> list[tuple[int, int, int]]:
    """All (theta, phi, f) triples reachable in one step, by brute scan."""
    ti, pi, fi = triple
    n_phi = len(grid.phi_values)
    out = []
    for tj in range(len(grid.theta_values)):
        if abs(tj - ti) > constraints.eps_theta_steps:
            continue
        for pj in range(n_phi):
            dphi = abs(pj - pi)
            if min(dphi, n_phi - dphi) > constraints.eps_phi_steps:
                continue
            for fj in range(len(grid.f_values)):
                if abs(grid.f_values[fj] - grid.f_values[fi]) > constraints.max_delta_focal + 1e-9:
                    continue
                out.append((tj, pj, fj))
    return out


def enumerate_best_paths(grid: GlimpseGrid, scores: dict[GlimpseIndex, float],
                         constraints: TransitionConstraints = TransitionConstraints(),
                         excluded: frozenset = frozenset()):
    """Exhaustive DFS over every feasible path.

    Returns (best_total, per_endpoint) where per_endpoint maps final
    (theta_idx, phi_idx) to the best total reaching it.  Totals accumulate
    left to right, matching the solver's summation order exactly.
    """
    n_steps = grid.n_steps
    triples = [(ti, pi, fi)
               for ti in range(len(grid.theta_values))
               for pi in range(len(grid.phi_values))
               for fi in range(len(grid.f_values))]
    candidates = [[x for x in triples if GlimpseIndex(t, *x) not in excluded]
                  for t in range(n_steps)]
    succ = {x: oracle_successor_triples(x, grid, constraints) for x in triples}

    best_total = -math.inf
    per_endpoint: dict[tuple[int, int], float] = {}

    def visit(t: int, triple, total: float) -> None:
        nonlocal best_total
        total = total + scores[GlimpseIndex(t, *triple)]
        if t == n_steps - 1:
            if total > best_total:
                best_total = total
            key = triple[:2]
            if key not in per_endpoint or total > per_endpoint[key]:
                per_endpoint[key] = total
            return
        nxt = candidates[t + 1]
        nxt_set = set(nxt)
        for s in succ[triple]:
            if s in nxt_set:
                visit(t + 1, s, total)

    for start in candidates[0]:
        visit(0, start, 0.0)
    return best_total, per_endpoint


def random_scores(grid: GlimpseGrid, seed: int) -> dict[GlimpseIndex, float]:
    rng = np.random.default_rng(seed)
    out = {}
    for t in range(grid.n_steps):
        for ti in range(len(grid.theta_values)):
            for pi in range(len(grid.phi_values)):
                for fi in range(len(grid.f_values)):
                    out[GlimpseIndex(t, ti, pi, fi)] = float(rng.random())
    return out


def tiny_grid(n_theta=2, n_phi=3, n_f=2, n_steps=4, duration=5.0) -> GlimpseGrid:
    """A reduced lattice small enough for exhaustive enumeration."""
    thetas = tuple(np.linspace(-30.0, 30.0, n_theta))
    phis = tuple(np.linspace(0.0, 360.0, n_phi, endpoint=False))
    focals = (1.0, 1.5)[:n_f] if n_f <= 2 else (0.5, 1.0, 1.5)
    ts = tuple(duration * i for i in range(n_steps))
    return GlimpseGrid(thetas, phis, ts, focals, duration)


def bump_video(width=96, height=48, fps=2.0, seconds=10.0, center=(0.0, 100.0),
               drift_deg_per_s=2.0, sigma_deg=18.0):
    """Synthetic equirect frames with one bright blob drifting in azimuth.

    Returns a list of (height, width, 3) uint8 arrays.
    """
    from vcam360.geometry import pose_to_direction

    n_frames = int(round(seconds * fps))
    us = (np.arange(width) + 0.5) / width
    vs = (np.arange(height) + 0.5) / height
    phi = np.radians(us * 360.0)
    theta = np.radians((0.5 - vs) * 180.0)
    cos_t = np.cos(theta)[:, None]
    dirs = np.stack([cos_t * np.cos(phi)[None, :],
                     cos_t * np.sin(phi)[None, :],
                     np.broadcast_to(np.sin(theta)[:, None], (height, width))], axis=-1)
    frames = []
    kappa = 1.0 / math.radians(sigma_deg) ** 2
    for i in range(n_frames):
        t = i / fps
        c = pose_to_direction(CameraPose(center[0], center[1] + drift_deg_per_s * t))
        intensity = np.exp(kappa * (dirs @ c - 1.0))
        img = np.clip(intensity * 235.0 + 20.0, 0, 255).astype(np.uint8)
        frames.append(np.stack([img, img, img], axis=-1))
    return frames


def smooth_scorer(seed: int, n_bumps: int = 4):
    """Deterministic spatially smooth score function of (time, pose).

    A few Gaussian-like bumps drift slowly around the sphere; the score of a
    glimpse depends only on its time and pose values, so coarse and full
    lattices see one consistent field.  Returns f(t_seconds, pose) -> float.
    """
    rng = np.random.default_rng(seed)
    centers = []
    for _ in range(n_bumps):
        theta0 = float(rng.uniform(-60.0, 60.0))
        phi0 = float(rng.uniform(0.0, 360.0))
        drift = float(rng.uniform(-3.0, 3.0))        # deg/s in azimuth
        amp = float(rng.uniform(0.5, 1.0))
        kappa = 1.0 / math.radians(float(rng.uniform(25.0, 50.0))) ** 2
        centers.append((theta0, phi0, drift, amp, kappa))
    f_pref = float(rng.uniform(0.0, 0.1))

    def score(t_s: float, pose) -> float:
        from vcam360.geometry import pose_to_direction
        d = pose_to_direction(pose)
        total = f_pref * pose.focal_scale
        for theta0, phi0, drift, amp, kappa in centers:
            c = pose_to_direction(CameraPose(theta0, (phi0 + drift * t_s) % 360.0))
            total += amp * math.exp(kappa * (float(d @ c) - 1.0))
        return total

    return score


def smooth_field(grid: GlimpseGrid, seed: int):
    """Lazy ScoreField over ``grid`` backed by smooth_scorer(seed)."""
    from vcam360.scoring import ScoreField

    f = smooth_scorer(seed)
    return ScoreField(grid, scorer=lambda g: f(grid.time_of(g), grid.pose(g)))
