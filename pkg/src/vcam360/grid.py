"""Spatio-temporal glimpse grids and smoothness constraints.

A glimpse is a fixed-duration clip captured at one lattice pose.  The full
lattice samples 11 elevations x 18 azimuths every 5 seconds at up to three
focal scales; the coarse lattice used by the accelerated search halves the
angular and temporal resolution and keeps only the widest lens, whose
footprint covers everything the dropped samples would have seen.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .geometry import CameraPose, pose_to_direction

FULL_THETA_DEG = (-75.0, -45.0, -30.0, -20.0, -10.0, 0.0, 10.0, 20.0, 30.0, 45.0, 75.0)
FULL_PHI_DEG = tuple(float(p) for p in range(0, 360, 20))
FULL_FOCAL_SCALES = (0.5, 1.0, 1.5)
NO_ZOOM_FOCAL_SCALES = (1.0,)

COARSE_THETA_DEG = (-75.0, -30.0, -10.0, 10.0, 30.0, 75.0)
COARSE_PHI_DEG = tuple(float(p) for p in range(0, 360, 40))
COARSE_FOCAL_SCALES = (0.5,)

GLIMPSE_SECONDS = 5.0


class GlimpseIndex(NamedTuple):
    """Lattice coordinates of one glimpse."""

    t_idx: int
    theta_idx: int
    phi_idx: int
    f_idx: int


@dataclass(frozen=True)
class TransitionConstraints:
    """Smoothness limits between consecutive glimpses.

    Direction moves are limited to ``eps_theta_steps`` elevation index steps
    (clamped at the poles, no wraparound) and ``eps_phi_steps`` azimuth index
    steps (cyclic).  Focal scale may change by at most ``max_delta_focal``
    per transition.
    """

    eps_theta_steps: int = 1
    eps_phi_steps: int = 1
    max_delta_focal: float = 0.5


@dataclass(frozen=True)
class GlimpseGrid:
    """The candidate lattice: direction x focal scale x glimpse start time."""

    theta_values: tuple[float, ...]
    phi_values: tuple[float, ...]
    t_values: tuple[float, ...]
    f_values: tuple[float, ...]
    glimpse_duration_s: float = GLIMPSE_SECONDS

    def __post_init__(self) -> None:
        for name, values in (("theta", self.theta_values), ("phi", self.phi_values),
                             ("t", self.t_values), ("f", self.f_values)):
            if len(values) == 0:
                raise ValueError(f"{name}_values must be non-empty")
            if any(b <= a for a, b in zip(values, values[1:])):
                raise ValueError(f"{name}_values must be strictly increasing: {values}")
        if any(not -90.0 <= t <= 90.0 for t in self.theta_values):
            raise ValueError(f"theta_values out of [-90, 90]: {self.theta_values}")
        if any(not 0.0 <= p < 360.0 for p in self.phi_values):
            raise ValueError(f"phi_values out of [0, 360): {self.phi_values}")
        if any(f <= 0.0 for f in self.f_values):
            raise ValueError(f"f_values must be positive: {self.f_values}")
        if self.glimpse_duration_s <= 0.0:
            raise ValueError("glimpse duration must be positive")

    @property
    def n_steps(self) -> int:
        return len(self.t_values)

    @property
    def n_directions(self) -> int:
        return len(self.theta_values) * len(self.phi_values)

    @property
    def size(self) -> int:
        """Total number of glimpses in the lattice."""
        return self.n_directions * len(self.f_values) * self.n_steps

    def pose(self, g: GlimpseIndex) -> CameraPose:
        self.check_index(g)
        return CameraPose(self.theta_values[g.theta_idx], self.phi_values[g.phi_idx],
                          self.f_values[g.f_idx])

    def time_of(self, g: GlimpseIndex) -> float:
        return self.t_values[g.t_idx]

    def check_index(self, g: GlimpseIndex) -> None:
        if not (0 <= g.t_idx < len(self.t_values)
                and 0 <= g.theta_idx < len(self.theta_values)
                and 0 <= g.phi_idx < len(self.phi_values)
                and 0 <= g.f_idx < len(self.f_values)):
            raise ValueError(f"glimpse index out of bounds for this grid: {g}")

    def direction_index_of(self, theta_deg: float, phi_deg: float,
                           tol: float = 1e-6) -> tuple[int, int]:
        """Indices of an exact lattice direction (within ``tol`` degrees)."""
        phi_deg = phi_deg % 360.0
        for ti, tv in enumerate(self.theta_values):
            if abs(tv - theta_deg) <= tol:
                for pi, pv in enumerate(self.phi_values):
                    if abs(pv - phi_deg) <= tol or abs(abs(pv - phi_deg) - 360.0) <= tol:
                        return ti, pi
                break
        raise ValueError(f"({theta_deg}, {phi_deg}) is not a lattice direction")

    def focal_index_of(self, focal_scale: float, tol: float = 1e-6) -> int:
        for fi, fv in enumerate(self.f_values):
            if abs(fv - focal_scale) <= tol:
                return fi
        raise ValueError(f"{focal_scale} is not a lattice focal scale")

    def t_index_of(self, t_s: float, tol: float = 1e-6) -> int:
        for ti, tv in enumerate(self.t_values):
            if abs(tv - t_s) <= tol:
                return ti
        raise ValueError(f"{t_s} is not a lattice glimpse start time")

    def directions(self) -> np.ndarray:
        """Unit vectors of every lattice direction, shape (n_theta, n_phi, 3)."""
        out = np.empty((len(self.theta_values), len(self.phi_values), 3))
        for ti, tv in enumerate(self.theta_values):
            for pi, pv in enumerate(self.phi_values):
                out[ti, pi] = pose_to_direction(CameraPose(tv, pv))
        return out


def _count_steps(video_length_s: float, spacing_s: float) -> int:
    if video_length_s < spacing_s:
        raise ValueError(
            f"video too short for one glimpse: {video_length_s} s < {spacing_s} s")
    return int(math.floor(video_length_s / spacing_s + 1e-9))


def build_full_grid(video_length_s: float, with_zoom: bool = True) -> GlimpseGrid:
    """Full-resolution lattice; glimpse starts every 5 s, truncated to fit.

    With zoom enabled, each time step offers 198 directions x 3 focal scales.
    """
    n = _count_steps(video_length_s, GLIMPSE_SECONDS)
    t_values = tuple(GLIMPSE_SECONDS * i for i in range(n))
    f_values = FULL_FOCAL_SCALES if with_zoom else NO_ZOOM_FOCAL_SCALES
    return GlimpseGrid(FULL_THETA_DEG, FULL_PHI_DEG, t_values, f_values)


def build_coarse_grid(video_length_s: float) -> GlimpseGrid:
    """Halved lattice used by the first stage of the accelerated search.

    Temporal spacing doubles to 10 s and only the widest focal scale (0.5)
    is kept, so the coarse footprints still cover the sphere samples that
    the full lattice would visit.
    """
    spacing = 2.0 * GLIMPSE_SECONDS
    n = _count_steps(video_length_s, spacing)
    t_values = tuple(spacing * i for i in range(n))
    return GlimpseGrid(COARSE_THETA_DEG, COARSE_PHI_DEG, t_values, COARSE_FOCAL_SCALES)


def grid_to_manifest(grid: GlimpseGrid) -> dict:
    """JSON-serializable description of a lattice."""
    return {
        "theta_values": list(grid.theta_values),
        "phi_values": list(grid.phi_values),
        "t_values": list(grid.t_values),
        "f_values": list(grid.f_values),
        "glimpse_duration_s": grid.glimpse_duration_s,
    }


def grid_from_manifest(manifest: dict) -> GlimpseGrid:
    try:
        return GlimpseGrid(
            tuple(float(v) for v in manifest["theta_values"]),
            tuple(float(v) for v in manifest["phi_values"]),
            tuple(float(v) for v in manifest["t_values"]),
            tuple(float(v) for v in manifest["f_values"]),
            float(manifest.get("glimpse_duration_s", GLIMPSE_SECONDS)),
        )
    except KeyError as exc:
        raise ValueError(f"grid manifest missing field {exc}") from exc


def direction_neighbors(theta_idx: int, phi_idx: int, grid: GlimpseGrid,
                        constraints: TransitionConstraints = TransitionConstraints(),
                        ) -> list[tuple[int, int]]:
    """Lattice directions reachable in one transition, sorted by index.

    Elevation indices clamp at the poles; azimuth indices wrap.  The origin
    direction is always included (staying put is allowed).
    """
    n_theta = len(grid.theta_values)
    n_phi = len(grid.phi_values)
    t_lo = max(0, theta_idx - constraints.eps_theta_steps)
    t_hi = min(n_theta - 1, theta_idx + constraints.eps_theta_steps)
    phis = sorted({(phi_idx + d) % n_phi
                   for d in range(-constraints.eps_phi_steps, constraints.eps_phi_steps + 1)})
    return [(ti, pi) for ti in range(t_lo, t_hi + 1) for pi in phis]


def focal_neighbors(f_idx: int, grid: GlimpseGrid,
                    constraints: TransitionConstraints = TransitionConstraints(),
                    ) -> list[int]:
    """Focal indices reachable in one transition, ascending."""
    base = grid.f_values[f_idx]
    return [j for j, v in enumerate(grid.f_values)
            if abs(v - base) <= constraints.max_delta_focal + 1e-9]


def feasible_successors(g: GlimpseIndex, grid: GlimpseGrid,
                        constraints: TransitionConstraints = TransitionConstraints(),
                        ) -> list[GlimpseIndex]:
    """All glimpses at the next time step reachable from ``g``, sorted.

    Returns an empty list when ``g`` is at the final time step.
    """
    grid.check_index(g)
    if g.t_idx + 1 >= grid.n_steps:
        return []
    dirs = direction_neighbors(g.theta_idx, g.phi_idx, grid, constraints)
    focals = focal_neighbors(g.f_idx, grid, constraints)
    return [GlimpseIndex(g.t_idx + 1, ti, pi, fi) for (ti, pi) in dirs for fi in focals]


def snap_to_grid_direction(theta_deg: float, phi_deg: float,
                           grid: GlimpseGrid) -> tuple[int, int]:
    """Lattice direction nearest by great-circle angle; ties pick the
    smallest (theta_idx, phi_idx)."""
    d = pose_to_direction(CameraPose(theta_deg, phi_deg))
    dots = grid.directions() @ d
    flat = int(np.argmax(dots.round(decimals=12)))
    return flat // len(grid.phi_values), flat % len(grid.phi_values)


def refinement_neighborhood(traj0, fine_grid: GlimpseGrid,
                            constraints: TransitionConstraints = TransitionConstraints(),
                            ) -> list[list[tuple[int, int, int]]]:
    """Per-time-step candidate sets around a first-pass trajectory.

    For each keyframe of ``traj0`` the set contains every lattice direction
    within one index step of the keyframe's pose (snapped to the nearest
    lattice direction), crossed with every focal scale of ``fine_grid``.

    Args:
        traj0: Trajectory whose keyframe times must equal ``fine_grid.t_values``.
        fine_grid: The lattice the refinement will search over.

    Returns:
        A list with one sorted candidate list of (theta_idx, phi_idx, f_idx)
        triples per time step.

    Raises:
        ValueError: If the keyframe times do not align with the grid.
    """
    times = [t for t, _ in traj0.keyframes]
    if len(times) != fine_grid.n_steps or any(
            abs(a - b) > 1e-6 for a, b in zip(times, fine_grid.t_values)):
        raise ValueError("trajectory keyframe times do not match the grid's time steps")
    neighborhood = []
    n_f = len(fine_grid.f_values)
    for _, pose in traj0.keyframes:
        ti, pi = snap_to_grid_direction(pose.theta_deg, pose.phi_deg, fine_grid)
        dirs = direction_neighbors(ti, pi, fine_grid, constraints)
        neighborhood.append([(a, b, fi) for (a, b) in dirs for fi in range(n_f)])
    return neighborhood
