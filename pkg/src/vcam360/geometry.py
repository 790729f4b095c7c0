"""Spherical camera geometry shared by every other module.

Conventions
-----------
Camera poses are (elevation, azimuth) pairs in degrees:

* ``theta_deg`` is elevation measured from the equator, positive toward the
  top pole, valid range [-90, 90].
* ``phi_deg`` is azimuth, stored normalized to [0, 360).  Azimuth increases
  to the viewer's left when standing at the sphere center facing the pose
  (theta=0, phi=0).

Directions are unit 3-vectors in a right-handed frame with

* +x = forward axis at pose (0, 0),
* +z = up (theta = +90),
* +y = the viewer's left when facing +x, i.e. the azimuth +90 direction.

Equirectangular pixel coordinates follow

    u = (phi_deg / 360) * width        v = (0.5 - theta_deg / 180) * height

so the frame's left edge is azimuth 0 and the top edge is elevation +90.

Viewports are rectilinear (gnomonic) projections onto the plane tangent to
the sphere at the principal axis.  The horizontal extent of the plane
subtends ``fov_deg``; the vertical extent is scaled by height/width of the
output frame.  Pixel coordinates are continuous: px = 0 is the exact left
edge of the plane, px = width/2 the principal axis.  The left half of the
image therefore shows azimuths greater than the pose azimuth (content to
the viewer's left).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Horizontal field of view, in degrees, of the virtual lens at focal scale 1.0.
BASE_FOV_DEG = 65.5


@dataclass(frozen=True)
class CameraPose:
    """A virtual camera orientation plus zoom state.

    Attributes:
        theta_deg: Elevation in degrees, in [-90, 90].
        phi_deg: Azimuth in degrees, normalized to [0, 360).
        focal_scale: Zoom factor relative to the base lens (1.0 = 65.5 deg).
    """

    theta_deg: float
    phi_deg: float
    focal_scale: float = 1.0

    def __post_init__(self) -> None:
        if not -90.0 <= self.theta_deg <= 90.0:
            raise ValueError(f"elevation out of range [-90, 90]: {self.theta_deg}")
        if not self.focal_scale > 0.0:
            raise ValueError(f"focal scale must be positive: {self.focal_scale}")
        object.__setattr__(self, "phi_deg", float(self.phi_deg) % 360.0)
        object.__setattr__(self, "theta_deg", float(self.theta_deg))
        object.__setattr__(self, "focal_scale", float(self.focal_scale))

    @property
    def fov_deg(self) -> float:
        return fov_from_focal(self.focal_scale)


@dataclass(frozen=True)
class FrameGeometry:
    """Output frame dimensions plus the horizontal field of view."""

    width: int
    height: int
    fov_deg: float

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise ValueError(f"frame dimensions must be positive: {self.width}x{self.height}")
        if not 0.0 < self.fov_deg < 180.0:
            raise ValueError(f"field of view out of range (0, 180): {self.fov_deg}")


def fov_from_focal(focal_scale: float) -> float:
    """Horizontal field of view, in degrees, of the lens at ``focal_scale``.

    The lens is calibrated so focal scale 1.0 gives a 65.5 degree FOV; zooming
    scales the focal length, so fov = 2 * arctan(tan(65.5/2) / focal_scale).
    """
    if not focal_scale > 0.0:
        raise ValueError(f"focal scale must be positive: {focal_scale}")
    half_tan = math.tan(math.radians(BASE_FOV_DEG) / 2.0)
    return math.degrees(2.0 * math.atan(half_tan / focal_scale))


def pose_to_direction(pose: CameraPose) -> np.ndarray:
    """Unit direction vector of the pose's principal axis."""
    t = math.radians(pose.theta_deg)
    p = math.radians(pose.phi_deg)
    return np.array([math.cos(t) * math.cos(p), math.cos(t) * math.sin(p), math.sin(t)])


def direction_to_pose(direction: np.ndarray, focal_scale: float = 1.0) -> CameraPose:
    """Pose whose principal axis points along ``direction`` (need not be unit)."""
    x, y, z = (float(c) for c in direction)
    norm = math.sqrt(x * x + y * y + z * z)
    if norm < 1e-12:
        raise ValueError("cannot derive a pose from a zero direction")
    theta = math.degrees(math.asin(max(-1.0, min(1.0, z / norm))))
    phi = math.degrees(math.atan2(y, x)) % 360.0
    return CameraPose(theta, phi, focal_scale)


def angle_between(d1: np.ndarray, d2: np.ndarray) -> float:
    """Great-circle angle in degrees between two direction vectors."""
    a = np.asarray(d1, dtype=float)
    b = np.asarray(d2, dtype=float)
    dot = float(np.dot(a, b) / (np.linalg.norm(a) * np.linalg.norm(b)))
    return math.degrees(math.acos(max(-1.0, min(1.0, dot))))


def angular_distance(a: CameraPose, b: CameraPose) -> float:
    """Great-circle angle in degrees between two poses' principal axes."""
    return angle_between(pose_to_direction(a), pose_to_direction(b))


def camera_basis(pose: CameraPose) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Orthonormal (forward, right, up) frame of the camera at ``pose``.

    "Up" is the direction of increasing elevation; "right" is the direction
    that increasing viewport x coordinates move toward.
    """
    t = math.radians(pose.theta_deg)
    p = math.radians(pose.phi_deg)
    forward = np.array([math.cos(t) * math.cos(p), math.cos(t) * math.sin(p), math.sin(t)])
    up = np.array([-math.sin(t) * math.cos(p), -math.sin(t) * math.sin(p), math.cos(t)])
    right = np.cross(forward, up)
    return forward, right, up


def viewport_plane_extents(geom: FrameGeometry) -> tuple[float, float]:
    """Half-extents (x, y) of the tangent projection plane at unit distance."""
    half_w = math.tan(math.radians(geom.fov_deg) / 2.0)
    half_h = half_w * geom.height / geom.width
    return half_w, half_h


def vertical_fov_deg(geom: FrameGeometry) -> float:
    """Vertical field of view implied by the horizontal FOV and aspect ratio."""
    _, half_h = viewport_plane_extents(geom)
    return math.degrees(2.0 * math.atan(half_h))


def viewport_pixel_to_direction(px, py, pose: CameraPose, geom: FrameGeometry) -> np.ndarray:
    """Direction(s) seen at continuous viewport pixel coordinates.

    Args:
        px: Pixel x coordinate(s) in [0, width); scalar or array.
        py: Pixel y coordinate(s) in [0, height); scalar or array.
        pose: Camera pose (its focal scale is ignored; geom carries the FOV).
        geom: Viewport dimensions and horizontal FOV.

    Returns:
        Unit direction array of shape (..., 3) broadcast from px/py.
    """
    px = np.asarray(px, dtype=float)
    py = np.asarray(py, dtype=float)
    if np.any(px < 0.0) or np.any(px >= geom.width) or np.any(py < 0.0) or np.any(py >= geom.height):
        raise ValueError("pixel coordinates out of the viewport bounds")
    return _pixel_to_direction_unchecked(px, py, pose, geom)


def _pixel_to_direction_unchecked(px, py, pose: CameraPose, geom: FrameGeometry) -> np.ndarray:
    half_w, half_h = viewport_plane_extents(geom)
    x_ndc = (np.asarray(px, dtype=float) / geom.width - 0.5) * 2.0
    y_ndc = (np.asarray(py, dtype=float) / geom.height - 0.5) * 2.0
    forward, right, up = camera_basis(pose)
    d = (
        forward
        + (x_ndc * half_w)[..., None] * right
        - (y_ndc * half_h)[..., None] * up
    )
    return d / np.linalg.norm(d, axis=-1, keepdims=True)


def direction_to_viewport(direction: np.ndarray, pose: CameraPose, geom: FrameGeometry):
    """Continuous viewport pixel coordinates where ``direction`` projects.

    Inverse of :func:`viewport_pixel_to_direction`.  The returned coordinates
    may fall outside the frame when the direction is visible on the tangent
    plane but beyond the frame's extent.

    Raises:
        ValueError: If the direction is 90 degrees or more away from the
            principal axis, where the gnomonic projection is undefined.
    """
    d = np.asarray(direction, dtype=float)
    forward, right, up = camera_basis(pose)
    a = d @ forward
    if np.any(a <= 1e-12):
        raise ValueError("direction lies behind the viewport projection plane")
    half_w, half_h = viewport_plane_extents(geom)
    x_ndc = (d @ right) / a / half_w
    y_ndc = -(d @ up) / a / half_h
    px = (x_ndc + 1.0) / 2.0 * geom.width
    py = (y_ndc + 1.0) / 2.0 * geom.height
    if px.ndim == 0:
        return float(px), float(py)
    return px, py


def direction_to_equirect(direction: np.ndarray, width: int, height: int):
    """Equirectangular pixel coordinates (u, v) of direction(s)."""
    d = np.asarray(direction, dtype=float)
    norm = np.linalg.norm(d, axis=-1)
    z = np.clip(d[..., 2] / norm, -1.0, 1.0)
    theta = np.degrees(np.arcsin(z))
    phi = np.degrees(np.arctan2(d[..., 1], d[..., 0])) % 360.0
    u = phi / 360.0 * width
    v = (0.5 - theta / 180.0) * height
    if u.ndim == 0:
        return float(u), float(v)
    return u, v


def equirect_to_direction(u, v, width: int, height: int) -> np.ndarray:
    """Direction(s) at equirectangular pixel coordinates (u, v)."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    phi = np.radians(u / width * 360.0)
    theta = np.radians((0.5 - v / height) * 180.0)
    cos_t = np.cos(theta)
    d = np.stack([cos_t * np.cos(phi), cos_t * np.sin(phi), np.sin(theta)], axis=-1)
    return d
