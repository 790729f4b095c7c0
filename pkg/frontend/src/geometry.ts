/**
 * Camera geometry, ported to match the Python library's conventions
 * exactly. Elevation theta in [-90, 90], azimuth phi in [0, 360)
 * increasing to the viewer's left when facing (0, 0); world frame x
 * forward, y left, z up. The golden-vector suite keeps this file and the
 * Python implementation from drifting apart.
 */

export interface CameraPose {
  thetaDeg: number;
  phiDeg: number;
  focalScale: number;
}

export type Vec3 = [number, number, number];

export const BASE_FOV_DEG = 65.5;
export const ZOOM_LEVELS = [0.5, 1.0, 1.5] as const;

const DEG = Math.PI / 180;

export function mod(a: number, n: number): number {
  return ((a % n) + n) % n;
}

/** Shortest signed azimuth difference, in [-180, 180). */
export function wrapDelta(deg: number): number {
  return mod(deg + 180, 360) - 180;
}

export function fovFromFocal(focalScale: number): number {
  return (2 / DEG) * Math.atan(Math.tan((BASE_FOV_DEG / 2) * DEG) / focalScale);
}

export function poseToDirection(thetaDeg: number, phiDeg: number): Vec3 {
  const t = thetaDeg * DEG;
  const p = phiDeg * DEG;
  return [Math.cos(t) * Math.cos(p), Math.cos(t) * Math.sin(p), Math.sin(t)];
}

export function directionToAngles(d: Vec3): { thetaDeg: number; phiDeg: number } {
  const norm = Math.hypot(d[0], d[1], d[2]);
  const z = Math.min(1, Math.max(-1, d[2] / norm));
  return {
    thetaDeg: Math.asin(z) / DEG,
    phiDeg: mod(Math.atan2(d[1], d[0]) / DEG, 360),
  };
}

export function angleBetweenDeg(a: Vec3, b: Vec3): number {
  const dot =
    (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]) /
    (Math.hypot(a[0], a[1], a[2]) * Math.hypot(b[0], b[1], b[2]));
  return Math.acos(Math.min(1, Math.max(-1, dot))) / DEG;
}

/**
 * Orthonormal (forward, right, up) frame at a pose. "Up" points toward
 * increasing elevation; "right" is where increasing viewport x leads.
 */
export function cameraBasis(thetaDeg: number, phiDeg: number): {
  forward: Vec3;
  right: Vec3;
  up: Vec3;
} {
  const t = thetaDeg * DEG;
  const p = phiDeg * DEG;
  const forward: Vec3 = [
    Math.cos(t) * Math.cos(p),
    Math.cos(t) * Math.sin(p),
    Math.sin(t),
  ];
  const up: Vec3 = [
    -Math.sin(t) * Math.cos(p),
    -Math.sin(t) * Math.sin(p),
    Math.cos(t),
  ];
  const right: Vec3 = [
    forward[1] * up[2] - forward[2] * up[1],
    forward[2] * up[0] - forward[0] * up[2],
    forward[0] * up[1] - forward[1] * up[0],
  ];
  return { forward, right, up };
}

/** Half-extents of the tangent projection plane at unit distance. */
export function planeExtents(
  width: number,
  height: number,
  fovDeg: number,
): { halfW: number; halfH: number } {
  const halfW = Math.tan((fovDeg / 2) * DEG);
  return { halfW, halfH: (halfW * height) / width };
}

/** Direction seen at normalized device coordinates (x, y in [-1, 1]). */
export function ndcToDirection(
  xNdc: number,
  yNdc: number,
  pose: CameraPose,
  halfW: number,
  halfH: number,
): Vec3 {
  const { forward, right, up } = cameraBasis(pose.thetaDeg, pose.phiDeg);
  return [
    forward[0] + xNdc * halfW * right[0] - yNdc * halfH * up[0],
    forward[1] + xNdc * halfW * right[1] - yNdc * halfH * up[1],
    forward[2] + xNdc * halfW * right[2] - yNdc * halfH * up[2],
  ];
}

/** Equirect pixel coordinates (u, v) that a direction lands on. */
export function directionToEquirect(
  d: Vec3,
  width: number,
  height: number,
): { u: number; v: number } {
  const { thetaDeg, phiDeg } = directionToAngles(d);
  return {
    u: (phiDeg / 360) * width,
    v: (0.5 - thetaDeg / 180) * height,
  };
}

/** One zoom step through the discrete focal levels, clamped at the ends. */
export function stepZoom(focalScale: number, direction: "in" | "out"): number {
  const idx = ZOOM_LEVELS.findIndex((f) => f === focalScale);
  if (idx < 0) {
    throw new Error(`focal scale ${focalScale} is not a zoom level`);
  }
  const next = direction === "in" ? Math.min(idx + 1, ZOOM_LEVELS.length - 1)
                                  : Math.max(idx - 1, 0);
  return ZOOM_LEVELS[next];
}
